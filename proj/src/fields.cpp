#include "wfr/fields.hpp"

#include "wfr/error.hpp"

namespace wfr {

FieldSet::FieldSet(GaussianMixtureModel q1, GaussianMixtureModel q2, DiffusionSchedule schedule,
                   bool frozen)
    : q1_(std::move(q1)), q2_(std::move(q2)), schedule_(std::move(schedule)), frozen_(frozen) {
  if (q1_.dim() != q2_.dim()) fail(ErrorKind::invalid_argument, "field set: model dimensions differ");
  if (!frozen_ && !schedule_.is_linear()) {
    fail(ErrorKind::unsupported_model, "field set: noised models need a linear forward drift");
  }
}

FieldSlice FieldSet::at(double t) const {
  if (frozen_) return FieldSlice{t, schedule_.sigma(t), &schedule_, q1_, q2_};
  return FieldSlice{t, schedule_.sigma(t), &schedule_, ou_forward_marginal(q1_, t, schedule_),
                    ou_forward_marginal(q2_, t, schedule_)};
}

}  // namespace wfr
