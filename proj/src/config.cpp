#include "wfr/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "wfr/error.hpp"

namespace wfr {

using nlohmann::json;

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::sample: return "sample";
    case Experiment::oracle: return "oracle";
    case Experiment::jump_equivalence: return "jump_equivalence";
    case Experiment::geodesic: return "geodesic";
    case Experiment::diagnostics: return "diagnostics";
  }
  return "unknown";
}

std::string_view to_string(DiagnosticCheck c) {
  switch (c) {
    case DiagnosticCheck::adjoint: return "adjoint";
    case DiagnosticCheck::gamma: return "gamma";
    case DiagnosticCheck::variance_decay: return "variance-decay";
    case DiagnosticCheck::chi2: return "chi2";
  }
  return "unknown";
}

DiagnosticCheck parse_diagnostic_check(std::string_view name) {
  for (auto c : {DiagnosticCheck::adjoint, DiagnosticCheck::gamma, DiagnosticCheck::variance_decay,
                 DiagnosticCheck::chi2}) {
    if (to_string(c) == name) return c;
  }
  if (name == "variance_decay") return DiagnosticCheck::variance_decay;
  throw ConfigError("diagnose.check", "unknown check '" + std::string(name) + "'");
}

DiffusionSchedule DiffusionConfig::build() const {
  if (family == ScheduleFamily::constant) return DiffusionSchedule::constant(kappa, sigma);
  return DiffusionSchedule::vp_linear(beta_min, beta_max, stationary_var);
}

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where.empty() ? "<root>" : where, "must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown field");
  }
}

std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

double get_number(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(where, key), "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(join(where, key), "must be finite");
  return d;
}

std::size_t get_count(const json& obj, const std::string& where, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(join(where, key), "must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::string get_string(const json& obj, const std::string& where, const char* key, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(where, key), "must be a string");
  return v.get<std::string>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(join(where, key), "must be true or false");
  return v.get<bool>();
}

GaussianMixtureModel parse_model(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where, "must be a nonempty list of components");
  std::vector<std::vector<double>> means;
  std::vector<double> vars, weights;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    only_keys(v[i], at, {"mean", "var", "weight"});
    if (!v[i].contains("mean")) throw ConfigError(at + ".mean", "required");
    const json& m = v[i].at("mean");
    std::vector<double> mean;
    if (m.is_number()) {
      mean.push_back(m.get<double>());
    } else if (m.is_array() && !m.empty()) {
      for (const auto& c : m) {
        if (!c.is_number()) throw ConfigError(at + ".mean", "entries must be numbers");
        mean.push_back(c.get<double>());
      }
    } else {
      throw ConfigError(at + ".mean", "must be a number or a nonempty list of numbers");
    }
    const double var = get_number(v[i], at, "var", 1.0);
    if (!(var > 0.0)) throw ConfigError(at + ".var", "must be positive");
    const double w = get_number(v[i], at, "weight", 1.0);
    if (!(w > 0.0)) throw ConfigError(at + ".weight", "must be positive");
    if (!means.empty() && mean.size() != means.front().size()) {
      throw ConfigError(at + ".mean", "dimension differs from the first component");
    }
    means.push_back(std::move(mean));
    vars.push_back(var);
    weights.push_back(w);
  }
  return GaussianMixtureModel::from_weights(means, vars, weights);
}

GaussianPoint parse_point(const json& obj, const std::string& where, GaussianPoint fallback) {
  only_keys(obj, where, {"mu", "sigma"});
  GaussianPoint p{get_number(obj, where, "mu", fallback.mu), get_number(obj, where, "sigma", fallback.sigma)};
  if (!(p.sigma > 0.0)) throw ConfigError(where + ".sigma", "must be positive");
  return p;
}

GridSpec parse_grid(const json& obj, const std::string& where, GridSpec g) {
  only_keys(obj, where, {"lo", "hi", "cells"});
  g.lo = get_number(obj, where, "lo", g.lo);
  g.hi = get_number(obj, where, "hi", g.hi);
  g.n_cells = get_count(obj, where, "cells", g.n_cells);
  if (!(g.hi > g.lo)) throw ConfigError(where + ".hi", "must exceed lo");
  if (g.n_cells < 3) throw ConfigError(where + ".cells", "must be >= 3");
  return g;
}

std::vector<double> parse_times(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where, "must be a list of numbers");
  std::vector<double> out;
  for (const auto& t : v) {
    if (!t.is_number()) throw ConfigError(where, "entries must be numbers");
    out.push_back(t.get<double>());
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  only_keys(doc, "",
            {"experiment", "model1", "model2", "interpolation", "schedule", "diffusion", "frozen_models",
             "particles", "resample", "reaction", "seed", "snapshots", "output_dir", "grid", "geodesic",
             "diagnose"});
  RunConfig c;
  c.source = doc;

  if (doc.contains("experiment")) {
    const std::string e = get_string(doc, "", "experiment", "");
    bool found = false;
    for (auto k : {Experiment::sample, Experiment::oracle, Experiment::jump_equivalence, Experiment::geodesic,
                   Experiment::diagnostics}) {
      if (to_string(k) == e) {
        c.experiment = k;
        found = true;
      }
    }
    if (e == "equivalence") {
      c.experiment = Experiment::jump_equivalence;
      found = true;
    } else if (e == "diagnose") {
      c.experiment = Experiment::diagnostics;
      found = true;
    }
    if (!found) throw ConfigError("experiment", "unknown experiment '" + e + "'");
  }
  if (doc.contains("model1")) c.model1 = parse_model(doc.at("model1"), "model1");
  if (doc.contains("model2")) c.model2 = parse_model(doc.at("model2"), "model2");

  if (doc.contains("interpolation")) {
    const json& j = doc.at("interpolation");
    only_keys(j, "interpolation", {"kind", "beta"});
    const std::string kind = get_string(j, "interpolation", "kind", "geometric");
    if (kind == "geometric") {
      c.interpolation.kind = InterpolationKind::geometric;
    } else if (kind == "mixture") {
      c.interpolation.kind = InterpolationKind::mixture;
    } else if (kind == "fisher_rao") {
      c.interpolation.kind = InterpolationKind::fisher_rao;
    } else {
      throw ConfigError("interpolation.kind", "must be geometric, mixture or fisher_rao");
    }
    c.interpolation.beta = get_number(j, "interpolation", "beta", 0.5);
    if (c.interpolation.kind != InterpolationKind::geometric &&
        !(c.interpolation.beta >= 0.0 && c.interpolation.beta <= 1.0)) {
      throw ConfigError("interpolation.beta", "must lie in [0,1] for mixture and fisher_rao");
    }
  }

  if (doc.contains("schedule")) {
    const json& j = doc.at("schedule");
    only_keys(j, "schedule", {"t_start", "t_end", "n_steps"});
    c.t_start = get_number(j, "schedule", "t_start", c.t_start);
    c.t_end = get_number(j, "schedule", "t_end", c.t_end);
    c.n_steps = get_count(j, "schedule", "n_steps", c.n_steps);
    if (!(c.t_start >= 0.0 && c.t_start <= 1.0)) throw ConfigError("schedule.t_start", "must lie in [0,1]");
    if (!(c.t_end >= 0.0 && c.t_end <= 1.0)) throw ConfigError("schedule.t_end", "must lie in [0,1]");
    if (!(c.t_start > c.t_end)) throw ConfigError("schedule.t_end", "sampling runs from t_start down to t_end");
  }

  if (doc.contains("diffusion")) {
    const json& j = doc.at("diffusion");
    only_keys(j, "diffusion", {"family", "beta_min", "beta_max", "stationary_var", "kappa", "sigma"});
    const std::string fam = get_string(j, "diffusion", "family", "vp_linear");
    if (fam == "vp_linear") {
      c.diffusion.family = ScheduleFamily::vp_linear;
    } else if (fam == "constant") {
      c.diffusion.family = ScheduleFamily::constant;
    } else {
      throw ConfigError("diffusion.family", "must be vp_linear or constant");
    }
    c.diffusion.beta_min = get_number(j, "diffusion", "beta_min", c.diffusion.beta_min);
    c.diffusion.beta_max = get_number(j, "diffusion", "beta_max", c.diffusion.beta_max);
    c.diffusion.stationary_var = get_number(j, "diffusion", "stationary_var", c.diffusion.stationary_var);
    c.diffusion.kappa = get_number(j, "diffusion", "kappa", c.diffusion.kappa);
    c.diffusion.sigma = get_number(j, "diffusion", "sigma", c.diffusion.sigma);
    if (c.diffusion.beta_min < 0.0) throw ConfigError("diffusion.beta_min", "must be >= 0");
    if (c.diffusion.beta_max < 0.0) throw ConfigError("diffusion.beta_max", "must be >= 0");
    if (!(c.diffusion.stationary_var > 0.0)) throw ConfigError("diffusion.stationary_var", "must be positive");
    if (c.diffusion.sigma < 0.0) throw ConfigError("diffusion.sigma", "must be >= 0");
  }
  c.frozen_models = get_bool(doc, "", "frozen_models", false);

  c.particles = get_count(doc, "", "particles", c.particles);
  if (c.particles == 0) throw ConfigError("particles", "must be >= 1");

  if (doc.contains("resample")) {
    const json& j = doc.at("resample");
    only_keys(j, "resample", {"scheme", "trigger", "value"});
    const std::string trig = get_string(j, "resample", "trigger", "ess_below");
    if (trig == "never") {
      c.resample.reset();
    } else {
      ResampleScheme s;
      const std::string scheme = get_string(j, "resample", "scheme", "systematic");
      if (scheme == "systematic") {
        s.kind = ResampleKind::systematic;
      } else if (scheme == "multinomial") {
        s.kind = ResampleKind::multinomial;
      } else {
        throw ConfigError("resample.scheme", "must be systematic or multinomial");
      }
      if (trig == "ess_below") {
        const double f = get_number(j, "resample", "value", 0.5);
        if (!(f > 0.0 && f <= 1.0)) throw ConfigError("resample.value", "ess fraction must lie in (0,1]");
        s.trigger = ResampleTrigger::ess_below(f);
      } else if (trig == "every_n") {
        if (!j.contains("value") || !j.at("value").is_number_integer() || j.at("value").get<long long>() < 1) {
          throw ConfigError("resample.value", "every_n needs an integer >= 1");
        }
        s.trigger = ResampleTrigger::every_n(j.at("value").get<std::size_t>());
      } else {
        throw ConfigError("resample.trigger", "must be ess_below, every_n or never");
      }
      c.resample = s;
    }
  }

  const std::string reaction = get_string(doc, "", "reaction", "reweight");
  if (reaction == "reweight") {
    c.reaction = ReactionMode::reweight;
  } else if (reaction == "jump") {
    c.reaction = ReactionMode::jump;
  } else {
    throw ConfigError("reaction", "must be reweight or jump");
  }

  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0)) {
      throw ConfigError("seed", "must be a nonnegative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("snapshots")) {
    c.snapshots = parse_times(doc.at("snapshots"), "snapshots");
    for (double t : c.snapshots) {
      if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("snapshots", "times must lie in [0,1]");
    }
  }
  c.output_dir = get_string(doc, "", "output_dir", c.output_dir.string());
  if (c.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  if (doc.contains("grid")) c.grid = parse_grid(doc.at("grid"), "grid", c.grid);

  if (doc.contains("geodesic")) {
    const json& j = doc.at("geodesic");
    only_keys(j, "geodesic", {"p0", "p1", "kind", "n_samples", "t", "grid_mode", "triangle", "grid"});
    GeodesicConfig& g = c.geodesic;
    if (j.contains("p0")) g.p0 = parse_point(j.at("p0"), "geodesic.p0", g.p0);
    if (j.contains("p1")) g.p1 = parse_point(j.at("p1"), "geodesic.p1", g.p1);
    if (j.contains("kind")) {
      const std::string k = get_string(j, "geodesic", "kind", "all");
      if (k == "all") {
        g.kind.reset();
      } else {
        try {
          g.kind = parse_geodesic_kind(k);
        } catch (const Error&) {
          throw ConfigError("geodesic.kind", "must be wasserstein, mixture, exponential, fisher_rao or all");
        }
      }
    }
    g.n_samples = get_count(j, "geodesic", "n_samples", g.n_samples);
    if (g.n_samples < 2) throw ConfigError("geodesic.n_samples", "must be >= 2");
    if (j.contains("t")) {
      g.t_values = parse_times(j.at("t"), "geodesic.t");
      for (double t : g.t_values) {
        if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("geodesic.t", "values must lie in [0,1]");
      }
    }
    g.grid_mode = get_bool(j, "geodesic", "grid_mode", g.grid_mode);
    if (j.contains("triangle")) {
      const json& tj = j.at("triangle");
      if (tj.is_null()) {
        g.triangle.reset();
      } else {
        only_keys(tj, "geodesic.triangle", {"p", "u", "v"});
        TriangleConfig tri;
        if (tj.contains("p")) tri.p = parse_point(tj.at("p"), "geodesic.triangle.p", tri.p);
        if (tj.contains("u")) tri.u = parse_point(tj.at("u"), "geodesic.triangle.u", tri.u);
        if (tj.contains("v")) tri.v = parse_point(tj.at("v"), "geodesic.triangle.v", tri.v);
        g.triangle = tri;
      }
    }
    if (j.contains("grid")) g.grid = parse_grid(j.at("grid"), "geodesic.grid", g.grid);
  }

  if (doc.contains("diagnose")) {
    const json& j = doc.at("diagnose");
    only_keys(j, "diagnose", {"check", "states", "trials", "particles", "inner_paths", "ula_step"});
    DiagnoseConfig& d = c.diagnose;
    if (j.contains("check")) d.check = parse_diagnostic_check(get_string(j, "diagnose", "check", ""));
    d.states = get_count(j, "diagnose", "states", d.states);
    d.trials = get_count(j, "diagnose", "trials", d.trials);
    d.particles = get_count(j, "diagnose", "particles", d.particles);
    d.inner_paths = get_count(j, "diagnose", "inner_paths", d.inner_paths);
    d.ula_step = get_number(j, "diagnose", "ula_step", d.ula_step);
    if (d.states < 1) throw ConfigError("diagnose.states", "must be >= 1");
    if (d.trials < 1) throw ConfigError("diagnose.trials", "must be >= 1");
    if (d.particles < 2) throw ConfigError("diagnose.particles", "must be >= 2");
    if (d.inner_paths < 2) throw ConfigError("diagnose.inner_paths", "must be >= 2");
    if (!(d.ula_step > 0.0)) throw ConfigError("diagnose.ula_step", "must be positive");
  }
  return c;
}

void RunConfig::validate() const {
  const bool needs_models = experiment == Experiment::sample || experiment == Experiment::oracle ||
                            experiment == Experiment::jump_equivalence;
  if (!needs_models) return;
  if (!model1) throw ConfigError("model1", "required for this experiment");
  if (!model2) throw ConfigError("model2", "required for this experiment");
  if (model1->dim() != model2->dim()) throw ConfigError("model2", "dimension differs from model1");
  if (experiment == Experiment::oracle && model1->dim() != 1) throw ConfigError("model1", "the grid oracle is 1-D only");
  if (n_steps == 0 && experiment != Experiment::sample) throw ConfigError("schedule.n_steps", "must be >= 1");
  if (particles == 0) throw ConfigError("particles", "must be >= 1");
}

FieldSet RunConfig::fields() const {
  validate();
  if (!model1 || !model2) throw ConfigError("model1", "models are required");
  return FieldSet(*model1, *model2, diffusion.build(), frozen_models);
}

SamplerSettings RunConfig::sampler_settings() const {
  SamplerSettings s{.fields = fields(), .interp = interpolation};
  s.t_start = t_start;
  s.t_end = t_end;
  s.n_steps = n_steps;
  s.particles = particles;
  s.resample = resample;
  s.seed = seed;
  s.snapshot_times = snapshots;
  s.reaction = reaction;
  return s;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return parse_run_config(doc);
}

}  // namespace wfr
