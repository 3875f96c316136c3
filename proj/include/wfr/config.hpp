#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfr/correctors.hpp"
#include "wfr/dynamics.hpp"
#include "wfr/fields.hpp"
#include "wfr/geometry.hpp"
#include "wfr/models.hpp"
#include "wfr/reaction.hpp"

namespace wfr {

enum class Experiment { sample, oracle, jump_equivalence, geodesic, diagnostics };

std::string_view to_string(Experiment e);

struct DiffusionConfig {
  ScheduleFamily family = ScheduleFamily::vp_linear;
  double beta_min = 0.1;
  double beta_max = 20.0;
  double stationary_var = 1.0;
  double kappa = 0.0;
  double sigma = 1.0;

  DiffusionSchedule build() const;
};

struct TriangleConfig {
  GaussianPoint p{0.0, 1.0};
  GaussianPoint u{-2.0, 0.6};
  GaussianPoint v{2.0, 1.6};
};

struct GeodesicConfig {
  GaussianPoint p0{0.0, 1.0};
  GaussianPoint p1{2.0, 1.0};
  std::optional<GeodesicKind> kind;  // unset: every kind
  std::size_t n_samples = 11;
  std::vector<double> t_values;      // overrides the uniform samples
  bool grid_mode = false;            // discretize endpoints for every kind
  std::optional<TriangleConfig> triangle = TriangleConfig{};
  GridSpec grid{};
};

enum class DiagnosticCheck { adjoint, gamma, variance_decay, chi2 };

std::string_view to_string(DiagnosticCheck c);
DiagnosticCheck parse_diagnostic_check(std::string_view name);

struct DiagnoseConfig {
  DiagnosticCheck check = DiagnosticCheck::adjoint;
  std::size_t states = 10;
  std::size_t trials = 50;
  std::size_t particles = 100000;  // variance_decay
  std::size_t inner_paths = 8;
  double ula_step = 0.01;
};

// Declarative description of one experiment; see README for the JSON form.
struct RunConfig {
  Experiment experiment = Experiment::sample;
  std::optional<GaussianMixtureModel> model1;
  std::optional<GaussianMixtureModel> model2;
  InterpolationSpec interpolation{};
  double t_start = 1.0;
  double t_end = 0.0;
  std::size_t n_steps = 500;
  DiffusionConfig diffusion{};
  bool frozen_models = false;
  std::size_t particles = 1000;
  std::optional<ResampleScheme> resample = ResampleScheme{};
  ReactionMode reaction = ReactionMode::reweight;
  std::uint64_t seed = 0;
  std::vector<double> snapshots;
  std::filesystem::path output_dir = "wfr_out";
  GridSpec grid{-8.0, 10.0, 1024};
  GeodesicConfig geodesic{};
  DiagnoseConfig diagnose{};

  nlohmann::json source;  // the parsed document, echoed into summaries

  // Field-level checks that depend on several fields (models present, etc.).
  void validate() const;
  FieldSet fields() const;
  SamplerSettings sampler_settings() const;
};

// Throws ConfigError naming the offending field.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace wfr
