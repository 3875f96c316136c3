#include "wfr/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include "wfr/csv.hpp"
#include "wfr/dynamics.hpp"
#include "wfr/error.hpp"
#include "wfr/oracle.hpp"
#include "wfr/stats.hpp"

#ifndef WFR_VERSION
#define WFR_VERSION "0.1.0-unknown"
#endif

namespace wfr {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view version() { return WFR_VERSION; }

namespace {

class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) fail(ErrorKind::invalid_argument, "cannot create output directory '" + dir_.string() + "'");
  }

  std::ofstream open(const std::string& name) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) fail(ErrorKind::invalid_argument, "cannot write '" + p.string() + "'");
    files.push_back(p);
    return out;
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream out = open(name);
    out << j.dump(2) << '\n';
  }

  std::vector<fs::path> files;

 private:
  fs::path dir_;
};

void write_ensemble_rows(CsvWriter& csv, double t, const Ensemble& e) {
  std::vector<double> row(e.dim() + 4);
  for (std::size_t k = 0; k < e.size(); ++k) {
    row[0] = t;
    row[1] = static_cast<double>(k);
    const auto x = e.position(k);
    std::copy(x.begin(), x.end(), row.begin() + 2);
    row[e.dim() + 2] = e.log_w(k);
    row[e.dim() + 3] = e.ell(k);
    csv.row(row);
  }
}

json ensemble_moments(const Ensemble& e) {
  json mean = json::array(), var = json::array();
  for (std::size_t c = 0; c < e.dim(); ++c) {
    const WeightedSample s = weighted_coordinate(e, c);
    const Moments m = weighted_moments(s.x, s.w);
    mean.push_back(m.mean);
    var.push_back(m.variance);
  }
  return json{{"mean", mean}, {"variance", var}};
}

json run_sample(const RunConfig& cfg, OutputDir& out) {
  const RunResult r = run(cfg.sampler_settings());
  const std::size_t d = r.final_ensemble.dim();
  {
    std::ofstream f = out.open("snapshots.csv");
    std::vector<std::string> header{"snapshot_t", "particle_id"};
    for (std::size_t c = 0; c < d; ++c) header.push_back("x" + std::to_string(c));
    header.push_back("log_w");
    header.push_back("ell");
    CsvWriter csv(f, header);
    if (r.snapshots.empty()) {
      write_ensemble_rows(csv, r.final_ensemble.time(), r.final_ensemble);
    } else {
      for (const Snapshot& s : r.snapshots) write_ensemble_rows(csv, s.t, s.ensemble);
    }
  }
  {
    std::ofstream f = out.open("ess_trace.csv");
    CsvWriter csv(f, {"step", "t", "ess"});
    for (std::size_t i = 0; i < r.ess_trace.size(); ++i) {
      csv.row({static_cast<double>(i + 1), r.time_trace[i], r.ess_trace[i]});
    }
  }
  json s = ensemble_moments(r.final_ensemble);
  s["ess_trace"] = r.ess_trace;
  s["log_normalizer"] = r.log_normalizer;
  s["resample_count"] = r.resample_count;
  s["jump_count"] = r.jump_count;
  s["alive"] = r.final_ensemble.alive_count();
  s["particles"] = r.final_ensemble.size();
  return s;
}

json run_oracle(const RunConfig& cfg, OutputDir& out) {
  const FieldSet fields = cfg.fields();
  const GridDensity p0 = GridDensity::gaussian(cfg.grid.lo, cfg.grid.hi, cfg.grid.n_cells, 0.0, 1.0);
  PdeSolveOptions opts;
  opts.snapshot_times = cfg.snapshots;
  opts.substep = true;
  const GridTrajectory traj = fk_pde_solve(p0, guided_pde_coefficients(fields, cfg.interpolation),
                                           TimeSchedule(cfg.t_start, cfg.t_end, cfg.n_steps), opts);
  {
    std::ofstream f = out.open("grid.csv");
    CsvWriter csv(f, {"t", "x_center", "density"});
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const GridDensity& g = traj.densities[k];
      for (std::size_t i = 0; i < g.n_cells; ++i) csv.row({traj.times[k], g.center(i), g.values[i]});
    }
  }
  const GridDensity& fin = traj.densities.back();
  const std::vector<double> c = fin.centers();
  const Moments m = weighted_moments(c, fin.values);
  return json{{"mean", m.mean}, {"variance", m.variance}, {"recorded_times", traj.times}};
}

}  // namespace

double max_adjoint_residual(std::size_t states, std::size_t trials, std::uint64_t seed) {
  double worst = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    RngStream rng(seed, StreamPurpose::diagnostic, trial, 0);
    std::vector<double> p(states), psi(states);
    double total = 0.0;
    for (std::size_t i = 0; i < states; ++i) {
      p[i] = 0.05 + rng.uniform();
      total += p[i];
    }
    for (std::size_t i = 0; i < states; ++i) {
      p[i] /= total;
      psi[i] = rng.normal();
    }
    worst = std::max(worst, discrete_adjoint_check(p, psi));
  }
  return worst;
}

namespace {

json run_equivalence(const RunConfig& cfg, OutputDir& out) {
  SamplerSettings reweight = cfg.sampler_settings();
  reweight.reaction = ReactionMode::reweight;
  SamplerSettings jump = reweight;
  jump.reaction = ReactionMode::jump;
  const RunResult a = run(reweight);
  const RunResult b = run(jump);
  if (a.final_ensemble.dim() != 1) fail(ErrorKind::unsupported_model, "equivalence: models must be 1-D");
  const WeightedSample sa = weighted_coordinate(a.final_ensemble);
  const WeightedSample sb = weighted_coordinate(b.final_ensemble);
  const double w1 = wasserstein1(sa.x, sa.w, sb.x, sb.w);
  const double adjoint = max_adjoint_residual(cfg.diagnose.states, cfg.diagnose.trials, cfg.seed);
  json report{
      {"terminal_w1", w1},
      {"reweight", ensemble_moments(a.final_ensemble)},
      {"jump", ensemble_moments(b.final_ensemble)},
      {"reweight_log_normalizer", a.log_normalizer},
      {"jump_log_normalizer", b.log_normalizer},
      {"resample_count", a.resample_count},
      {"jump_count", b.jump_count},
      {"adjoint_max_residual", adjoint},
      {"adjoint_states", cfg.diagnose.states},
      {"adjoint_trials", cfg.diagnose.trials},
  };
  out.write_json("equivalence.json", report);
  return report;
}

std::vector<double> geodesic_ts(const GeodesicConfig& g) {
  return g.t_values.empty() ? linspace(0.0, 1.0, g.n_samples) : g.t_values;
}

void write_points(std::ofstream& f, const std::vector<double>& s, const std::vector<double>& t,
                  const std::vector<GeodesicPoint>& pts, const GridSpec& grid) {
  const bool all_gaussian = std::all_of(pts.begin(), pts.end(), [](const GeodesicPoint& p) {
    return std::holds_alternative<GaussianPoint>(p);
  });
  if (all_gaussian) {
    CsvWriter csv(f, {"s", "t", "mu", "sigma"});
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const auto& p = std::get<GaussianPoint>(pts[k]);
      csv.row({s[k], t[k], p.mu, p.sigma});
    }
    return;
  }
  CsvWriter csv(f, {"s", "cell_center", "density"});
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const GridDensity g = as_grid(pts[k], grid);
    for (std::size_t i = 0; i < g.n_cells; ++i) csv.row({s[k], g.center(i), g.values[i]});
  }
}

json run_geodesic(const RunConfig& cfg, OutputDir& out) {
  const GeodesicConfig& g = cfg.geodesic;
  const std::vector<double> ts = geodesic_ts(g);
  std::vector<GeodesicKind> kinds;
  if (g.kind) {
    kinds.push_back(*g.kind);
  } else {
    kinds.assign(std::begin(all_geodesic_kinds), std::end(all_geodesic_kinds));
  }
  json files = json::array();
  for (GeodesicKind kind : kinds) {
    std::vector<GeodesicPoint> pts;
    if (g.grid_mode) {
      const GridDensity a = to_grid(g.p0, g.grid), b = to_grid(g.p1, g.grid);
      for (double t : ts) pts.emplace_back(grid_geodesic(a, b, t, kind));
    } else {
      for (double t : ts) pts.push_back(gaussian_geodesic(g.p0, g.p1, t, kind, g.grid));
    }
    const std::string name = "geodesic_" + std::string(to_string(kind)) + ".csv";
    std::ofstream f = out.open(name);
    write_points(f, ts, ts, pts, g.grid);
    files.push_back(name);
  }

  json tri = nullptr;
  if (g.triangle) {
    const TriangleConfig& T = *g.triangle;
    const std::vector<double> ss = linspace(0.0, 1.0, g.n_samples);
    const std::vector<double> half(ss.size(), 0.5);
    struct Edge {
      const char* name;
      GaussianPoint a, b;
    };
    const Edge edges[] = {{"pu", T.p, T.u}, {"pv", T.p, T.v}, {"uv", T.u, T.v}};
    for (GeodesicKind kind : all_geodesic_kinds) {
      for (const Edge& e : edges) {
        std::vector<GeodesicPoint> pts;
        for (double s : ss) pts.push_back(gaussian_geodesic(e.a, e.b, s, kind, g.grid));
        const std::string name = "triangle_edge_" + std::string(e.name) + "_" + std::string(to_string(kind)) + ".csv";
        std::ofstream f = out.open(name);
        write_points(f, ss, ss, pts, g.grid);
        files.push_back(name);
      }
    }
    for (GeodesicKind ki : all_geodesic_kinds) {
      for (GeodesicKind kj : all_geodesic_kinds) {
        const std::vector<GeodesicPoint> pts = median_trajectory(T.p, T.u, T.v, ki, kj, g.n_samples, g.grid);
        const std::string name =
            "triangle_median_" + std::string(to_string(ki)) + "_" + std::string(to_string(kj)) + ".csv";
        std::ofstream f = out.open(name);
        write_points(f, ss, half, pts, g.grid);
        files.push_back(name);
      }
    }
    tri = json{{"p", {T.p.mu, T.p.sigma}},
               {"u", {T.u.mu, T.u.sigma}},
               {"v", {T.v.mu, T.v.sigma}},
               {"median_construction",
                "interpretation: midpoint (t=0.5) of the edge-kind geodesic from p to each point of the "
                "uv-kind geodesic from u to v; file triangle_median_<edge-kind>_<uv-kind>.csv"}};
  }
  return json{{"files", files}, {"triangle", tri}};
}

json run_diagnostics(const RunConfig& cfg, OutputDir& out) {
  const DiagnoseConfig& d = cfg.diagnose;
  json report;
  report["check"] = to_string(d.check);
  switch (d.check) {
    case DiagnosticCheck::adjoint:
      report["states"] = d.states;
      report["trials"] = d.trials;
      report["max_residual"] = max_adjoint_residual(d.states, d.trials, cfg.seed);
      break;
    case DiagnosticCheck::gamma: {
      const GridDensity grid(cfg.grid.lo, cfg.grid.hi, cfg.grid.n_cells);
      const GridGenerator L = GridGenerator::ou(grid, 1.0);
      const std::vector<double> x = grid.centers();
      std::vector<double> x2(x.size()), sx(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        x2[i] = x[i] * x[i];
        sx[i] = std::sin(x[i]);
      }
      const std::vector<double> g1 = gamma_operator(x, x, L), g21 = gamma2_operator(x, L);
      const std::vector<double> gq = gamma_operator(x2, x2, L), g2q = gamma2_operator(x2, L);
      const std::vector<double> gs = gamma_operator(sx, sx, L);
      double e_gamma = 0.0, e_gamma2 = 0.0, be_margin = INFINITY, e_grad = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isfinite(g1[i])) e_gamma = std::max(e_gamma, std::abs(g1[i] - 1.0));
        if (std::isfinite(g21[i])) e_gamma2 = std::max(e_gamma2, std::abs(g21[i] - 1.0));
        if (std::isfinite(g2q[i])) be_margin = std::min(be_margin, g2q[i] - gq[i]);
        if (std::isfinite(gs[i])) e_grad = std::max(e_grad, std::abs(gs[i] - std::cos(x[i]) * std::cos(x[i])));
      }
      report["alpha"] = 1.0;
      report["dx"] = grid.dx();
      report["max_abs_gamma_x_minus_1"] = e_gamma;
      report["max_abs_gamma2_x_minus_1"] = e_gamma2;
      report["min_gamma2_minus_gamma_x2"] = be_margin;
      report["max_abs_gamma_sin_minus_grad_sq"] = e_grad;
      break;
    }
    case DiagnosticCheck::variance_decay: {
      json rows = json::array();
      for (double t : {0.5, 1.0}) {
        const VarianceDecayReport r = mc_variance_decay(1.0, t, d.particles, d.inner_paths, d.ula_step, cfg.seed);
        rows.push_back({{"t", t}, {"estimate", r.estimate}, {"exact", r.exact}, {"relative_error", r.relative_error}});
      }
      report["alpha"] = 1.0;
      report["particles"] = d.particles;
      report["inner_paths"] = d.inner_paths;
      report["ula_step"] = d.ula_step;
      report["results"] = rows;
      break;
    }
    case DiagnosticCheck::chi2: {
      const GridDensity pi = GridDensity::gaussian(-8.0, 8.0, 1024, 0.0, 1.0);
      auto relative = [&](const std::function<double(double)>& fn) {
        GridDensity r(pi.lo, pi.hi, pi.n_cells);
        for (std::size_t i = 0; i < r.n_cells; ++i) r.values[i] = fn(r.center(i));
        return r;
      };
      const GridDensity flat = relative([](double) { return 1.0; });
      const GridDensity bump = relative([](double x) { return 1.0 + 0.1 * x * std::exp(-x * x); });
      const double sigma = std::numbers::sqrt2;
      const Chi2Report c1 = chi2_dissipation_residual(flat, [](double) { return 0.0; }, pi, sigma);
      const Chi2Report c2 = chi2_dissipation_residual(bump, [](double) { return 0.0; }, pi, sigma);
      const Chi2Report c3 = chi2_dissipation_residual(bump, [](double x) { return -x * x; }, pi, sigma);
      json rows = json::array();
      const std::pair<const char*, Chi2Report> cases[] = {{"rho=1", c1}, {"g=0", c2}, {"g=-x^2", c3}};
      for (const auto& [name, c] : cases) {
        rows.push_back({{"case", name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"residual", c.residual}});
      }
      report["results"] = rows;
      break;
    }
  }
  out.write_json("diagnose_" + std::string(to_string(d.check)) + ".json", report);
  return report;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  OutputDir out(cfg.output_dir);
  json details;
  switch (cfg.experiment) {
    case Experiment::sample: details = run_sample(cfg, out); break;
    case Experiment::oracle: details = run_oracle(cfg, out); break;
    case Experiment::jump_equivalence: details = run_equivalence(cfg, out); break;
    case Experiment::geodesic: details = run_geodesic(cfg, out); break;
    case Experiment::diagnostics: details = run_diagnostics(cfg, out); break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json summary;
  summary["experiment"] = to_string(cfg.experiment);
  summary["version"] = version();
  summary["seed"] = cfg.seed;
  summary["config"] = cfg.source;
  summary["effective"] = {{"seed", cfg.seed}, {"particles", cfg.particles}};
  summary["results"] = details;
  summary["wall_time_s"] = wall;
  out.write_json("summary.json", summary);
  return ExperimentResult{out.files, summary};
}

}  // namespace wfr
