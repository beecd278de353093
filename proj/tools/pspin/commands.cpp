#include "pspin/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "pspin/analysis.hpp"
#include "pspin/coeffs.hpp"
#include "pspin/meanfield.hpp"
#include "pspin/output.hpp"
#include "pspin/version.hpp"

namespace pspin::cli {

using ojson = nlohmann::ordered_json;

namespace {

class Writer {
 public:
  Writer(Command cmd, const RunConfig& cfg) : cmd_(cmd), cfg_(cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output.directory, ec);
    if (ec) {
      throw IoError("cannot create output directory " + cfg.output.directory.string() + ": " +
                    ec.message());
    }
    summary_["artifact"] = {{"name", "pspin"}, {"version", kVersion}};
    summary_["command"] = to_string(cmd);
    summary_["parameters"] = cfg.echo();
  }

  std::vector<std::string> header() const {
    return {std::string("pspin ") + kVersion + " " + to_string(cmd_),
            "units: rates in " + cfg_.rate_unit + "; t in 1/(" + cfg_.rate_unit + ")",
            "parameters: " + cfg_.echo().dump()};
  }

  void csv(const std::string& name, const CsvTable& table) {
    const auto path = cfg_.output.directory / name;
    write_csv(path, header(), table);
    result_.files.push_back(path);
  }

  void svg(const std::string& name, const std::string& content) {
    if (!cfg_.output.svg) {
      return;
    }
    const auto path = cfg_.output.directory / name;
    write_text(path, content);
    result_.files.push_back(path);
  }

  std::string description() const {
    return std::string("pspin ") + kVersion + " " + to_string(cmd_) + " " + cfg_.echo().dump();
  }

  ojson& summary() { return summary_; }

  CommandResult finish(bool passed = true) {
    result_.passed = passed;
    result_.summary = summary_;
    if (cfg_.output.json) {
      std::string stem = to_string(cmd_);
      std::replace(stem.begin(), stem.end(), '-', '_');
      const auto path = cfg_.output.directory / (stem + ".json");
      write_text(path, summary_.dump(2) + "\n");
      result_.files.push_back(path);
    }
    return std::move(result_);
  }

 private:
  Command cmd_;
  const RunConfig& cfg_;
  ojson summary_;
  CommandResult result_;
};

ojson vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

ojson mat_json(const Mat3& m) {
  ojson out = ojson::array();
  for (int i = 0; i < 3; ++i) out.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return out;
}

ojson conditions(const ModelParams& p) {
  return {{"kappa_plus_plus_kappa_minus", p.kappa_plus + p.kappa_minus},
          {"two_kappa_z", 2.0 * p.kappa_z},
          {"sufficient_sphere_condition", sphere_sufficient_condition(p)},
          {"fokker_planck_sphere", fokker_planck_condition(p, Region::sphere)},
          {"fokker_planck_ball", fokker_planck_condition(p, Region::ball)}};
}

BlochVector coherent_start(const RunConfig& cfg) {
  if (cfg.initial.type != InitialSection::Type::coherent) {
    throw InvalidArgument("initial.type", "this command needs a coherent initial state");
  }
  return cfg.initial.r;
}

std::vector<double> column(const std::vector<Vec3>& v, int k, double scale = 1.0) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const Vec3& e : v) out.push_back(e[k] * scale);
  return out;
}

Ensemble sample_ensemble(const RunConfig& cfg, const ModelParams& p) {
  SdeConfig sc = cfg.sde_config();
  if (cfg.initial.type == InitialSection::Type::samples) {
    const auto initial = load_samples(cfg.initial.path);
    if (sc.n_traj == 0) {
      sc.n_traj = static_cast<int>(initial.size());
    }
    return run_ensemble(p, initial, sc);
  }
  return run_ensemble(p, cfg.initial.r, sc);
}

DensityMatrix exact_initial(const RunConfig& cfg, Basis basis) {
  const BlochVector r = coherent_start(cfg);
  return basis == Basis::collective ? dicke_coherent_state(r, cfg.model.N)
                                    : coherent_state(r, cfg.model.N);
}

EvolutionResult run_exact(const RunConfig& cfg, const std::vector<double>& grid) {
  const Basis basis = cfg.exact_basis();
  EvolveOptions opt;
  opt.dt = cfg.sim.dt;
  return evolve(cfg.model, exact_initial(cfg, basis), grid, basis, opt);
}

const std::vector<std::string> kSpin = {"Jx", "Jy", "Jz"};

CommandResult cmd_coeffs(const RunConfig& cfg) {
  Writer w(Command::coeffs, cfg);
  const ModelParams& p = cfg.model;
  const BlochVector r = admissible(coherent_start(cfg));
  const DriftDiffusion cart = drift_diffusion_cartesian(p, r);
  ojson& s = w.summary();
  s["point"] = {r.x, r.y, r.z};
  s["cartesian"] = {{"drift", vec_json(cart.drift)}, {"diffusion", mat_json(cart.diffusion)}};
  const SphericalChart chart = to_spherical(r);
  if (!chart.degenerate) {
    const DriftDiffusion sph = drift_diffusion_spherical(p, chart.point);
    s["spherical"] = {{"eta", chart.point.eta},
                      {"phi", chart.point.phi},
                      {"r", chart.point.r},
                      {"drift", vec_json(sph.drift)},
                      {"diffusion", mat_json(sph.diffusion)}};
  } else {
    s["spherical"] = nullptr;
  }
  s["conditions"] = conditions(p);
  const Region region = p.collective_only() ? Region::sphere : Region::ball;
  const PositivityReport scan = scan_positivity(p, region, 1000);
  s["scan"] = {{"region", region == Region::sphere ? "sphere" : "ball"},
               {"resolution", scan.resolution},
               {"min_eigenvalue", scan.min_eigenvalue},
               {"argmin", {scan.argmin.eta, scan.argmin.phi, scan.argmin.r}},
               {"condition_holds", scan.condition_holds}};

  CsvTable table{{"eta", "lambda1", "lambda2"}, {}};
  std::vector<double> etas;
  std::vector<PlotSeries> plot{{"lambda1", {}}, {"lambda2", {}}};
  constexpr int kGrid = 200;
  for (int i = 0; i < kGrid; ++i) {
    const double eta = -1.0 + (2.0 * i + 1.0) / kGrid;
    const SphereEigen e = sphere_eigenvalues(p, eta);
    table.add(std::vector<double>{eta, e.lambda1, e.lambda2});
    etas.push_back(eta);
    plot[0].y.push_back(e.lambda1);
    plot[1].y.push_back(e.lambda2);
  }
  w.csv("coeffs.csv", table);
  w.svg("coeffs.svg", svg_line_plot("sphere diffusion eigenvalues", "eta", etas, plot,
                                    w.description()));
  return w.finish();
}

CommandResult cmd_meanfield(const RunConfig& cfg) {
  Writer w(Command::meanfield, cfg);
  const auto grid = uniform_grid(cfg.sim.t_final, cfg.sim.n_output_times);
  IntegratorOptions opt;
  opt.dt = cfg.sim.dt;
  opt.adaptive = cfg.sim.adaptive;
  const MeanFieldTrajectory traj = integrate_meanfield(cfg.model, coherent_start(cfg), grid, opt);

  CsvTable table{{"t", "x", "y", "z", "norm"}, {}};
  std::vector<PlotSeries> plot{{"x", {}}, {"y", {}}, {"z", {}}, {"|r|", {}}};
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const BlochVector& r = traj.states[k];
    table.add(std::vector<double>{traj.times[k], r.x, r.y, r.z, r.norm()});
    plot[0].y.push_back(r.x);
    plot[1].y.push_back(r.y);
    plot[2].y.push_back(r.z);
    plot[3].y.push_back(r.norm());
  }
  w.csv("meanfield.csv", table);
  w.svg("meanfield.svg", svg_line_plot("mean-field trajectory", "t", traj.times, plot,
                                       w.description()));
  const BlochVector& end = traj.states.back();
  w.summary()["integrator"] = {{"method", traj.method}, {"step", traj.step}};
  w.summary()["final"] = {end.x, end.y, end.z};

  if (cfg.meanfield.portrait_seeds > 0) {
    const auto seeds = fibonacci_seeds(cfg.meanfield.portrait_seeds);
    const auto portrait = phase_portrait(cfg.model, seeds, cfg.sim.t_final,
                                         cfg.sim.n_output_times, opt);
    CsvTable pt{{"t", "seed", "x", "y", "z"}, {}};
    ojson ends = ojson::array();
    for (std::size_t s = 0; s < portrait.size(); ++s) {
      for (std::size_t k = 0; k < portrait[s].times.size(); ++k) {
        const BlochVector& r = portrait[s].states[k];
        pt.add(std::vector<double>{portrait[s].times[k], static_cast<double>(s), r.x, r.y, r.z});
      }
      const BlochVector& e = portrait[s].states.back();
      ends.push_back({e.x, e.y, e.z});
    }
    w.csv("meanfield_portrait.csv", pt);
    w.summary()["portrait_endpoints"] = ends;
  }
  return w.finish();
}

CommandResult cmd_fixed_points(const RunConfig& cfg) {
  Writer w(Command::fixed_points, cfg);
  const auto roots = find_fixed_points(cfg.model, cfg.meanfield.n_seeds);
  CsvTable table{{"x", "y", "z", "residual", "max_real_eigenvalue", "classification", "manifold"},
                 {}};
  ojson list = ojson::array();
  for (const FixedPointResult& f : roots) {
    double max_re = -std::numeric_limits<double>::infinity();
    ojson eig = ojson::array();
    for (const auto& e : f.eigenvalues) {
      max_re = std::max(max_re, e.real());
      eig.push_back({e.real(), e.imag()});
    }
    table.add({format_number(f.location.x), format_number(f.location.y),
               format_number(f.location.z), format_number(f.residual), format_number(max_re),
               to_string(f.classification), to_string(f.manifold)});
    list.push_back({{"location", {f.location.x, f.location.y, f.location.z}},
                    {"residual", f.residual},
                    {"eigenvalues", eig},
                    {"jacobian", mat_json(f.jacobian)},
                    {"classification", to_string(f.classification)},
                    {"manifold", to_string(f.manifold)}});
  }
  w.csv("fixed_points.csv", table);
  w.summary()["fixed_points"] = list;
  return w.finish();
}

CsvTable observable_table(const ObservableSeries& obs) {
  CsvTable table{{"t"}, {}};
  for (const char* prefix : {"", "se_", "var_", "se_var_"}) {
    for (const auto& k : kSpin) table.columns.push_back(prefix + k);
  }
  for (std::size_t t = 0; t < obs.times.size(); ++t) {
    std::vector<double> row{obs.times[t]};
    for (const auto* series : {&obs.mean, &obs.mean_se, &obs.variance, &obs.variance_se}) {
      for (int k = 0; k < 3; ++k) row.push_back((*series)[t][k]);
    }
    table.add(row);
  }
  return table;
}

CommandResult cmd_sample(const RunConfig& cfg) {
  Writer w(Command::sample, cfg);
  const Ensemble ens = sample_ensemble(cfg, cfg.model);
  const ObservableSeries obs = ensemble_observables(ens, cfg.model.N);
  w.csv("sample.csv", observable_table(obs));
  CsvTable final_samples{{"eta", "phi", "r"}, {}};
  for (const SphericalPoint& s : ens.samples.back()) {
    final_samples.add(std::vector<double>{s.eta, s.phi, s.r});
  }
  w.csv("sample_final.csv", final_samples);
  const double j = 0.5 * cfg.model.N;
  std::vector<PlotSeries> plot;
  for (int k = 0; k < 3; ++k) plot.push_back({"<" + kSpin[k] + ">/j", column(obs.mean, k, 1.0 / j)});
  w.svg("sample.svg", svg_line_plot("SDE ensemble", "t", obs.times, plot, w.description()));
  ojson& s = w.summary();
  s["seed"] = cfg.sim.seed;
  s["n_traj"] = ens.n_traj();
  s["dt"] = ens.dt;
  s["mode"] = to_string(ens.config.mode);
  s["physical"] = ens.physical;
  s["conditions"] = conditions(cfg.model);
  s["final_mean"] = vec_json(obs.mean.back());
  s["final_variance"] = vec_json(obs.variance.back());
  return w.finish();
}

CommandResult cmd_exact(const RunConfig& cfg) {
  Writer w(Command::exact, cfg);
  const auto grid = uniform_grid(cfg.sim.t_final, cfg.sim.n_output_times);
  const EvolutionResult res = run_exact(cfg, grid);
  CsvTable table{{"t", "Jx", "Jy", "Jz", "var_Jx", "var_Jy", "var_Jz"}, {}};
  for (std::size_t t = 0; t < res.times.size(); ++t) {
    table.add(std::vector<double>{res.times[t], res.mean[t][0], res.mean[t][1], res.mean[t][2],
                                  res.variance[t][0], res.variance[t][1], res.variance[t][2]});
  }
  w.csv("exact.csv", table);
  const double j = 0.5 * cfg.model.N;
  std::vector<PlotSeries> plot;
  for (int k = 0; k < 3; ++k) plot.push_back({"<" + kSpin[k] + ">/j", column(res.mean, k, 1.0 / j)});
  w.svg("exact.svg", svg_line_plot("master equation", "t", res.times, plot, w.description()));
  ojson& s = w.summary();
  s["basis"] = to_string(cfg.exact_basis());
  s["dt"] = res.dt;
  s["max_trace_drift"] = res.max_trace_drift;
  s["final_mean"] = vec_json(res.mean.back());
  s["final_variance"] = vec_json(res.variance.back());
  return w.finish();
}

CommandResult cmd_compare(const RunConfig& cfg) {
  Writer w(Command::compare, cfg);
  const BlochVector r0 = coherent_start(cfg);
  const Ensemble ens = run_ensemble(cfg.model, r0, cfg.sde_config());
  const ObservableSeries obs = ensemble_observables(ens, cfg.model.N);
  const EvolutionResult ex = run_exact(cfg, ens.times);
  const double j = 0.5 * cfg.model.N;
  constexpr double kSigma = 3.0;
  const double floor = 1e-6 * j;
  const Agreement a = compare_to_reference(ex.mean, obs, kSigma, floor);

  CsvTable table{{"t"}, {}};
  for (const char* prefix : {"exact_", "sde_", "se_", "z_"}) {
    for (const auto& k : kSpin) table.columns.push_back(prefix + k);
  }
  for (std::size_t t = 0; t < ens.times.size(); ++t) {
    std::vector<double> row{ens.times[t]};
    for (int k = 0; k < 3; ++k) row.push_back(ex.mean[t][k]);
    for (int k = 0; k < 3; ++k) row.push_back(obs.mean[t][k]);
    for (int k = 0; k < 3; ++k) row.push_back(obs.mean_se[t][k]);
    for (int k = 0; k < 3; ++k) {
      row.push_back(std::abs(obs.mean[t][k] - ex.mean[t][k]) /
                    (obs.mean_se[t][k] + floor / kSigma));
    }
    table.add(row);
  }
  w.csv("compare.csv", table);
  std::vector<PlotSeries> plot;
  for (int k = 0; k < 3; ++k) {
    plot.push_back({"exact " + kSpin[k] + "/j", column(ex.mean, k, 1.0 / j)});
    plot.push_back({"SDE " + kSpin[k] + "/j", column(obs.mean, k, 1.0 / j)});
  }
  w.svg("compare.svg", svg_line_plot("master equation vs SDE", "t", ens.times, plot,
                                     w.description()));
  ojson& s = w.summary();
  s["seed"] = cfg.sim.seed;
  s["n_traj"] = ens.n_traj();
  s["sde_dt"] = ens.dt;
  s["exact_dt"] = ex.dt;
  s["basis"] = to_string(cfg.exact_basis());
  s["sigma"] = kSigma;
  s["abs_floor"] = floor;
  ojson dev;
  for (int k = 0; k < 3; ++k) {
    dev[kSpin[k]] = {{"max_deviation_in_se", a.max_z[k]},
                     {"max_abs_deviation", a.max_abs[k]},
                     {"times_outside", a.violations[k]},
                     {"within", a.ok(k)}};
  }
  s["deviation"] = dev;
  return w.finish();
}

CommandResult cmd_verify(const RunConfig& cfg) {
  Writer w(Command::verify, cfg);
  std::mt19937_64 rng(cfg.sim.seed);
  std::uniform_real_distribution<double> rate(0.0, 1.0), field(-1.0, 1.0);
  std::uniform_int_distribution<int> size(1, cfg.verify.max_N);
  CsvTable table{{"index", "N", "x", "y", "z", "residual"}, {}};
  double worst = 0.0;
  int index = 0;
  for (int i = 0; i < cfg.verify.n_params; ++i) {
    ModelParams p;
    p.B = Vec3(field(rng), field(rng), field(rng));
    p.kappa_plus = rate(rng);
    p.kappa_minus = rate(rng);
    p.kappa_z = rate(rng);
    p.gamma_plus = rate(rng);
    p.gamma_minus = rate(rng);
    p.gamma_z = rate(rng);
    p.N = size(rng);
    for (int k = 0; k < cfg.verify.n_points; ++k) {
      Vec3 v;
      do {
        v = Vec3(field(rng), field(rng), field(rng));
      } while (v.norm() >= 0.95);
      const double res = verify_coefficients(p, BlochVector::from(v));
      worst = std::max(worst, res);
      table.add(std::vector<double>{static_cast<double>(index++), static_cast<double>(p.N),
                                    v.x(), v.y(), v.z(), res});
    }
  }
  w.csv("verify.csv", table);
  const bool passed = worst <= cfg.verify.tolerance;
  w.summary()["seed"] = cfg.sim.seed;
  w.summary()["evaluations"] = index;
  w.summary()["max_residual"] = worst;
  w.summary()["tolerance"] = cfg.verify.tolerance;
  w.summary()["passed"] = passed;
  return w.finish(passed);
}

CommandResult cmd_density(const RunConfig& cfg) {
  Writer w(Command::density, cfg);
  std::vector<int> sizes = cfg.density.N_values;
  if (sizes.empty()) sizes.push_back(cfg.model.N);
  const int ne = cfg.density.n_eta, np = cfg.density.n_phi;
  CsvTable spreads{{"N", "resultant_length", "spread", "mean_x", "mean_y", "mean_z"}, {}};
  ojson list = ojson::array();
  std::vector<double> spread_values;
  for (int n : sizes) {
    ModelParams p = cfg.model;
    p.N = n;
    const Ensemble ens = sample_ensemble(cfg, p);
    const SphereDensity d = density_estimate(ens, ens.samples.size() - 1, ne, np);
    CsvTable grid{{"eta_lo", "eta_hi", "phi_lo", "phi_hi", "value"}, {}};
    for (int i = 0; i < ne; ++i) {
      for (int k = 0; k < np; ++k) {
        grid.add(std::vector<double>{-1.0 + 2.0 * i / ne, -1.0 + 2.0 * (i + 1) / ne,
                                     2.0 * std::numbers::pi * k / np,
                                     2.0 * std::numbers::pi * (k + 1) / np, d.at(i, k)});
      }
    }
    const std::string stem = "density_N" + std::to_string(n);
    w.csv(stem + ".csv", grid);
    w.svg(stem + ".svg", svg_heatmap("P on the sphere, N = " + std::to_string(n), "phi", "eta",
                                     ne, np, d.values, w.description()));
    spreads.add(std::vector<double>{static_cast<double>(n), d.resultant_length, d.spread,
                                    d.mean_direction.x(), d.mean_direction.y(),
                                    d.mean_direction.z()});
    spread_values.push_back(d.spread);
    list.push_back({{"N", n},
                    {"spread", d.spread},
                    {"resultant_length", d.resultant_length},
                    {"mean_direction", vec_json(d.mean_direction)}});
  }
  w.csv("density.csv", spreads);
  bool decreasing = true;
  for (std::size_t k = 1; k < spread_values.size(); ++k) {
    decreasing = decreasing && spread_values[k] < spread_values[k - 1];
  }
  w.summary()["seed"] = cfg.sim.seed;
  w.summary()["t_final"] = cfg.sim.t_final;
  w.summary()["densities"] = list;
  w.summary()["spread_strictly_decreasing"] = decreasing;
  return w.finish();
}

}  // namespace

CommandResult run_command(Command command, const RunConfig& cfg) {
  switch (command) {
    case Command::coeffs: return cmd_coeffs(cfg);
    case Command::meanfield: return cmd_meanfield(cfg);
    case Command::fixed_points: return cmd_fixed_points(cfg);
    case Command::sample: return cmd_sample(cfg);
    case Command::exact: return cmd_exact(cfg);
    case Command::compare: return cmd_compare(cfg);
    case Command::verify: return cmd_verify(cfg);
    case Command::density: return cmd_density(cfg);
  }
  throw InvalidArgument("command", "unknown command");
}

int execute(Command command, const RunConfig& cfg, std::ostream& err) {
  try {
    const CommandResult res = run_command(command, cfg);
    if (!res.passed) {
      err << "pspin " << to_string(command) << ": check failed, see the JSON summary\n";
      return kExitRuntime;
    }
    return kExitOk;
  } catch (const InvalidArgument& e) {
    err << "pspin: invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConditionViolation& e) {
    err << "pspin: sampling refused: " << e.what() << "\n";
    return kExitCondition;
  } catch (const IoError& e) {
    err << "pspin: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "pspin: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "pspin: " << to_string(command) << " failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace pspin::cli
