#include "pspin/sde.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

#include "pspin/coeffs.hpp"
#include "pspin/error.hpp"
#include "pspin/meanfield.hpp"
#include "pspin/rng.hpp"

namespace pspin {

const char* to_string(SdeMode m) noexcept { return m == SdeMode::ball ? "ball" : "sphere"; }

void SdeConfig::validate() const {
  if (!std::isfinite(dt) || dt < 0.0) {
    throw InvalidArgument("dt", "must be finite and >= 0 (0 selects the default)");
  }
  if (!std::isfinite(t_final) || t_final <= 0.0) {
    throw InvalidArgument("t_final", "must be positive");
  }
  if (n_output_times < 2) {
    throw InvalidArgument("n_output_times", "must be >= 2");
  }
  if (n_traj < 1) {
    throw InvalidArgument("n_traj", "must be >= 1");
  }
  if (!(pole_epsilon >= kPoleEpsilon && pole_epsilon < 0.5)) {
    throw InvalidArgument("pole_epsilon", "must lie in [1e-9, 0.5)");
  }
  if (threads < 0) {
    throw InvalidArgument("threads", "must be >= 0");
  }
}

double SdeConfig::step_for(const ModelParams& params) const noexcept {
  return dt > 0.0 ? dt : 1e-3 / params.max_rate();
}

namespace {

Mat3 noise_matrix(const Mat3& D, int N, bool clip) {
  if (!clip) {
    return factor_diffusion(D, N);
  }
  const Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (D + D.transpose()));
  const Vec3 scale = (es.eigenvalues().cwiseMax(0.0) / N).cwiseSqrt();
  return es.eigenvectors() * scale.asDiagonal();
}

double checked_variance(double lambda, bool clip, const char* what) {
  if (lambda < -kPsdTolerance && !clip) {
    throw NotPositiveSemidefinite(std::string("negative diffusion eigenvalue ") + what, lambda);
  }
  return std::max(lambda, 0.0);
}

// Maps an (eta, phi, r) triple back into the admissible chart domain.
SphericalPoint normalize(double eta, double phi, double r, double eps) {
  if (r < 0.0) {
    r = -r;
    eta = -eta;
    phi += std::numbers::pi;
  }
  r = std::clamp(r, kRadiusEpsilon, 1.0);
  // a step through a pole comes out on the opposite meridian
  if (eta > 1.0) {
    eta = 2.0 - eta;
    phi += std::numbers::pi;
  } else if (eta < -1.0) {
    eta = -2.0 - eta;
    phi += std::numbers::pi;
  }
  eta = std::clamp(eta, -1.0 + eps, 1.0 - eps);
  return {eta, wrap_angle(phi), r};
}

double cartesian_zone(const ModelParams& p, double dt) {
  return std::clamp(10.0 * dt * p.max_rate(), 0.1, 0.5);
}

// Euler-Maruyama in Cartesian coordinates, used where the spherical chart is
// singular or stiff. Eigenvalues of D come out ascending, so the (radial)
// null direction on the sphere receives xi[2], which is zero in sphere mode.
SphericalPoint cartesian_step(const ModelParams& p, const SphericalPoint& s, double dt,
                              const Vec3& xi, const StepOptions& opt) {
  const BlochVector r = to_cartesian(s);
  const DriftDiffusion dd = drift_diffusion_cartesian(p, r);
  const Mat3 S = noise_matrix(dd.diffusion, p.N, opt.clip_negative);
  Vec3 next = r.vec() + dd.drift * dt + S * Vec3(xi[2], xi[0], xi[1]) * std::sqrt(dt);
  const double norm = next.norm();
  if (opt.mode == SdeMode::sphere || norm > 1.0) {
    next /= norm;
  }
  const SphericalChart chart = to_spherical(BlochVector::from(next));
  return normalize(chart.point.eta, chart.point.phi,
                   opt.mode == SdeMode::sphere ? 1.0 : chart.point.r, opt.pole_epsilon);
}

}  // namespace

SphericalPoint sde_step(const ModelParams& p, const SphericalPoint& s, double dt, const Vec3& xi,
                        const StepOptions& opt) {
  const double sqdt = std::sqrt(dt);
  const double zone = cartesian_zone(p, dt);
  SphericalPoint out;
  if (std::sqrt(std::max(0.0, 1.0 - s.eta * s.eta)) < zone ||
      (opt.mode == SdeMode::ball && s.r < zone)) {
    out = cartesian_step(p, s, dt, xi, opt);
  } else if (opt.mode == SdeMode::sphere) {
    const DriftDiffusion dd = drift_diffusion_spherical(p, {s.eta, s.phi, 1.0});
    const double l1 = checked_variance(dd.diffusion(0, 0), opt.clip_negative, "lambda1");
    const double l2 = checked_variance(dd.diffusion(1, 1), opt.clip_negative, "lambda2");
    const double eta = s.eta + dd.drift[0] * dt + std::sqrt(l1 / p.N) * sqdt * xi[0];
    const double phi = s.phi + dd.drift[1] * dt + std::sqrt(l2 / p.N) * sqdt * xi[1];
    out = normalize(eta, phi, 1.0, opt.pole_epsilon);
  } else {
    const DriftDiffusion dd = drift_diffusion_spherical(p, s);
    const Mat3 S = noise_matrix(dd.diffusion, p.N, opt.clip_negative);
    const Vec3 next = Vec3(s.eta, s.phi, s.r) + dd.drift * dt + S * xi * sqdt;
    out = normalize(next[0], next[1], next[2], opt.pole_epsilon);
  }
  if (!std::isfinite(out.eta) || !std::isfinite(out.phi) || !std::isfinite(out.r)) {
    throw IntegrationError("SDE state became non-finite");
  }
  return out;
}

SphericalPoint initial_point(const ModelParams& p, const BlochVector& r0, SdeMode mode,
                             double eps) {
  const BlochVector r = admissible(r0);
  if (mode == SdeMode::sphere && std::abs(r.norm() - 1.0) > kBallTolerance) {
    throw InvalidArgument("initial", "sphere mode needs |r| = 1");
  }
  const SphericalChart chart = to_spherical(r);
  SphericalPoint pt = chart.point;
  if (chart.degenerate && pt.r > 0.0) {
    const Vec3 n = r.vec().normalized();
    const Vec3 a = drift_diffusion_cartesian(p, r).drift;
    const Vec3 t = a - a.dot(n) * n;
    if (t.norm() > 0.0) {
      pt.phi = wrap_angle(std::atan2(t.y(), t.x()));
    }
  }
  return normalize(pt.eta, pt.phi, mode == SdeMode::sphere ? 1.0 : pt.r, eps);
}

void check_sampling_allowed(const ModelParams& p, const SdeConfig& c) {
  if (c.mode == SdeMode::sphere && !p.collective_only()) {
    throw InvalidArgument("mode", "sphere mode requires gamma_plus = gamma_minus = gamma_z = 0");
  }
  const Region region = c.mode == SdeMode::sphere ? Region::sphere : Region::ball;
  if (c.force || fokker_planck_condition(p, region)) {
    return;
  }
  std::ostringstream msg;
  if (region == Region::sphere) {
    msg << "Fokker-Planck condition violated on the sphere: kappa_plus + kappa_minus = "
        << p.kappa_plus + p.kappa_minus << " > 2 kappa_z = " << 2.0 * p.kappa_z
        << " and the phi diffusion turns negative; pass --force to sample anyway";
  } else {
    msg << "Fokker-Planck condition violated in the ball: kappa_plus = " << p.kappa_plus
        << " differs from kappa_minus = " << p.kappa_minus
        << "; pass --force to sample anyway";
  }
  throw ConditionViolation(msg.str());
}

Ensemble run_ensemble(const ModelParams& p, const BlochVector& r0, const SdeConfig& c) {
  p.validate();
  c.validate();
  const SphericalPoint start = initial_point(p, r0, c.mode, c.pole_epsilon);
  const std::vector<SphericalPoint> initial(c.n_traj, start);
  return run_ensemble(p, initial, c);
}

Ensemble run_ensemble(const ModelParams& p, std::span<const SphericalPoint> initial,
                      const SdeConfig& c) {
  p.validate();
  c.validate();
  if (initial.size() != static_cast<std::size_t>(c.n_traj)) {
    throw InvalidArgument("initial", "sample count must equal n_traj");
  }
  check_sampling_allowed(p, c);

  Ensemble ens;
  ens.params = p;
  ens.config = c;
  ens.dt = c.step_for(p);
  const Region region = c.mode == SdeMode::sphere ? Region::sphere : Region::ball;
  ens.physical = fokker_planck_condition(p, region);
  ens.times = uniform_grid(c.t_final, c.n_output_times);
  ens.samples.assign(ens.times.size(), std::vector<SphericalPoint>(initial.size()));

  const StepOptions opt{c.mode, c.pole_epsilon, c.force};
  std::vector<long> steps_per_interval(ens.times.size(), 0);
  for (std::size_t k = 1; k < ens.times.size(); ++k) {
    const double span = ens.times[k] - ens.times[k - 1];
    steps_per_interval[k] = std::max(1L, static_cast<long>(std::ceil(span / ens.dt - 1e-9)));
  }

  const auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const NormalStream rng(c.seed, static_cast<std::uint32_t>(i));
      const SphericalPoint& s0 = initial[i];
      if (!(std::abs(s0.eta) <= 1.0) || !(s0.r >= 0.0 && s0.r <= 1.0)) {
        throw InvalidArgument("initial", "sample outside the chart domain");
      }
      SphericalPoint s =
          normalize(s0.eta, s0.phi, c.mode == SdeMode::sphere ? 1.0 : s0.r, c.pole_epsilon);
      ens.samples[0][i] = s;
      std::uint64_t step = 0;
      for (std::size_t k = 1; k < ens.times.size(); ++k) {
        const long n = steps_per_interval[k];
        const double h = (ens.times[k] - ens.times[k - 1]) / static_cast<double>(n);
        for (long m = 0; m < n; ++m, ++step) {
          const auto a = rng.pair(step, 0);
          Vec3 xi(a[0], a[1], 0.0);
          if (c.mode == SdeMode::ball) {
            xi[2] = rng.pair(step, 1)[0];
          }
          s = sde_step(p, s, h, xi, opt);
        }
        ens.samples[k][i] = s;
      }
    }
  };

  const std::size_t n = initial.size();
  std::size_t workers = c.threads > 0 ? static_cast<std::size_t>(c.threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    run_range(0, n);
    return ens;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = n * w / workers, end = n * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return ens;
}

ObservableSeries ensemble_observables(const Ensemble& ens, int N) {
  if (N < 1) {
    throw InvalidArgument("N", "must be >= 1");
  }
  ObservableSeries out;
  out.times = ens.times;
  const double dn = N;
  const double a = dn * (dn - 1.0) / 4.0;
  const double b = dn * dn / 4.0;
  for (const auto& slice : ens.samples) {
    const double n = static_cast<double>(slice.size());
    std::vector<Vec3> pts;
    pts.reserve(slice.size());
    Vec3 m1 = Vec3::Zero(), m2 = Vec3::Zero();
    for (const SphericalPoint& s : slice) {
      const Vec3 v = to_cartesian(s).vec();
      pts.push_back(v);
      m1 += v;
      m2 += v.cwiseProduct(v);
    }
    m1 /= n;
    m2 /= n;
    // centered second pass for the sample covariance of (r, r^2)
    Vec3 c11 = Vec3::Zero(), c22 = Vec3::Zero(), c12 = Vec3::Zero();
    for (const Vec3& v : pts) {
      const Vec3 d1 = v - m1;
      const Vec3 d2 = v.cwiseProduct(v) - m2;
      c11 += d1.cwiseProduct(d1);
      c22 += d2.cwiseProduct(d2);
      c12 += d1.cwiseProduct(d2);
    }
    const double denom = n > 1.0 ? (n - 1.0) * n : 1.0;
    c11 /= denom;
    c22 /= denom;
    c12 /= denom;

    Vec3 mean, mean_se, var, var_se;
    for (int k = 0; k < 3; ++k) {
      mean[k] = 0.5 * dn * m1[k];
      mean_se[k] = 0.5 * dn * std::sqrt(c11[k]);
      var[k] = a * m2[k] + dn / 4.0 - b * m1[k] * m1[k];
      const double g1 = -2.0 * b * m1[k];
      const double g2 = a;
      var_se[k] = std::sqrt(std::max(0.0, g1 * g1 * c11[k] + g2 * g2 * c22[k] +
                                              2.0 * g1 * g2 * c12[k]));
    }
    out.mean.push_back(mean);
    out.mean_se.push_back(mean_se);
    out.variance.push_back(var);
    out.variance_se.push_back(var_se);
  }
  return out;
}

SphereDensity density_estimate(std::span<const SphericalPoint> samples, int n_eta, int n_phi) {
  if (n_eta < 1) {
    throw InvalidArgument("n_eta", "must be >= 1");
  }
  if (n_phi < 1) {
    throw InvalidArgument("n_phi", "must be >= 1");
  }
  if (samples.empty()) {
    throw InvalidArgument("samples", "density of an empty sample set");
  }
  SphereDensity d;
  d.n_eta = n_eta;
  d.n_phi = n_phi;
  std::vector<long> counts(static_cast<std::size_t>(n_eta) * n_phi, 0);
  Vec3 sum = Vec3::Zero();
  for (const SphericalPoint& s : samples) {
    const double eta = std::clamp(s.eta, -1.0, 1.0);
    const double phi = wrap_angle(s.phi);
    const int i = std::min(n_eta - 1, static_cast<int>((eta + 1.0) / 2.0 * n_eta));
    const int j = std::min(n_phi - 1, static_cast<int>(phi / (2.0 * std::numbers::pi) * n_phi));
    ++counts[static_cast<std::size_t>(i) * n_phi + j];
    sum += to_cartesian({eta, phi, 1.0}).vec();
  }
  const double n = static_cast<double>(samples.size());
  d.values.reserve(counts.size());
  for (long c : counts) {
    d.values.push_back(static_cast<double>(c) / n);
  }
  d.mean_direction = sum / n;
  d.resultant_length = d.mean_direction.norm();
  d.spread = 1.0 - d.resultant_length;
  return d;
}

SphereDensity density_estimate(const Ensemble& ens, std::size_t time_index, int n_eta, int n_phi) {
  if (time_index >= ens.samples.size()) {
    throw InvalidArgument("time_index", "out of range");
  }
  return density_estimate(std::span<const SphericalPoint>(ens.samples[time_index]), n_eta, n_phi);
}

}  // namespace pspin
