#include "pspin/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pspin/error.hpp"

namespace pspin {

Vec3 meanfield_rhs(const ModelParams& p, const BlochVector& r) {
  const double x = r.x, y = r.y, z = r.z;
  const Vec3& B = p.B;
  const double kd = p.kappa_minus - p.kappa_plus;
  const double transverse = kd * z - (p.gamma_minus + p.gamma_plus + p.gamma_z);
  return {B.y() * z - B.z() * y + transverse * x,
          -B.x() * z + B.z() * x + transverse * y,
          B.x() * y - B.y() * x - kd * (x * x + y * y) - 2.0 * p.gamma_minus * (z + 1.0) -
              2.0 * p.gamma_plus * (z - 1.0)};
}

Mat3 meanfield_jacobian(const ModelParams& p, const BlochVector& r) {
  const double x = r.x, y = r.y, z = r.z;
  const Vec3& B = p.B;
  const double kd = p.kappa_minus - p.kappa_plus;
  const double g = p.gamma_minus + p.gamma_plus + p.gamma_z;
  Mat3 J;
  J << kd * z - g, -B.z(), B.y() + kd * x,
       B.z(), kd * z - g, -B.x() + kd * y,
       -B.y() - 2.0 * kd * x, B.x() - 2.0 * kd * y, -2.0 * (p.gamma_minus + p.gamma_plus);
  return J;
}

namespace {

Vec3 rk4_step(const ModelParams& p, const Vec3& v, double h) {
  const auto f = [&p](const Vec3& u) { return meanfield_rhs(p, BlochVector::from(u)); };
  const Vec3 k1 = f(v);
  const Vec3 k2 = f(v + 0.5 * h * k1);
  const Vec3 k3 = f(v + 0.5 * h * k2);
  const Vec3 k4 = f(v + h * k3);
  return v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void require_finite(const Vec3& v, double t) {
  if (!v.allFinite()) {
    throw IntegrationError("mean-field state became non-finite at t = " + std::to_string(t));
  }
}

// Advances v from t over a span of length `span`; `h` carries the current
// adaptive step between calls.
Vec3 advance(const ModelParams& p, Vec3 v, double t, double span, double base_dt,
             const IntegratorOptions& opt, double& h) {
  if (span <= 0.0) {
    return v;
  }
  if (!opt.adaptive) {
    const auto steps = static_cast<long>(std::ceil(span / base_dt - 1e-9));
    const double step = span / static_cast<double>(std::max(1L, steps));
    for (long k = 0; k < std::max(1L, steps); ++k) {
      v = rk4_step(p, v, step);
      require_finite(v, t + (k + 1) * step);
    }
    return v;
  }
  const double min_step = 1e-14 * std::max(1.0, span);
  double done = 0.0;
  while (done < span) {
    h = std::min(h, span - done);
    const Vec3 full = rk4_step(p, v, h);
    const Vec3 half = rk4_step(p, rk4_step(p, v, 0.5 * h), 0.5 * h);
    const double err = (full - half).cwiseAbs().maxCoeff();
    if (!half.allFinite() || err > opt.tolerance) {
      h *= 0.5;
      if (h < min_step) {
        throw IntegrationError("mean-field step size underflow at t = " +
                               std::to_string(t + done));
      }
      continue;
    }
    v = half;
    done += h;
    require_finite(v, t + done);
    if (err < opt.tolerance / 32.0) {
      h = std::min(2.0 * h, base_dt);
    }
  }
  return v;
}

}  // namespace

MeanFieldTrajectory integrate_meanfield(const ModelParams& p, const BlochVector& r0,
                                        std::span<const double> t_grid,
                                        const IntegratorOptions& opt) {
  p.validate();
  const BlochVector start = admissible(r0);
  MeanFieldTrajectory traj;
  traj.step = opt.dt > 0.0 ? opt.dt : 1e-3 / p.max_rate();
  traj.method = opt.adaptive ? "rk4-step-halving" : "rk4";
  if (t_grid.empty()) {
    return traj;
  }
  Vec3 v = start.vec();
  double h = traj.step;
  traj.times.reserve(t_grid.size());
  traj.states.reserve(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (k > 0) {
      const double span = t_grid[k] - t_grid[k - 1];
      if (span < 0.0) {
        throw InvalidArgument("t_grid", "times must be non-decreasing");
      }
      v = advance(p, v, t_grid[k - 1], span, traj.step, opt, h);
    }
    traj.times.push_back(t_grid[k]);
    traj.states.push_back(BlochVector::from(v));
  }
  return traj;
}

const char* to_string(Stability s) noexcept {
  switch (s) {
    case Stability::stable:
      return "stable";
    case Stability::unstable:
      return "unstable";
    case Stability::marginal:
      return "marginal";
  }
  return "unknown";
}

const char* to_string(Manifold m) noexcept {
  return m == Manifold::sphere ? "sphere" : "ball";
}

namespace {

double halton(int index, int base) {
  double f = 1.0, out = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    out += f * (i % base);
  }
  return out;
}

// Orthonormal basis of the plane perpendicular to the unit vector n.
Eigen::Matrix<double, 3, 2> tangent_basis(const Vec3& n) {
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 t1 = n.cross(helper).normalized();
  const Vec3 t2 = n.cross(t1);
  Eigen::Matrix<double, 3, 2> T;
  T.col(0) = t1;
  T.col(1) = t2;
  return T;
}

Stability classify(const std::vector<std::complex<double>>& eig) {
  double max_re = -std::numeric_limits<double>::infinity();
  for (const auto& e : eig) {
    max_re = std::max(max_re, e.real());
  }
  if (max_re > kMarginalThreshold) {
    return Stability::unstable;
  }
  if (max_re < -kMarginalThreshold) {
    return Stability::stable;
  }
  return Stability::marginal;
}

// Residual of the root system; on the sphere the radial constraint is added
// orthogonally to the (tangent) flow.
Vec3 root_function(const ModelParams& p, const Vec3& v, Manifold m) {
  Vec3 F = meanfield_rhs(p, BlochVector::from(v));
  if (m == Manifold::sphere) {
    const double n = v.norm();
    F += (n - 1.0) * v / n;
  }
  return F;
}

Mat3 root_jacobian(const ModelParams& p, const Vec3& v, Manifold m) {
  Mat3 J = meanfield_jacobian(p, BlochVector::from(v));
  if (m == Manifold::sphere) {
    const double n = v.norm();
    const Vec3 u = v / n;
    J += u * u.transpose() + (n - 1.0) / n * (Mat3::Identity() - u * u.transpose());
  }
  return J;
}

bool newton(const ModelParams& p, Vec3& v, Manifold m) {
  constexpr int kMaxIterations = 100;
  double fnorm = root_function(p, v, m).norm();
  for (int it = 0; it < kMaxIterations && fnorm > 1e-13; ++it) {
    const Vec3 F = root_function(p, v, m);
    const Mat3 J = root_jacobian(p, v, m);
    const Vec3 delta = -J.completeOrthogonalDecomposition().solve(F);
    if (!delta.allFinite()) {
      return false;
    }
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      const Vec3 trial = v + t * delta;
      if (m == Manifold::sphere && trial.norm() < 1e-6) {
        continue;
      }
      const double trial_norm = root_function(p, trial, m).norm();
      if (trial_norm < fnorm) {
        v = trial;
        fnorm = trial_norm;
        improved = true;
        break;
      }
    }
    if (!improved) {
      break;
    }
  }
  return fnorm <= kRootTolerance;
}

}  // namespace

FixedPointResult classify_point(const ModelParams& p, const BlochVector& r, Manifold m) {
  FixedPointResult out;
  out.location = r;
  out.manifold = m;
  out.residual = meanfield_rhs(p, r).norm();
  out.jacobian = meanfield_jacobian(p, r);
  if (m == Manifold::sphere) {
    const auto T = tangent_basis(r.vec().normalized());
    const Eigen::Matrix2d M = T.transpose() * out.jacobian * T;
    Eigen::EigenSolver<Eigen::Matrix2d> es(M, false);
    for (int k = 0; k < 2; ++k) {
      out.eigenvalues.push_back(es.eigenvalues()[k]);
    }
  } else {
    Eigen::EigenSolver<Mat3> es(out.jacobian, false);
    for (int k = 0; k < 3; ++k) {
      out.eigenvalues.push_back(es.eigenvalues()[k]);
    }
  }
  out.classification = classify(out.eigenvalues);
  return out;
}

std::vector<FixedPointResult> find_fixed_points(const ModelParams& p, int n_seeds) {
  p.validate();
  if (n_seeds < 1) {
    throw InvalidArgument("n_seeds", "must be >= 1");
  }
  const Manifold m = p.collective_only() ? Manifold::sphere : Manifold::ball;
  std::vector<Vec3> roots;
  int accepted = 0;
  for (int index = 1; accepted < n_seeds && index < 100 * n_seeds + 100; ++index) {
    Vec3 seed(2.0 * halton(index, 2) - 1.0, 2.0 * halton(index, 3) - 1.0,
              2.0 * halton(index, 5) - 1.0);
    if (seed.norm() > 1.0) {
      continue;
    }
    if (m == Manifold::sphere) {
      if (seed.norm() < 1e-3) {
        continue;
      }
      seed.normalize();
    }
    ++accepted;
    Vec3 v = seed;
    if (!newton(p, v, m)) {
      continue;
    }
    if (v.norm() > 1.0 + kBallTolerance) {
      continue;
    }
    const bool duplicate = std::any_of(roots.begin(), roots.end(), [&v](const Vec3& w) {
      return (w - v).norm() < kRootDedupRadius;
    });
    if (!duplicate) {
      roots.push_back(v);
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Vec3& a, const Vec3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  });
  std::vector<FixedPointResult> out;
  out.reserve(roots.size());
  for (const Vec3& v : roots) {
    out.push_back(classify_point(p, BlochVector::from(v), m));
  }
  return out;
}

std::vector<BlochVector> fibonacci_seeds(int n, double radius) {
  std::vector<BlochVector> seeds;
  if (n <= 0) {
    return seeds;
  }
  seeds.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / n;
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * k;
    seeds.push_back({radius * s * std::cos(phi), radius * s * std::sin(phi), radius * z});
  }
  return seeds;
}

std::vector<double> uniform_grid(double t_final, int n) {
  if (n < 2) {
    throw InvalidArgument("n_output_times", "must be >= 2");
  }
  if (!(t_final > 0.0)) {
    throw InvalidArgument("t_final", "must be positive");
  }
  std::vector<double> grid(n);
  for (int k = 0; k < n; ++k) {
    grid[k] = t_final * k / (n - 1);
  }
  return grid;
}

std::vector<MeanFieldTrajectory> phase_portrait(const ModelParams& p,
                                                std::span<const BlochVector> seeds,
                                                double t_final, int n_output_times,
                                                const IntegratorOptions& options) {
  std::vector<MeanFieldTrajectory> out;
  if (seeds.empty()) {
    return out;
  }
  const std::vector<double> grid = uniform_grid(t_final, n_output_times);
  out.reserve(seeds.size());
  for (const BlochVector& s : seeds) {
    out.push_back(integrate_meanfield(p, s, grid, options));
  }
  return out;
}

}  // namespace pspin
