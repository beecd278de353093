#include "pspin/exact.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pspin/error.hpp"

namespace pspin {

namespace {

constexpr Complex kI(0.0, 1.0);

void check_collective(int N) {
  if (N < 1 || N > 2000) {
    throw InvalidArgument("N", "the collective basis supports 1 <= N <= 2000");
  }
}

}  // namespace

CMat CollectiveOperators::Jx() const { return 0.5 * (Jp + Jm); }
CMat CollectiveOperators::Jy() const { return (-0.5 * kI) * (Jp - Jm); }

CollectiveOperators dicke_operators(int N) {
  check_collective(N);
  CollectiveOperators ops;
  ops.N = N;
  ops.j = 0.5 * N;
  const Eigen::Index d = N + 1;
  ops.Jz = CMat::Zero(d, d);
  ops.Jp = CMat::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    const double m = ops.j - static_cast<double>(a);
    ops.Jz(a, a) = m;
    if (a > 0) {
      ops.Jp(a - 1, a) = std::sqrt(ops.j * (ops.j + 1.0) - m * (m + 1.0));
    }
  }
  ops.Jm = ops.Jp.adjoint();
  return ops;
}

const char* to_string(Basis b) noexcept { return b == Basis::full ? "full" : "collective"; }

Generator::Generator(const ModelParams& params, Basis basis) : basis_(basis), params_(params) {
  params.validate();
  const int N = params.N;
  const double j = 0.5 * N;
  const double n = N;
  const double collective_bound =
      2.0 * (2.0 * params.kappa_z / n * j * j +
             2.0 * (params.kappa_plus + params.kappa_minus) / n * (j + 0.5) * (j + 0.5));
  norm_bound_ = 2.0 * params.B.norm() * j + collective_bound;
  if (basis == Basis::collective) {
    if (!params.collective_only()) {
      throw InvalidArgument("gamma",
                            "local channels couple different j subspaces; use the full basis");
    }
    const CollectiveOperators ops = dicke_operators(N);
    dim_ = N + 1;
    spin_ = {ops.Jx(), ops.Jy(), ops.Jz};
    m_.resize(dim_);
    u_ = Eigen::VectorXd::Zero(dim_);
    h_ = Eigen::VectorXcd::Zero(dim_);
    n_plus_ = Eigen::VectorXd::Zero(dim_);
    n_minus_ = Eigen::VectorXd::Zero(dim_);
    const Complex half_b(0.5 * params.B.x(), -0.5 * params.B.y());
    for (Eigen::Index a = 0; a < dim_; ++a) {
      m_[a] = j - static_cast<double>(a);
      if (a + 1 < dim_) {
        u_[a] = ops.Jp(a, a + 1).real();
        h_[a] = half_b * u_[a];
      }
    }
    for (Eigen::Index a = 0; a < dim_; ++a) {
      n_plus_[a] = a > 0 ? u_[a - 1] * u_[a - 1] : 0.0;
      n_minus_[a] = a + 1 < dim_ ? u_[a] * u_[a] : 0.0;
    }
  } else {
    full_ = full_lindbladian(params);
    dim_ = full_.hamiltonian().rows();
    const FullCollectiveOperators J = full_collective_operators(N);
    spin_ = {J.Jx, J.Jy, J.Jz};
    norm_bound_ += 2.0 * n *
                   (0.5 * params.gamma_z + 2.0 * (params.gamma_plus + params.gamma_minus));
  }
  norm_bound_ = std::max(norm_bound_, 1e-12);
}

CMat Generator::apply(const CMat& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) {
    throw InvalidArgument("rho", "dimension " + std::to_string(rho.rows()) +
                                     " does not match the generator dimension " +
                                     std::to_string(dim_));
  }
  return basis_ == Basis::collective ? apply_collective(rho) : full_.apply(rho);
}

CMat Generator::apply_collective(const CMat& rho) const {
  const Eigen::Index d = dim_;
  const double n = params_.N;
  const double kz = 2.0 * params_.kappa_z / n;
  const double kp = 2.0 * params_.kappa_plus / n;
  const double km = 2.0 * params_.kappa_minus / n;
  const double bz = params_.B.z();
  CMat out(d, d);
  for (Eigen::Index b = 0; b < d; ++b) {
    for (Eigen::Index a = 0; a < d; ++a) {
      const Complex r = rho(a, b);
      // -i [H, rho]
      Complex hr = bz * m_[a] * r;
      Complex rh = bz * m_[b] * r;
      if (a + 1 < d) hr += h_[a] * rho(a + 1, b);
      if (a > 0) hr += std::conj(h_[a - 1]) * rho(a - 1, b);
      if (b > 0) rh += rho(a, b - 1) * h_[b - 1];
      if (b + 1 < d) rh += rho(a, b + 1) * std::conj(h_[b]);
      Complex v = -kI * (hr - rh);
      const double dm = m_[a] - m_[b];
      v -= 0.5 * kz * dm * dm * r;
      if (a + 1 < d && b + 1 < d) v += kp * u_[a] * u_[b] * rho(a + 1, b + 1);
      v -= 0.5 * kp * (n_plus_[a] + n_plus_[b]) * r;
      if (a > 0 && b > 0) v += km * u_[a - 1] * u_[b - 1] * rho(a - 1, b - 1);
      v -= 0.5 * km * (n_minus_[a] + n_minus_[b]) * r;
      out(a, b) = v;
    }
  }
  return out;
}

CMat lindblad_rhs(const ModelParams& params, const DensityMatrix& rho, Basis basis) {
  return Generator(params, basis).apply(rho.matrix());
}

DensityMatrix dicke_coherent_state(const BlochVector& r_in, int N) {
  check_collective(N);
  const BlochVector r = admissible(r_in);
  if (std::abs(r.norm() - 1.0) > kBallTolerance) {
    throw InvalidArgument("r", "Dicke coherent states need |r| = 1");
  }
  const double theta = std::acos(std::clamp(r.z, -1.0, 1.0));
  const double phi = std::atan2(r.y, r.x);
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(N + 1);
  for (int k = 0; k <= N; ++k) {
    // k = j - m de-excitations
    const int up = N - k;
    if ((up > 0 && c == 0.0) || (k > 0 && s == 0.0)) {
      continue;
    }
    double log_mag = 0.5 * (std::lgamma(N + 1.0) - std::lgamma(k + 1.0) - std::lgamma(up + 1.0));
    if (up > 0) log_mag += up * std::log(c);
    if (k > 0) log_mag += k * std::log(s);
    psi[k] = std::exp(log_mag) * std::polar(1.0, k * phi);
  }
  psi.normalize();
  return DensityMatrix(psi * psi.adjoint());
}

namespace {

CMat rk4(const Generator& L, const CMat& rho, double h) {
  const CMat k1 = L.apply(rho);
  const CMat k2 = L.apply(rho + (0.5 * h) * k1);
  const CMat k3 = L.apply(rho + (0.5 * h) * k2);
  const CMat k4 = L.apply(rho + h * k3);
  return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void record(const Generator& L, const std::array<CMat, 3>& squares, const CMat& rho,
            EvolutionResult& out) {
  Vec3 mean, var;
  for (int k = 0; k < 3; ++k) {
    mean[k] = (L.spin()[k] * rho).trace().real();
    var[k] = (squares[k] * rho).trace().real() - mean[k] * mean[k];
  }
  out.mean.push_back(mean);
  out.variance.push_back(var);
}

}  // namespace

EvolutionResult evolve(const ModelParams& params, const DensityMatrix& rho0,
                       std::span<const double> t_grid, Basis basis, const EvolveOptions& opt) {
  const Generator L(params, basis);
  if (rho0.dimension() != L.dimension()) {
    throw InvalidArgument("rho0", "dimension does not match the basis");
  }
  if (!rho0.is_valid(1e-8)) {
    throw InvalidArgument("rho0", "not a valid density matrix");
  }
  EvolutionResult out;
  out.dt = opt.dt > 0.0 ? opt.dt : 0.01 / L.norm_bound();
  const std::array<CMat, 3> squares = {L.spin()[0] * L.spin()[0], L.spin()[1] * L.spin()[1],
                                       L.spin()[2] * L.spin()[2]};
  CMat rho = rho0.matrix();
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (k > 0) {
      const double span = t_grid[k] - t_grid[k - 1];
      if (span < 0.0) {
        throw InvalidArgument("t_grid", "times must be non-decreasing");
      }
      if (span > 0.0) {
        const long n = std::max(1L, static_cast<long>(std::ceil(span / out.dt - 1e-9)));
        const double h = span / static_cast<double>(n);
        for (long s = 0; s < n; ++s) {
          rho = rk4(L, rho, h);
        }
      }
    }
    if (!rho.allFinite()) {
      throw IntegrationError("density matrix became non-finite at t = " +
                             std::to_string(t_grid[k]));
    }
    const double drift = std::abs(rho.trace() - 1.0);
    out.max_trace_drift = std::max(out.max_trace_drift, drift);
    if (drift > opt.trace_tolerance) {
      throw IntegrationError("trace drift " + std::to_string(drift) + " at t = " +
                             std::to_string(t_grid[k]) + " exceeds the bound; reduce dt");
    }
    out.times.push_back(t_grid[k]);
    record(L, squares, rho, out);
    if (opt.store_snapshots) {
      out.snapshots.emplace_back(rho);
    }
  }
  return out;
}

namespace {

// Real coordinates of a Hermitian matrix: diagonal, then (Re, Im) of the
// strict upper triangle.
Eigen::VectorXd to_coords(const CMat& m) {
  const Eigen::Index d = m.rows();
  Eigen::VectorXd v(d * d);
  Eigen::Index k = 0;
  for (Eigen::Index a = 0; a < d; ++a) v[k++] = m(a, a).real();
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      v[k++] = m(a, b).real();
      v[k++] = m(a, b).imag();
    }
  }
  return v;
}

CMat from_coords(const Eigen::VectorXd& v, Eigen::Index d) {
  CMat m = CMat::Zero(d, d);
  Eigen::Index k = 0;
  for (Eigen::Index a = 0; a < d; ++a) m(a, a) = v[k++];
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      m(a, b) = Complex(v[k], v[k + 1]);
      m(b, a) = Complex(v[k], -v[k + 1]);
      k += 2;
    }
  }
  return m;
}

SteadyState dense_steady_state(const Generator& L) {
  const Eigen::Index d = L.dimension();
  const Eigen::Index n = d * d;
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[k] = 1.0;
    M.col(k) = to_coords(L.apply(from_coords(e, d)));
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M.transpose());
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  SteadyState out;
  out.method = "dense null space";
  out.nullity = static_cast<int>(n - rank);
  if (out.nullity < 1) {
    throw IntegrationError("generator has no numerical null space");
  }
  Eigen::MatrixXd pick = Eigen::MatrixXd::Zero(n, n - rank);
  for (Eigen::Index k = 0; k < n - rank; ++k) pick(rank + k, k) = 1.0;
  const Eigen::MatrixXd null = qr.householderQ() * pick;
  // component of the trace functional inside the null space
  Eigen::VectorXd trace_fn = Eigen::VectorXd::Zero(n);
  trace_fn.head(d).setOnes();
  const Eigen::VectorXd v = null * (null.transpose() * trace_fn);
  const double tr = v.head(d).sum();
  if (!(std::abs(tr) > 1e-12)) {
    throw IntegrationError("null space carries no trace");
  }
  out.rho = DensityMatrix(from_coords(v / tr, d));
  out.unique = out.nullity == 1;
  out.residual = L.apply(out.rho.matrix()).norm();
  return out;
}

SteadyState integrated_steady_state(const Generator& L, const SteadyStateOptions& opt) {
  const Eigen::Index d = L.dimension();
  std::array<CMat, 2> rho = {CMat::Zero(d, d), CMat::Zero(d, d)};
  rho[0](0, 0) = 1.0;
  rho[1](d - 1, d - 1) = 1.0;
  const double h = 0.01 / L.norm_bound();
  const long check_every = 200;
  double t = 0.0;
  std::array<double, 2> residual = {1.0, 1.0};
  while (t < opt.max_time) {
    for (auto& r : rho) {
      for (long s = 0; s < check_every; ++s) r = rk4(L, r, h);
    }
    t += h * check_every;
    residual = {L.apply(rho[0]).norm(), L.apply(rho[1]).norm()};
    if (!rho[0].allFinite() || !rho[1].allFinite()) {
      throw IntegrationError("steady-state integration became non-finite");
    }
    if (residual[0] <= opt.residual_tolerance && residual[1] <= opt.residual_tolerance) {
      break;
    }
  }
  if (residual[0] > opt.residual_tolerance || residual[1] > opt.residual_tolerance) {
    throw IntegrationError("steady-state integration did not converge by t = " +
                           std::to_string(t) + " (residual " +
                           std::to_string(std::max(residual[0], residual[1])) + ")");
  }
  SteadyState out;
  out.method = "long-time integration";
  out.rho = DensityMatrix(rho[0]);
  out.residual = residual[0];
  out.unique = (rho[0] - rho[1]).norm() <= opt.uniqueness_tolerance;
  return out;
}

}  // namespace

SteadyState steady_state(const ModelParams& params, Basis basis, const SteadyStateOptions& opt) {
  const Generator L(params, basis);
  if (L.dimension() <= opt.dense_limit) {
    return dense_steady_state(L);
  }
  return integrated_steady_state(L, opt);
}

}  // namespace pspin
