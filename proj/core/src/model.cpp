#include "pspin/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pspin/error.hpp"
#include "pspin/operators.hpp"

namespace pspin {

namespace {

void require_rate(const char* name, double value) {
  if (!std::isfinite(value)) {
    throw InvalidArgument(name, "must be finite");
  }
  if (value < 0.0) {
    throw InvalidArgument(name, "must be non-negative, got " + std::to_string(value));
  }
}

}  // namespace

void ModelParams::validate() const {
  for (int k = 0; k < 3; ++k) {
    if (!std::isfinite(B[k])) {
      throw InvalidArgument("B", "components must be finite");
    }
  }
  require_rate("kappa_plus", kappa_plus);
  require_rate("kappa_minus", kappa_minus);
  require_rate("kappa_z", kappa_z);
  require_rate("gamma_plus", gamma_plus);
  require_rate("gamma_minus", gamma_minus);
  require_rate("gamma_z", gamma_z);
  if (N < 1) {
    throw InvalidArgument("N", "must be >= 1, got " + std::to_string(N));
  }
}

double ModelParams::max_rate() const noexcept {
  const double m = std::max({B.norm(), kappa_plus, kappa_minus, kappa_z, gamma_plus,
                             gamma_minus, gamma_z});
  return m > 0.0 ? m : 1.0;
}

double wrap_angle(double phi) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(phi, two_pi);
  if (w < 0.0) {
    w += two_pi;
  }
  // fmod of a tiny negative number can round up to exactly 2 pi
  return w >= two_pi ? 0.0 : w;
}

BlochVector admissible(const BlochVector& r) {
  const double n = r.norm();
  if (!std::isfinite(n)) {
    throw InvalidArgument("r", "Bloch vector must be finite");
  }
  if (n > 1.0 + kBallTolerance) {
    throw InvalidArgument("r", "Bloch vector length " + std::to_string(n) +
                                   " exceeds 1 (state would not be positive)");
  }
  if (n > 1.0) {
    return BlochVector::from(r.vec() / n);
  }
  return r;
}

BlochVector to_cartesian(const SphericalPoint& p) noexcept {
  const double s = std::sqrt(std::max(0.0, 1.0 - p.eta * p.eta));
  return {p.r * s * std::cos(p.phi), p.r * s * std::sin(p.phi), p.r * p.eta};
}

SphericalChart to_spherical(const BlochVector& r) noexcept {
  SphericalChart out;
  const double n = r.norm();
  out.point.r = n;
  if (n == 0.0) {
    out.point.eta = 1.0;
    out.point.phi = 0.0;
    out.degenerate = true;
    return out;
  }
  out.point.eta = std::clamp(r.z / n, -1.0, 1.0);
  if (r.x == 0.0 && r.y == 0.0) {
    out.point.phi = 0.0;
    out.degenerate = true;
  } else {
    out.point.phi = wrap_angle(std::atan2(r.y, r.x));
  }
  return out;
}

DensityMatrix::Report DensityMatrix::check() const {
  Report rep;
  if (m_.size() == 0) {
    rep.trace_error = 1.0;
    return rep;
  }
  rep.hermiticity_error = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  rep.trace_error = std::abs(m_.trace() - Complex(1.0, 0.0));
  const CMat herm = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(herm, Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  return rep;
}

bool DensityMatrix::is_valid(double tol) const {
  const Report rep = check();
  return rep.hermiticity_error <= tol && rep.trace_error <= tol && rep.min_eigenvalue >= -tol;
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

DensityMatrix coherent_state(const BlochVector& r_in, int N) {
  if (N < 1 || N > 12) {
    throw InvalidArgument("N", "coherent_state supports 1 <= N <= 12 for dense storage");
  }
  const BlochVector r = admissible(r_in);
  const CMat single = 0.5 * (CMat::Identity(2, 2) + r.x * pauli::x() + r.y * pauli::y() +
                             r.z * pauli::z());
  CMat out = single;
  for (int site = 1; site < N; ++site) {
    out = kron(out, single);
  }
  return DensityMatrix(std::move(out));
}

CoherentMoments coherent_moments(const BlochVector& r_in, int N) {
  if (N < 1) {
    throw InvalidArgument("N", "must be >= 1");
  }
  const BlochVector r = admissible(r_in);
  const Vec3 v = r.vec();
  const double n = N;
  CoherentMoments m;
  m.first = 0.5 * n * v;
  const Complex i(0.0, 1.0);
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      Complex single = (k == l) ? 1.0 : 0.0;
      for (int q = 0; q < 3; ++q) {
        single += i * levi_civita(k, l, q) * v[q];
      }
      m.second(k, l) = 0.25 * (n * (n - 1.0) * v[k] * v[l] + n * single);
    }
  }
  return m;
}

}  // namespace pspin
