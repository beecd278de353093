#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace pspin {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using CMat = Eigen::MatrixXcd;

/// Radius tolerance of the Bloch ball. Vectors with 1 < |r| <= 1 + tol are
/// pulled back onto the sphere.
inline constexpr double kBallTolerance = 1e-9;

/// Rates and fields of the master equation for N identical two-level systems.
///
/// Pauli convention: sigma_z = diag(1, -1), the excited state sits at z = +1,
/// and sigma_pm = sigma_x +- i sigma_y (operator norm 2). kappa_* are
/// collective rates of the jump operators J_z, J_+, J_-; gamma_* are the
/// identical single-site rates of sigma_z, sigma_+, sigma_-.
struct ModelParams {
  Vec3 B = Vec3::Zero();
  double kappa_plus = 0.0;
  double kappa_minus = 0.0;
  double kappa_z = 0.0;
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
  double gamma_z = 0.0;
  int N = 1;

  /// Throws InvalidArgument naming the first offending field.
  void validate() const;

  /// True when no local (single-site) channel is active.
  bool collective_only() const noexcept {
    return gamma_plus == 0.0 && gamma_minus == 0.0 && gamma_z == 0.0;
  }

  /// Largest of |B| and all rates; 1 when everything vanishes.
  double max_rate() const noexcept;
};

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 vec() const noexcept { return {x, y, z}; }
  double norm() const noexcept { return vec().norm(); }

  static BlochVector from(const Vec3& v) noexcept { return {v.x(), v.y(), v.z()}; }
};

/// eta = cos(theta) in [-1, 1], phi in [0, 2 pi), r in [0, 1].
struct SphericalPoint {
  double eta = 1.0;
  double phi = 0.0;
  double r = 1.0;
};

/// Reduces an angle into [0, 2 pi).
double wrap_angle(double phi) noexcept;

/// Checks |r| <= 1 + kBallTolerance; vectors inside the tolerance band are
/// renormalized onto the unit sphere. Throws InvalidArgument otherwise.
BlochVector admissible(const BlochVector& r);

struct SphericalChart {
  SphericalPoint point;
  /// Set when r = 0 or eta = +-1; phi is then reported as 0.
  bool degenerate = false;
};

BlochVector to_cartesian(const SphericalPoint& p) noexcept;
SphericalChart to_spherical(const BlochVector& r) noexcept;

/// Hermitian, unit-trace, positive matrix. The constructor does not enforce
/// the invariants (solvers hold intermediate states); check() reports them.
class DensityMatrix {
 public:
  struct Report {
    double hermiticity_error = 0.0;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;
  };

  DensityMatrix() = default;
  explicit DensityMatrix(CMat m) : m_(std::move(m)) {}

  const CMat& matrix() const noexcept { return m_; }
  CMat& matrix() noexcept { return m_; }
  Eigen::Index dimension() const noexcept { return m_.rows(); }
  Complex trace() const { return m_.trace(); }

  Report check() const;
  bool is_valid(double tol = 1e-9) const;
  /// tr(rho^2).
  double purity() const;

 private:
  CMat m_;
};

/// N-fold tensor power of (1 + sigma . r) / 2 in the 2^N product basis.
/// Site 0 is the most significant bit; bit value 0 is the excited state.
DensityMatrix coherent_state(const BlochVector& r, int N);

struct CoherentMoments {
  Vec3 first;                    ///< <J_k> = (N/2) r_k
  Eigen::Matrix3cd second;       ///< <J_k J_l>
};

/// Exact first and second moments of the collective spin in alpha(r).
CoherentMoments coherent_moments(const BlochVector& r, int N);

}  // namespace pspin
