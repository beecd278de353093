#pragma once

#include "pspin/model.hpp"

namespace pspin {

/// Chart guards of the spherical parameterization.
inline constexpr double kPoleEpsilon = 1e-9;
inline constexpr double kRadiusEpsilon = 1e-9;
/// Eigenvalues of D above -kPsdTolerance count as non-negative.
inline constexpr double kPsdTolerance = 1e-10;

enum class Chart { cartesian, spherical };

/// Drift a and diffusion D of  dP/dt = (-d_i a_i + (1/2N) d_i d_j D_ij) P.
/// Component order is (x, y, z) or (eta, phi, r) depending on the chart.
struct DriftDiffusion {
  Chart chart = Chart::cartesian;
  Vec3 drift = Vec3::Zero();
  Mat3 diffusion = Mat3::Zero();
};

/// Coefficients in the Cartesian chart, including the 1/N terms.
DriftDiffusion drift_diffusion_cartesian(const ModelParams& params, const BlochVector& r);

/// Coefficients in the (eta, phi, r) chart. Throws ChartSingularity when
/// |eta| > 1 - kPoleEpsilon or r < kRadiusEpsilon.
DriftDiffusion drift_diffusion_spherical(const ModelParams& params, const SphericalPoint& p);

/// Ito change of variables of Cartesian coefficients into the spherical chart:
/// a_q = J a + tr(D H_q) / 2N and D_q = J D J^T. Used to cross-check the
/// closed-form spherical coefficients.
DriftDiffusion transform_to_spherical(const DriftDiffusion& cartesian, const BlochVector& r,
                                      int N);

/// Non-zero eigenvalues of the spherical diffusion matrix on the unit sphere
/// for purely collective dynamics.
struct SphereEigen {
  double lambda1 = 0.0;  ///< eta-eta entry
  double lambda2 = 0.0;  ///< phi-phi entry
};

SphereEigen sphere_eigenvalues(const ModelParams& params, double eta);

enum class Region { sphere, ball };

/// kappa_+ + kappa_- <= 2 kappa_z. Sufficient for a positive diffusion on the
/// sphere, and necessary when one of kappa_+- vanishes.
bool sphere_sufficient_condition(const ModelParams& params) noexcept;

/// Closed-form positivity of the diffusion matrix over the region.
/// Sphere: lambda2(eta) >= 0 for all eta (exact criterion, which reduces to
/// the sufficient condition above when min(kappa_+, kappa_-) = 0).
/// Ball: kappa_+ == kappa_- (the infinite temperature case).
bool fokker_planck_condition(const ModelParams& params, Region region);

/// Picks the region from the parameters: sphere for collective-only
/// dynamics, ball otherwise.
bool fokker_planck_condition(const ModelParams& params);

struct PositivityReport {
  bool condition_holds = false;
  double min_eigenvalue = 0.0;
  SphericalPoint argmin;
  int resolution = 0;
};

/// Minimum eigenvalue of the spherical D over a midpoint grid of `resolution`
/// points in eta (plus a radial grid in the ball). resolution >= 10.
PositivityReport scan_positivity(const ModelParams& params, Region region, int resolution);

/// S with S S^T = D / N from a symmetric eigendecomposition. Eigenvalues in
/// [-kPsdTolerance, 0) are clipped; anything lower throws
/// NotPositiveSemidefinite.
Mat3 factor_diffusion(const Mat3& D, int N);

/// Exact action of the master equation on alpha(r) in the 2^N product
/// basis (N = params.N <= 8).
CMat generator_oracle(const ModelParams& params, const BlochVector& r);

/// || L[alpha(r)] - (a_i d_i + (1/2N) D_ij d_i d_j) alpha(r) ||_F with a, D
/// from drift_diffusion_cartesian and exact derivatives of alpha(r).
/// Requires N = params.N <= 6 and |r| < 1.
double verify_coefficients(const ModelParams& params, const BlochVector& r);

/// Same residual for caller-supplied coefficients.
double verify_coefficients(const ModelParams& params, const BlochVector& r,
                           const DriftDiffusion& cartesian);

}  // namespace pspin
