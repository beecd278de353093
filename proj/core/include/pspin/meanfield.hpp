#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "pspin/model.hpp"

namespace pspin {

/// The N -> infinity flow r' = a(r): Cartesian drift without the 1/N terms.
/// kappa_z does not enter.
Vec3 meanfield_rhs(const ModelParams& params, const BlochVector& r);

/// Analytic Jacobian d a_i / d r_j of meanfield_rhs.
Mat3 meanfield_jacobian(const ModelParams& params, const BlochVector& r);

struct IntegratorOptions {
  /// Fixed RK4 step; <= 0 selects 1e-3 / params.max_rate().
  double dt = 0.0;
  /// Step-halving error control against `tolerance` (per step, max norm).
  bool adaptive = false;
  double tolerance = 1e-10;
};

struct MeanFieldTrajectory {
  std::vector<double> times;
  std::vector<BlochVector> states;
  double step = 0.0;
  std::string method = "rk4";
};

/// Integrates from r0 at t_grid.front() and stores the state at every grid
/// time. t_grid must be non-decreasing. Throws IntegrationError on
/// non-finite states or step underflow.
MeanFieldTrajectory integrate_meanfield(const ModelParams& params, const BlochVector& r0,
                                        std::span<const double> t_grid,
                                        const IntegratorOptions& options = {});

enum class Stability { stable, unstable, marginal };

/// Manifold on which roots are searched and linearized. Collective-only
/// dynamics conserve |r|, so roots live on the unit sphere and stability is
/// judged in its tangent plane; otherwise the full ball is used.
enum class Manifold { ball, sphere };

const char* to_string(Stability s) noexcept;
const char* to_string(Manifold m) noexcept;

struct FixedPointResult {
  BlochVector location;
  double residual = 0.0;  ///< |a(r)|
  Mat3 jacobian = Mat3::Zero();
  /// Eigenvalues that decide the classification (3 in the ball, 2 tangent
  /// eigenvalues on the sphere).
  std::vector<std::complex<double>> eigenvalues;
  Stability classification = Stability::marginal;
  Manifold manifold = Manifold::ball;
};

inline constexpr double kMarginalThreshold = 1e-8;
inline constexpr double kRootDedupRadius = 1e-6;
inline constexpr double kRootTolerance = 1e-10;

/// Damped Newton from n_seeds Halton seeds; roots are deduplicated and sorted.
std::vector<FixedPointResult> find_fixed_points(const ModelParams& params, int n_seeds = 64);

/// Classification of a single point (no root search).
FixedPointResult classify_point(const ModelParams& params, const BlochVector& r,
                                Manifold manifold);

/// Deterministic portrait seeds: a Fibonacci lattice of n points on the
/// sphere of the given radius.
std::vector<BlochVector> fibonacci_seeds(int n, double radius = 1.0);

/// Integrates every seed on a uniform grid of n_output_times points over
/// [0, t_final]. Output order follows the seed order.
std::vector<MeanFieldTrajectory> phase_portrait(const ModelParams& params,
                                                std::span<const BlochVector> seeds,
                                                double t_final, int n_output_times = 200,
                                                const IntegratorOptions& options = {});

/// n uniformly spaced times from 0 to t_final inclusive (n >= 2).
std::vector<double> uniform_grid(double t_final, int n);

}  // namespace pspin
