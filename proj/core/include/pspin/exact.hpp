#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "pspin/model.hpp"
#include "pspin/operators.hpp"

namespace pspin {

/// Collective spin j = N/2 in the Dicke basis; index a holds m = j - a, so
/// the fully excited state comes first.
struct CollectiveOperators {
  int N = 1;
  double j = 0.5;
  CMat Jz, Jp, Jm;

  CMat Jx() const;
  CMat Jy() const;
};

/// Standard matrix elements <m+1|J_+|m> = sqrt(j(j+1) - m(m+1)). 1 <= N <= 2000.
CollectiveOperators dicke_operators(int N);

enum class Basis { collective, full };

const char* to_string(Basis b) noexcept;

/// Master-equation generator on one basis. The collective basis uses a banded
/// O(d^2) kernel; the full basis wraps full_lindbladian.
class Generator {
 public:
  /// Throws InvalidArgument if the basis cannot represent the parameters
  /// (collective with local rates, full with N > 8).
  Generator(const ModelParams& params, Basis basis);

  CMat apply(const CMat& rho) const;

  Basis basis() const noexcept { return basis_; }
  Eigen::Index dimension() const noexcept { return dim_; }
  /// Upper bound on the induced norm of the generator.
  double norm_bound() const noexcept { return norm_bound_; }

  /// J_x, J_y, J_z on this basis.
  const std::array<CMat, 3>& spin() const noexcept { return spin_; }

 private:
  CMat apply_collective(const CMat& rho) const;

  Basis basis_;
  ModelParams params_;
  Eigen::Index dim_ = 0;
  double norm_bound_ = 0.0;
  std::array<CMat, 3> spin_;
  Lindbladian full_;
  // collective kernel data
  Eigen::VectorXd m_;        // m_a = j - a
  Eigen::VectorXd u_;        // <a|J_+|a+1>
  Eigen::VectorXcd h_;       // <a|H|a+1>
  Eigen::VectorXd n_plus_;   // diag of J_- J_+
  Eigen::VectorXd n_minus_;  // diag of J_+ J_-
};

/// d rho / dt for the given basis.
CMat lindblad_rhs(const ModelParams& params, const DensityMatrix& rho, Basis basis);

/// Pure spin coherent state |theta, phi> in the Dicke basis (|r| = 1).
DensityMatrix dicke_coherent_state(const BlochVector& r, int N);

struct EvolveOptions {
  /// RK4 step; <= 0 selects 0.01 / Generator::norm_bound().
  double dt = 0.0;
  bool store_snapshots = false;
  /// Largest tolerated |tr rho - 1| at any output time.
  double trace_tolerance = 1e-9;
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<Vec3> mean;      ///< <J_k>
  std::vector<Vec3> variance;  ///< <J_k^2> - <J_k>^2
  std::vector<DensityMatrix> snapshots;
  double dt = 0.0;
  double max_trace_drift = 0.0;
};

/// RK4 without trace renormalization. Throws IntegrationError when the trace
/// drifts past the tolerance or the state turns non-finite.
EvolutionResult evolve(const ModelParams& params, const DensityMatrix& rho0,
                       std::span<const double> t_grid, Basis basis,
                       const EvolveOptions& options = {});

struct SteadyStateOptions {
  /// Long-time integration stops once ||L rho||_F falls below this.
  double residual_tolerance = 1e-10;
  double max_time = 1e5;
  /// States from two different starts closer than this count as one.
  double uniqueness_tolerance = 1e-8;
  /// Largest dimension handled by the dense null-space solver.
  int dense_limit = 64;
};

struct SteadyState {
  DensityMatrix rho;
  bool unique = false;
  /// Null-space dimension (dense path) or 0 when found by integration.
  int nullity = 0;
  double residual = 0.0;  ///< ||L rho||_F
  std::string method;
};

SteadyState steady_state(const ModelParams& params, Basis basis,
                         const SteadyStateOptions& options = {});

}  // namespace pspin
