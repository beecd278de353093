#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "pspin/model.hpp"

namespace pspin {

namespace pauli {
const CMat& x();
const CMat& y();
const CMat& z();
/// sigma_x + i sigma_y = 2 |e><g|
const CMat& plus();
/// sigma_x - i sigma_y = 2 |g><e|
const CMat& minus();
/// sigma_x, sigma_y, sigma_z by Cartesian index.
const CMat& axis(int k);
}  // namespace pauli

/// Kronecker product a (x) b.
CMat kron(const CMat& a, const CMat& b);

/// epsilon_{ijk} for indices in {0, 1, 2}.
constexpr double levi_civita(int i, int j, int k) noexcept {
  return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0;
}

/// Embeds a 2x2 operator acting on `site` into the 2^N product space.
CMat site_operator(const CMat& op, int site, int N);

/// Collective spin J = sum_lambda sigma_lambda / 2 in the 2^N product basis.
struct FullCollectiveOperators {
  CMat Jx, Jy, Jz, Jp, Jm;
};

FullCollectiveOperators full_collective_operators(int N);

/// GKSL generator  -i[H, rho] + sum_k rate_k (L rho L^+ - {L^+ L, rho}/2).
/// Jump operators are stored sparse; the anticommutator terms are folded into
/// the non-Hermitian K = H - (i/2) sum_k rate_k L^+ L.
class Lindbladian {
 public:
  using SparseMat = Eigen::SparseMatrix<Complex>;

  struct Jump {
    double rate;
    SparseMat op;
    SparseMat op_dag;
  };

  Lindbladian() = default;
  explicit Lindbladian(CMat hamiltonian) : H_(std::move(hamiltonian)), K_(H_) {}

  void add_jump(double rate, const CMat& op);
  CMat apply(const CMat& rho) const;

  const CMat& hamiltonian() const noexcept { return H_; }
  const std::vector<Jump>& jumps() const noexcept { return jumps_; }

 private:
  CMat H_;
  CMat K_;
  std::vector<Jump> jumps_;
};

/// Full master equation of ModelParams on the 2^N product space (N <= 8):
/// H = B.J, collective jumps J_z, J_+, J_- with rates 2 kappa / N, and
/// identical local jumps sigma_z, sigma_+, sigma_- with rates gamma / 2.
Lindbladian full_lindbladian(const ModelParams& params);

}  // namespace pspin
