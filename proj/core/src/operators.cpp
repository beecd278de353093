#include "pspin/operators.hpp"

#include "pspin/error.hpp"

namespace pspin {

namespace pauli {

namespace {

CMat make(Complex a, Complex b, Complex c, Complex d) {
  CMat m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

const CMat& x() {
  static const CMat m = make(0.0, 1.0, 1.0, 0.0);
  return m;
}

const CMat& y() {
  static const CMat m = make(0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0);
  return m;
}

const CMat& z() {
  static const CMat m = make(1.0, 0.0, 0.0, -1.0);
  return m;
}

const CMat& plus() {
  static const CMat m = x() + Complex(0.0, 1.0) * y();
  return m;
}

const CMat& minus() {
  static const CMat m = x() - Complex(0.0, 1.0) * y();
  return m;
}

const CMat& axis(int k) {
  switch (k) {
    case 0:
      return x();
    case 1:
      return y();
    case 2:
      return z();
    default:
      throw InvalidArgument("axis", "Cartesian index must be 0, 1 or 2");
  }
}

}  // namespace pauli

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMat site_operator(const CMat& op, int site, int N) {
  if (N < 1 || site < 0 || site >= N) {
    throw InvalidArgument("site", "must lie in [0, N)");
  }
  // identity (x) op (x) identity with the left factor of dimension 2^site
  const Eigen::Index left = Eigen::Index{1} << site;
  const Eigen::Index right = Eigen::Index{1} << (N - site - 1);
  return kron(kron(CMat::Identity(left, left), op), CMat::Identity(right, right));
}

FullCollectiveOperators full_collective_operators(int N) {
  const Eigen::Index dim = Eigen::Index{1} << N;
  FullCollectiveOperators J{CMat::Zero(dim, dim), CMat::Zero(dim, dim), CMat::Zero(dim, dim),
                            CMat::Zero(dim, dim), CMat::Zero(dim, dim)};
  for (int s = 0; s < N; ++s) {
    J.Jx += 0.5 * site_operator(pauli::x(), s, N);
    J.Jy += 0.5 * site_operator(pauli::y(), s, N);
    J.Jz += 0.5 * site_operator(pauli::z(), s, N);
  }
  const Complex i(0.0, 1.0);
  J.Jp = J.Jx + i * J.Jy;
  J.Jm = J.Jx - i * J.Jy;
  return J;
}

void Lindbladian::add_jump(double rate, const CMat& op) {
  if (rate == 0.0) {
    return;
  }
  if (K_.size() == 0) {
    H_ = CMat::Zero(op.rows(), op.cols());
    K_ = H_;
  }
  const CMat dag = op.adjoint();
  K_ -= Complex(0.0, 0.5 * rate) * (dag * op);
  jumps_.push_back(Jump{rate, op.sparseView(), dag.sparseView()});
}

CMat Lindbladian::apply(const CMat& rho) const {
  const Complex i(0.0, 1.0);
  CMat out = -i * (K_ * rho - rho * K_.adjoint());
  for (const Jump& jmp : jumps_) {
    const CMat left = jmp.op * rho;
    out.noalias() += jmp.rate * (left * jmp.op_dag);
  }
  return out;
}

Lindbladian full_lindbladian(const ModelParams& params) {
  params.validate();
  const int N = params.N;
  if (N > 8) {
    throw InvalidArgument("N", "the full 2^N basis is limited to N <= 8");
  }
  const FullCollectiveOperators J = full_collective_operators(N);
  Lindbladian L(params.B.x() * J.Jx + params.B.y() * J.Jy + params.B.z() * J.Jz);
  const double n = N;
  L.add_jump(2.0 * params.kappa_z / n, J.Jz);
  L.add_jump(2.0 * params.kappa_plus / n, J.Jp);
  L.add_jump(2.0 * params.kappa_minus / n, J.Jm);
  for (int s = 0; s < N; ++s) {
    L.add_jump(0.5 * params.gamma_z, site_operator(pauli::z(), s, N));
    L.add_jump(0.5 * params.gamma_plus, site_operator(pauli::plus(), s, N));
    L.add_jump(0.5 * params.gamma_minus, site_operator(pauli::minus(), s, N));
  }
  return L;
}

}  // namespace pspin
