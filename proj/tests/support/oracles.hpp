#pragma once

// Test-only reference implementations. They share no code paths with the
// library beyond ModelParams and the Eigen types.

#include <cmath>
#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "pspin/model.hpp"

namespace oracle {

using pspin::CMat;
using pspin::Complex;
using pspin::Mat3;
using pspin::Vec3;

inline CMat pauli(char which) {
  CMat m = CMat::Zero(2, 2);
  const Complex i(0.0, 1.0);
  switch (which) {
    case 'x': m(0, 1) = m(1, 0) = 1.0; break;
    case 'y': m(0, 1) = -i; m(1, 0) = i; break;
    case 'z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    case '+': m(0, 1) = 2.0; break;  // sigma_x + i sigma_y
    case '-': m(1, 0) = 2.0; break;
  }
  return m;
}

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CMat embed(const CMat& op, int site, int N) {
  CMat out = CMat::Identity(1, 1);
  for (int s = 0; s < N; ++s) out = kron(out, s == site ? op : CMat::Identity(2, 2));
  return out;
}

inline CMat collective(char which, int N) {
  const int d = 1 << N;
  CMat out = CMat::Zero(d, d);
  for (int s = 0; s < N; ++s) out += 0.5 * embed(pauli(which), s, N);
  return out;
}

/// Column-major vectorized GKSL superoperator: vec(L[rho]) = S vec(rho).
inline CMat superoperator(const CMat& H, const std::vector<std::pair<double, CMat>>& jumps) {
  const Eigen::Index d = H.rows();
  const CMat I = CMat::Identity(d, d);
  const Complex i(0.0, 1.0);
  CMat S = -i * (kron(I, H) - kron(H.transpose(), I));
  for (const auto& [rate, L] : jumps) {
    const CMat LdL = L.adjoint() * L;
    S += rate * (kron(L.conjugate(), L) - 0.5 * kron(I, LdL) - 0.5 * kron(LdL.transpose(), I));
  }
  return S;
}

/// Full 2^N master equation superoperator built from scratch.
inline CMat full_superoperator(const pspin::ModelParams& p) {
  const int N = p.N;
  const CMat H = p.B.x() * collective('x', N) + p.B.y() * collective('y', N) +
                 p.B.z() * collective('z', N);
  std::vector<std::pair<double, CMat>> jumps;
  const CMat Jp = collective('x', N) + Complex(0, 1) * collective('y', N);
  jumps.emplace_back(2.0 * p.kappa_z / N, collective('z', N));
  jumps.emplace_back(2.0 * p.kappa_plus / N, Jp);
  jumps.emplace_back(2.0 * p.kappa_minus / N, CMat(Jp.adjoint()));
  for (int s = 0; s < N; ++s) {
    jumps.emplace_back(0.5 * p.gamma_z, embed(pauli('z'), s, N));
    jumps.emplace_back(0.5 * p.gamma_plus, embed(pauli('+'), s, N));
    jumps.emplace_back(0.5 * p.gamma_minus, embed(pauli('-'), s, N));
  }
  return superoperator(H, jumps);
}

inline CMat apply(const CMat& S, const CMat& rho) {
  const Eigen::Index d = rho.rows();
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), d * d);
  Eigen::VectorXcd w = S * v;
  return Eigen::Map<CMat>(w.data(), d, d);
}

/// Normalized symmetric Dicke states |j, j - k> in the product basis,
/// built by summing over bit patterns with k ground-state spins.
inline CMat dicke_isometry(int N) {
  const int d = 1 << N;
  CMat V = CMat::Zero(d, N + 1);
  for (int state = 0; state < d; ++state) {
    int ground = 0;
    for (int s = 0; s < N; ++s) ground += (state >> s) & 1;
    V(state, ground) = 1.0;
  }
  for (int k = 0; k <= N; ++k) V.col(k).normalize();
  return V;
}

/// Steady state of a superoperator via LU with one row replaced by the
/// trace condition.
inline CMat steady_state_lu(const CMat& S, Eigen::Index d) {
  CMat A = S;
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(d * d);
  A.row(0).setZero();
  for (Eigen::Index a = 0; a < d; ++a) A(0, a * d + a) = 1.0;
  b[0] = 1.0;
  Eigen::VectorXcd v = A.partialPivLu().solve(b);
  return Eigen::Map<CMat>(v.data(), d, d);
}

/// Central-difference Jacobian of a vector field.
inline Mat3 jacobian_fd(const std::function<Vec3(const Vec3&)>& f, const Vec3& x,
                        double h = 1e-6) {
  Mat3 J;
  for (int k = 0; k < 3; ++k) {
    Vec3 e = Vec3::Zero();
    e[k] = h;
    J.col(k) = (f(x + e) - f(x - e)) / (2.0 * h);
  }
  return J;
}

/// Ito change of variables from Cartesian to (eta, phi, r) coefficients with
/// finite-difference Jacobian and Hessians of the coordinate map.
inline std::pair<Vec3, Mat3> spherical_by_differences(const Vec3& a, const Mat3& D, const Vec3& r,
                                                      int N) {
  const auto coords = [](const Vec3& v) {
    const double rr = v.norm();
    return Vec3(v.z() / rr, std::atan2(v.y(), v.x()), rr);
  };
  const double h = 1e-5;
  Mat3 J = jacobian_fd(coords, r, h);
  Vec3 drift = J * a;
  for (int q = 0; q < 3; ++q) {
    Mat3 H;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        Vec3 ei = Vec3::Zero(), ej = Vec3::Zero();
        ei[i] = h;
        ej[j] = h;
        H(i, j) = (coords(r + ei + ej)[q] - coords(r + ei - ej)[q] - coords(r - ei + ej)[q] +
                   coords(r - ei - ej)[q]) /
                  (4.0 * h * h);
      }
    }
    drift[q] += (D.cwiseProduct(H)).sum() / (2.0 * N);
  }
  return {drift, J * D * J.transpose()};
}

}  // namespace oracle
