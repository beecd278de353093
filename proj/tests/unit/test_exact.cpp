#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pspin/coeffs.hpp"
#include "pspin/error.hpp"
#include "pspin/exact.hpp"
#include "pspin/meanfield.hpp"

using namespace pspin;

namespace {

ModelParams crf(double bx, int N) {
  ModelParams p;
  p.kappa_plus = 1.0;
  p.kappa_z = 1.0;
  p.B = Vec3(bx, 0, 0);
  p.N = N;
  return p;
}

ModelParams random_collective(std::mt19937_64& rng, int N) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelParams p;
  p.N = N;
  p.B = Vec3(2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1);
  p.kappa_plus = u(rng);
  p.kappa_minus = u(rng);
  p.kappa_z = u(rng);
  return p;
}

CMat random_density(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> g;
  CMat a(d, d);
  for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = Complex(g(rng), g(rng));
  CMat rho = a * a.adjoint();
  return rho / rho.trace();
}

double max_abs_entry(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Dicke, SpinHalf) {
  const CollectiveOperators J = dicke_operators(1);
  EXPECT_DOUBLE_EQ(J.j, 0.5);
  EXPECT_NEAR(J.Jz(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(J.Jz(1, 1).real(), -0.5, 1e-15);
  EXPECT_NEAR(J.Jp(0, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(J.Jp.cwiseAbs().sum(), 1.0, 1e-15);
}

TEST(Dicke, SpinOneEntries) {
  const CollectiveOperators J = dicke_operators(2);
  EXPECT_NEAR(J.Jp(0, 1).real(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(J.Jp(1, 2).real(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(J.Jp.cwiseAbs().sum(), 2.0 * std::sqrt(2.0), 1e-14);
}

TEST(Dicke, AlgebraProperty) {
  for (int N : {1, 2, 3, 7, 20, 41}) {
    const CollectiveOperators J = dicke_operators(N);
    const double j = 0.5 * N;
    const Eigen::Index d = N + 1;
    const CMat Jx = J.Jx(), Jy = J.Jy();
    const CMat casimir = Jx * Jx + Jy * Jy + J.Jz * J.Jz;
    EXPECT_LE(max_abs_entry(casimir - j * (j + 1) * CMat::Identity(d, d)), 1e-12 * j * j + 1e-12);
    EXPECT_LE(max_abs_entry(J.Jz * J.Jp - J.Jp * J.Jz - J.Jp), 1e-12 * j);
    EXPECT_LE(max_abs_entry(J.Jz * J.Jm - J.Jm * J.Jz + J.Jm), 1e-12 * j);
    EXPECT_LE(max_abs_entry(J.Jp - CMat(J.Jm.adjoint())), 0.0);
  }
  EXPECT_THROW(dicke_operators(0), InvalidArgument);
  EXPECT_THROW(dicke_operators(2001), InvalidArgument);
}

TEST(Dicke, MatchesSymmetricSubspaceOfProductSpace) {
  for (int N = 1; N <= 5; ++N) {
    const CMat V = oracle::dicke_isometry(N);
    const CollectiveOperators J = dicke_operators(N);
    for (char axis : {'x', 'y', 'z'}) {
      const CMat projected = V.adjoint() * oracle::collective(axis, N) * V;
      const CMat ours = axis == 'x' ? J.Jx() : axis == 'y' ? J.Jy() : J.Jz;
      EXPECT_LE(max_abs_entry(projected - ours), 1e-12);
    }
  }
}

TEST(Rhs, TracelessAndHermitian) {
  std::mt19937_64 rng(1);
  for (int N : {1, 3, 6, 15}) {
    const ModelParams p = random_collective(rng, N);
    const CMat rho = random_density(rng, N + 1);
    const CMat out = lindblad_rhs(p, DensityMatrix(rho), Basis::collective);
    EXPECT_LE(std::abs(out.trace()), 1e-13);
    EXPECT_LE(max_abs_entry(out - CMat(out.adjoint())), 1e-13);
  }
  ModelParams q = random_collective(rng, 3);
  q.gamma_z = 0.4;
  q.gamma_minus = 0.2;
  const CMat out = lindblad_rhs(q, DensityMatrix(random_density(rng, 8)), Basis::full);
  EXPECT_LE(std::abs(out.trace()), 1e-13);
}

TEST(Rhs, CollectiveKernelMatchesDenseSuperoperator) {
  std::mt19937_64 rng(2);
  for (int N : {1, 2, 5, 12}) {
    const ModelParams p = random_collective(rng, N);
    const CollectiveOperators J = dicke_operators(N);
    const CMat H = p.B.x() * J.Jx() + p.B.y() * J.Jy() + p.B.z() * J.Jz;
    // collective J_+- carry the norm of the standard ladder operators
    const std::vector<std::pair<double, CMat>> jumps{{2.0 * p.kappa_z / N, J.Jz},
                                                     {2.0 * p.kappa_plus / N, J.Jp},
                                                     {2.0 * p.kappa_minus / N, J.Jm}};
    const CMat S = oracle::superoperator(H, jumps);
    const CMat rho = random_density(rng, N + 1);
    EXPECT_LE(max_abs_entry(lindblad_rhs(p, DensityMatrix(rho), Basis::collective) -
                            oracle::apply(S, rho)),
              1e-12);
  }
}

TEST(Rhs, FullBasisMatchesGeneratorOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int N = 1; N <= 4; ++N) {
    ModelParams p = random_collective(rng, N);
    p.gamma_plus = u(rng);
    p.gamma_minus = u(rng);
    p.gamma_z = u(rng);
    const BlochVector r{0.2, -0.3, 0.5};
    const CMat got = lindblad_rhs(p, coherent_state(r, N), Basis::full);
    EXPECT_LE(max_abs_entry(got - generator_oracle(p, r)), 1e-12);
  }
  ModelParams decay;
  decay.gamma_minus = 1.0;
  const CMat got = lindblad_rhs(decay, coherent_state({0, 0, 1}, 1), Basis::full);
  EXPECT_NEAR(got(0, 0).real(), -2.0, 1e-15);
  EXPECT_NEAR(got(1, 1).real(), 2.0, 1e-15);
}

TEST(Rhs, InfiniteTemperatureFixesMixedState) {
  for (int N = 1; N <= 4; ++N) {
    ModelParams p;
    p.N = N;
    p.kappa_plus = p.kappa_minus = 0.6;
    p.kappa_z = 0.3;
    p.gamma_plus = p.gamma_minus = 0.2;
    const int d = 1 << N;
    const CMat mixed = CMat::Identity(d, d) / double(d);
    EXPECT_LE(max_abs_entry(lindblad_rhs(p, DensityMatrix(mixed), Basis::full)), 1e-14);
  }
}

TEST(Rhs, BasisGuards) {
  ModelParams p;
  p.gamma_z = 0.1;
  p.N = 2;
  EXPECT_THROW(Generator(p, Basis::collective), InvalidArgument);
  p.N = 9;
  EXPECT_THROW(Generator(p, Basis::full), InvalidArgument);
}

TEST(CoherentDicke, MatchesProductSpaceState) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int N = 1; N <= 5; ++N) {
    const Vec3 v = Vec3(g(rng), g(rng), g(rng)).normalized();
    const BlochVector r = BlochVector::from(v);
    const CMat V = oracle::dicke_isometry(N);
    const CMat projected = V.adjoint() * coherent_state(r, N).matrix() * V;
    EXPECT_LE(max_abs_entry(dicke_coherent_state(r, N).matrix() - projected), 1e-12);
  }
  EXPECT_THROW(dicke_coherent_state({0, 0, 0.5}, 3), InvalidArgument);
  const DensityMatrix big = dicke_coherent_state({1, 0, 0}, 1000);
  EXPECT_NEAR(big.trace().real(), 1.0, 1e-10);
}

TEST(Evolve, RabiPrecession) {
  ModelParams p;
  p.B = Vec3(1.3, 0, 0);
  const auto grid = uniform_grid(5.0, 51);
  const auto res = evolve(p, coherent_state({0, 0, 1}, 1), grid, Basis::full);
  for (std::size_t k = 0; k < grid.size(); ++k)
    EXPECT_NEAR(2.0 * res.mean[k].z(), std::cos(1.3 * grid[k]), 1e-8);
}

TEST(Evolve, SingleSpinDecay) {
  ModelParams p;
  p.gamma_minus = 0.5;
  const auto grid = uniform_grid(4.0, 41);
  EvolveOptions opt;
  opt.store_snapshots = true;
  const auto res = evolve(p, coherent_state({0, 0, 1}, 1), grid, Basis::full, opt);
  ASSERT_EQ(res.snapshots.size(), grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    EXPECT_NEAR(res.snapshots[k].matrix()(0, 0).real(), std::exp(-grid[k]), 1e-8);
}

TEST(Evolve, CollectiveDephasingAtN40) {
  ModelParams p;
  p.kappa_z = 1.0;
  p.N = 40;
  const auto grid = uniform_grid(40.0, 21);
  const auto res = evolve(p, dicke_coherent_state({1, 0, 0}, 40), grid, Basis::collective);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(res.mean[k].x(), 20.0 * std::exp(-grid[k] / 40.0), 1e-6);
    EXPECT_NEAR(res.mean[k].y(), 0.0, 1e-9);
  }
  EXPECT_LE(res.max_trace_drift, 1e-9);
}

TEST(Evolve, BasesAgreeAndInvariantsHold) {
  std::mt19937_64 rng(5);
  const auto grid = uniform_grid(2.0, 5);
  for (int N = 1; N <= 6; ++N) {
    const ModelParams p = random_collective(rng, N);
    const BlochVector r{0.6, 0.0, 0.8};
    EvolveOptions opt;
    opt.store_snapshots = true;
    const auto a = evolve(p, dicke_coherent_state(r, N), grid, Basis::collective, opt);
    const auto b = evolve(p, coherent_state(r, N), grid, Basis::full, opt);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      EXPECT_LE((a.mean[k] - b.mean[k]).cwiseAbs().maxCoeff(), 1e-8) << N;
      EXPECT_LE((a.variance[k] - b.variance[k]).cwiseAbs().maxCoeff(), 1e-8) << N;
      const auto report = a.snapshots[k].check();
      EXPECT_GE(report.min_eigenvalue, -1e-8);
      EXPECT_LE(report.hermiticity_error, 1e-12);
    }
  }
}

double peak_emission(const ModelParams& p, double t_final) {
  const auto grid = uniform_grid(t_final, 801);
  const auto res = evolve(p, dicke_coherent_state({0, 0, 1}, p.N), grid, Basis::collective);
  double peak = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    peak = std::max(peak, std::abs(res.mean[k].z() - res.mean[k - 1].z()) /
                              (grid[k] - grid[k - 1]));
  return peak;
}

TEST(Evolve, SuperradiantScaling) {
  // fixed jump rate 2 kappa_- / N: the emission peak grows like N^2
  std::vector<double> fixed_jump, scaled;
  for (int N : {4, 8, 16}) {
    ModelParams p;
    p.N = N;
    p.kappa_minus = 0.05 * N;
    fixed_jump.push_back(peak_emission(p, 8.0 / N));
    p.kappa_minus = 1.0;
    scaled.push_back(peak_emission(p, 4.0));
  }
  EXPECT_GT(fixed_jump[1] / fixed_jump[0], 2.0);
  EXPECT_GT(fixed_jump[2] / fixed_jump[1], 2.0);
  // with kappa_- itself held fixed the 1/N prefactor leaves growth sublinear
  EXPECT_LT(scaled[1] / scaled[0], 2.0);
  EXPECT_LT(scaled[2] / scaled[1], 2.0);
}

TEST(Evolve, RejectsBadGrid) {
  ModelParams p;
  const std::vector<double> grid{1.0, 0.0};
  EXPECT_THROW(evolve(p, coherent_state({0, 0, 1}, 1), grid, Basis::full), InvalidArgument);
}

TEST(SteadyState, DecayHasGroundStateDarkState) {
  ModelParams p;
  p.N = 2;
  p.gamma_minus = 0.7;
  const SteadyState s = steady_state(p, Basis::full);
  EXPECT_TRUE(s.unique);
  EXPECT_EQ(s.nullity, 1);
  CMat ground = CMat::Zero(4, 4);
  ground(3, 3) = 1.0;
  EXPECT_LE(max_abs_entry(s.rho.matrix() - ground), 1e-10);
}

TEST(SteadyState, DephasingIsNotUnique) {
  ModelParams p;
  p.N = 6;
  p.kappa_z = 1.0;
  const SteadyState s = steady_state(p, Basis::collective);
  EXPECT_FALSE(s.unique);
  EXPECT_GT(s.nullity, 1);
}

TEST(SteadyState, MatchesLuOracle) {
  std::mt19937_64 rng(6);
  for (int N : {2, 5, 9}) {
    ModelParams p = random_collective(rng, N);
    const CollectiveOperators J = dicke_operators(N);
    const CMat H = p.B.x() * J.Jx() + p.B.y() * J.Jy() + p.B.z() * J.Jz;
    const CMat S = oracle::superoperator(
        H, {{2.0 * p.kappa_z / N, J.Jz}, {2.0 * p.kappa_plus / N, J.Jp},
            {2.0 * p.kappa_minus / N, J.Jm}});
    const CMat ref = oracle::steady_state_lu(S, N + 1);
    const SteadyState s = steady_state(p, Basis::collective);
    EXPECT_TRUE(s.unique);
    EXPECT_LE(max_abs_entry(s.rho.matrix() - ref), 1e-9);
  }
}

TEST(SteadyState, IntegrationPathAgreesWithDense) {
  const ModelParams p = crf(-2.4, 10);
  const SteadyState dense = steady_state(p, Basis::collective);
  SteadyStateOptions opt;
  opt.dense_limit = 4;
  const SteadyState integrated = steady_state(p, Basis::collective, opt);
  EXPECT_EQ(integrated.nullity, 0);
  EXPECT_TRUE(integrated.unique);
  EXPECT_LE(max_abs_entry(dense.rho.matrix() - integrated.rho.matrix()), 1e-8);
}

TEST(SteadyState, CrfLocalizesAtStableFixedPoint) {
  const ModelParams p = crf(-0.8, 40);
  const SteadyState s = steady_state(p, Basis::collective);
  EXPECT_TRUE(s.unique);
  const CollectiveOperators J = dicke_operators(40);
  const Vec3 mean((s.rho.matrix() * J.Jx()).trace().real(),
                  (s.rho.matrix() * J.Jy()).trace().real(),
                  (s.rho.matrix() * J.Jz).trace().real());
  Vec3 stable = Vec3::Zero();
  for (const auto& f : find_fixed_points(p))
    if (f.classification == Stability::stable) stable = f.location.vec();
  EXPECT_LE((mean / 20.0 - stable).norm(), 0.05);
}

TEST(SteadyState, FrozenCrfObservables) {
  struct Case {
    double bx, jy, jz, var_x;
  };
  for (const Case c : {Case{-0.8, 15.3599422054601, 12.316147482446, 15.9808623542439},
                       Case{-2.4, 6.09295450368947, 0.147981157290004, 131.707552069491}}) {
    const ModelParams p = crf(c.bx, 40);
    const SteadyState s = steady_state(p, Basis::collective);
    const CollectiveOperators J = dicke_operators(40);
    const CMat& rho = s.rho.matrix();
    const CMat Jx = J.Jx();
    const double mx = (rho * Jx).trace().real();
    EXPECT_NEAR((rho * J.Jy()).trace().real(), c.jy, 1e-8);
    EXPECT_NEAR((rho * J.Jz).trace().real(), c.jz, 1e-8);
    EXPECT_NEAR((rho * Jx * Jx).trace().real() - mx * mx, c.var_x, 1e-7);
  }
}
