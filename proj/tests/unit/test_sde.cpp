#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pspin/coeffs.hpp"
#include "pspin/error.hpp"
#include "pspin/meanfield.hpp"
#include "pspin/sde.hpp"

using namespace pspin;

namespace {

ModelParams crf(int N) {
  ModelParams p;
  p.kappa_plus = 1.0;
  p.kappa_z = 1.0;
  p.B = Vec3(-0.8, 0, 0);
  p.N = N;
  return p;
}

SphericalPoint cart(double x, double y, double z) {
  return to_spherical(BlochVector{x, y, z}).point;
}

}  // namespace

TEST(Config, Validation) {
  SdeConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n_traj = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SdeConfig{};
  c.t_final = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SdeConfig{};
  c.n_output_times = 1;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SdeConfig{};
  c.pole_epsilon = 1e-12;
  EXPECT_THROW(c.validate(), InvalidArgument);
  ModelParams p;
  p.kappa_z = 4.0;
  EXPECT_DOUBLE_EQ(SdeConfig{}.step_for(p), 2.5e-4);
}

TEST(Step, ZeroNoiseIsEulerDriftStep) {
  const ModelParams p = crf(10);
  const SphericalPoint s{0.2, 1.0, 1.0};
  const double dt = 1e-3;
  const SphericalPoint next = sde_step(p, s, dt, Vec3::Zero());
  const DriftDiffusion c = drift_diffusion_spherical(p, s);
  EXPECT_NEAR(next.eta, s.eta + c.drift[0] * dt, 1e-15);
  EXPECT_NEAR(next.phi, s.phi + c.drift[1] * dt, 1e-15);
  EXPECT_EQ(next.r, 1.0);
}

TEST(Step, CollectiveDephasingIncrements) {
  ModelParams p;
  p.kappa_z = 1.5;
  p.N = 8;
  const double dt = 1e-3;
  const SphericalPoint s{0.1, 2.0, 1.0};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  constexpr int n = 100000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const Vec3 xi(g(rng), g(rng), g(rng));
    const SphericalPoint next = sde_step(p, s, dt, xi);
    ASSERT_EQ(next.eta, s.eta);
    double d = next.phi - s.phi;
    if (d > std::numbers::pi) d -= 2 * std::numbers::pi;
    if (d < -std::numbers::pi) d += 2 * std::numbers::pi;
    sum += d;
    sum2 += d * d;
  }
  const double var = 2.0 * p.kappa_z * dt / p.N;
  EXPECT_NEAR(sum / n, 0.0, 4.0 * std::sqrt(var / n));
  EXPECT_NEAR(sum2 / n, var, 4.0 * var * std::sqrt(2.0 / n));
}

TEST(Step, EtaIncrementVarianceAtEquator) {
  ModelParams p;
  p.kappa_plus = 0.6;
  p.kappa_minus = 0.3;
  p.kappa_z = 1.0;
  p.N = 5;
  const double dt = 1e-4;
  const SphericalPoint s{0.0, 0.7, 1.0};
  const double drift = drift_diffusion_spherical(p, s).drift[0] * dt;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  constexpr int n = 100000;
  double m1 = 0, m2 = 0;
  for (int i = 0; i < n; ++i) {
    const double d = sde_step(p, s, dt, Vec3(g(rng), g(rng), 0)).eta - s.eta - drift;
    m1 += d;
    m2 += d * d;
  }
  const double var = 2.0 * (p.kappa_plus + p.kappa_minus) * dt / p.N;
  const double sample_var = m2 / n - (m1 / n) * (m1 / n);
  EXPECT_NEAR(sample_var, var, 3.0 * var * std::sqrt(2.0 / n));
}

TEST(Step, SamplesStayAdmissible) {
  ModelParams p = crf(3);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  StepOptions opt;
  SphericalPoint s{1.0 - 1e-9, 0.0, 1.0};
  for (int i = 0; i < 20000; ++i) {
    s = sde_step(p, s, 1e-2, Vec3(g(rng), g(rng), g(rng)), opt);
    ASSERT_LE(std::abs(s.eta), 1.0 - opt.pole_epsilon);
    ASSERT_GE(s.phi, 0.0);
    ASSERT_LT(s.phi, 2 * std::numbers::pi);
  }
  ModelParams b;
  b.kappa_plus = b.kappa_minus = 0.5;
  b.gamma_minus = 0.7;
  b.gamma_z = 0.2;
  b.N = 3;
  opt.mode = SdeMode::ball;
  s = {0.3, 1.0, 0.9};
  for (int i = 0; i < 20000; ++i) {
    s = sde_step(b, s, 1e-2, Vec3(g(rng), g(rng), g(rng)), opt);
    ASSERT_LE(std::abs(s.eta), 1.0 - opt.pole_epsilon);
    ASSERT_GE(s.r, 0.0);
    ASSERT_LE(s.r, 1.0);
  }
}

TEST(Step, NegativeDiffusionRefusedUnlessClipped) {
  ModelParams p;
  p.kappa_plus = 3.0;
  p.kappa_z = 1.0;
  p.N = 4;
  const SphericalPoint s{0.9, 0.0, 1.0};
  ASSERT_LT(sphere_eigenvalues(p, s.eta).lambda2, 0.0);
  EXPECT_THROW(sde_step(p, s, 1e-3, Vec3(1, 1, 0)), NotPositiveSemidefinite);
  StepOptions opt;
  opt.clip_negative = true;
  EXPECT_NO_THROW(sde_step(p, s, 1e-3, Vec3(1, 1, 0), opt));
}

TEST(Sampling, RefusalAndModes) {
  ModelParams p;
  p.kappa_plus = 3.0;
  p.kappa_z = 1.0;
  SdeConfig c;
  try {
    check_sampling_allowed(p, c);
    FAIL();
  } catch (const ConditionViolation& e) {
    EXPECT_NE(std::string(e.what()).find("kappa_plus + kappa_minus"), std::string::npos);
  }
  c.force = true;
  EXPECT_NO_THROW(check_sampling_allowed(p, c));
  ModelParams local = crf(4);
  local.gamma_z = 0.1;
  EXPECT_THROW(check_sampling_allowed(local, SdeConfig{}), InvalidArgument);
  SdeConfig ball;
  ball.mode = SdeMode::ball;
  EXPECT_THROW(check_sampling_allowed(local, ball), ConditionViolation);
  local.kappa_minus = local.kappa_plus;
  EXPECT_NO_THROW(check_sampling_allowed(local, ball));
}

TEST(Ensemble, ForcedRunIsFlagged) {
  ModelParams p;
  p.kappa_plus = 3.0;
  p.kappa_z = 1.0;
  p.N = 10;
  SdeConfig c;
  c.force = true;
  c.n_traj = 5;
  c.t_final = 0.1;
  c.n_output_times = 3;
  const Ensemble e = run_ensemble(p, {0, 0, 1}, c);
  EXPECT_FALSE(e.physical);
  c.force = false;
  EXPECT_THROW(run_ensemble(p, {0, 0, 1}, c), ConditionViolation);
}

TEST(Ensemble, DeterministicAcrossThreadCounts) {
  const ModelParams p = crf(20);
  SdeConfig c;
  c.n_traj = 37;
  c.t_final = 1.0;
  c.n_output_times = 5;
  c.seed = 99;
  c.threads = 1;
  const Ensemble a = run_ensemble(p, {0, 0, 1}, c);
  c.threads = 4;
  const Ensemble b = run_ensemble(p, {0, 0, 1}, c);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t t = 0; t < a.samples.size(); ++t) {
    for (std::size_t i = 0; i < a.n_traj(); ++i) {
      ASSERT_EQ(a.samples[t][i].eta, b.samples[t][i].eta);
      ASSERT_EQ(a.samples[t][i].phi, b.samples[t][i].phi);
    }
  }
  c.seed = 100;
  const Ensemble d = run_ensemble(p, {0, 0, 1}, c);
  EXPECT_NE(a.samples.back()[0].eta, d.samples.back()[0].eta);
}

TEST(Ensemble, ShapeAndCoherentStart) {
  const ModelParams p = crf(20);
  SdeConfig c;
  c.n_traj = 8;
  c.t_final = 2.0;
  c.n_output_times = 9;
  const Ensemble e = run_ensemble(p, {0, 0, 1}, c);
  ASSERT_EQ(e.times.size(), 9u);
  EXPECT_DOUBLE_EQ(e.times.back(), 2.0);
  EXPECT_EQ(e.n_traj(), 8u);
  for (const auto& row : e.samples) EXPECT_EQ(row.size(), 8u);
  for (const auto& s : e.samples.front()) EXPECT_EQ(s.eta, e.samples.front()[0].eta);
  EXPECT_TRUE(e.physical);
}

TEST(Ensemble, ExplicitInitialSamples) {
  ModelParams p;
  p.kappa_z = 1.0;
  p.N = 4;
  SdeConfig c;
  c.n_traj = 3;
  c.t_final = 0.5;
  c.n_output_times = 2;
  const std::vector<SphericalPoint> init{{0.1, 0.2, 1.0}, {-0.3, 4.0, 1.0}, {0.5, 1.0, 1.0}};
  const Ensemble e = run_ensemble(p, init, c);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(e.samples[0][i].eta, init[i].eta);
    EXPECT_EQ(e.samples[1][i].eta, init[i].eta);
  }
  const std::vector<SphericalPoint> wrong(2);
  EXPECT_THROW(run_ensemble(p, wrong, c), InvalidArgument);
}

TEST(Observables, PoleExample) {
  Ensemble e;
  e.times = {0.0};
  e.samples = {std::vector<SphericalPoint>(10, SphericalPoint{1.0, 0.0, 1.0})};
  const ObservableSeries o = ensemble_observables(e, 12);
  EXPECT_DOUBLE_EQ(o.mean[0].z(), 6.0);
  EXPECT_NEAR(o.variance[0].z(), 0.0, 1e-12);
  EXPECT_EQ(o.mean_se[0].z(), 0.0);
}

TEST(Observables, EquatorExample) {
  Ensemble e;
  e.times = {0.0};
  e.samples = {std::vector<SphericalPoint>(5, cart(1, 0, 0))};
  const ObservableSeries o = ensemble_observables(e, 4);
  EXPECT_NEAR(o.mean[0].x(), 2.0, 1e-14);
  EXPECT_NEAR(o.variance[0].x(), 0.0, 1e-13);
  EXPECT_NEAR(o.variance[0].z(), 1.0, 1e-13);
}

TEST(Observables, MixtureMatchesCoherentMoments) {
  Ensemble e;
  e.times = {0.0};
  const std::vector<BlochVector> pts{{0.6, 0, 0.8}, {0, -1, 0}, {0, 0.28, -0.96}};
  for (const auto& r : pts) e.samples.resize(1), e.samples[0].push_back(to_spherical(r).point);
  const int N = 7;
  Vec3 first = Vec3::Zero(), second = Vec3::Zero();
  for (const auto& r : pts) {
    const CoherentMoments m = coherent_moments(r, N);
    first += m.first / 3.0;
    second += m.second.diagonal().real() / 3.0;
  }
  const ObservableSeries o = ensemble_observables(e, N);
  EXPECT_LE((o.mean[0] - first).norm(), 1e-12);
  EXPECT_LE((o.variance[0] - (second - first.cwiseProduct(first))).norm(), 1e-12);
}

TEST(Observables, CollectiveDephasingDecay) {
  ModelParams p;
  p.kappa_z = 1.0;
  p.N = 40;
  SdeConfig c;
  c.n_traj = 4000;
  c.t_final = 40.0;
  c.n_output_times = 11;
  c.dt = 0.01;
  const Ensemble e = run_ensemble(p, {1, 0, 0}, c);
  const ObservableSeries o = ensemble_observables(e, p.N);
  for (std::size_t k = 0; k < o.times.size(); ++k) {
    const double expected = 20.0 * std::exp(-p.kappa_z * o.times[k] / p.N);
    EXPECT_LE(std::abs(o.mean[k].x() - expected), 3.0 * o.mean_se[k].x() + 1e-4) << o.times[k];
  }
}

TEST(Observables, LargeNTracksMeanField) {
  const ModelParams p = crf(100000000);
  SdeConfig c;
  c.n_traj = 1;
  c.t_final = 10.0;
  c.n_output_times = 101;
  const Ensemble e = run_ensemble(p, {0, 0, 1}, c);
  const auto mf = integrate_meanfield(p, {0, 0, 1}, e.times);
  double sup = 0.0;
  for (std::size_t k = 0; k < e.times.size(); ++k)
    sup = std::max(sup, (to_cartesian(e.samples[k][0]).vec() - mf.states[k].vec())
                            .cwiseAbs()
                            .maxCoeff());
  EXPECT_LE(sup, 1e-2);
}

TEST(Density, SingleBin) {
  const std::vector<SphericalPoint> s(50, SphericalPoint{0.33, 2.0, 1.0});
  const SphereDensity d = density_estimate(s, 10, 20);
  int nonzero = 0;
  double total = 0.0;
  for (double v : d.values) {
    nonzero += v > 0.0;
    total += v;
    EXPECT_GE(v, 0.0);
  }
  EXPECT_EQ(nonzero, 1);
  EXPECT_DOUBLE_EQ(total, 1.0);
  EXPECT_NEAR(d.resultant_length, 1.0, 1e-14);
  EXPECT_NEAR(d.spread, 0.0, 1e-14);
}

TEST(Density, UniformSamplesFillBinsEvenly) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> eta(-1.0, 1.0), phi(0.0, 2 * std::numbers::pi);
  constexpr int n = 1000000;
  std::vector<SphericalPoint> s(n);
  for (auto& p : s) p = {eta(rng), phi(rng), 1.0};
  const int ne = 10, np = 20;
  const SphereDensity d = density_estimate(s, ne, np);
  const double q = 1.0 / (ne * np);
  const double sigma = std::sqrt(q * (1 - q) / n);
  double total = 0.0;
  for (double v : d.values) {
    EXPECT_LE(std::abs(v - q), 4.0 * sigma);
    total += v;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_LT(d.resultant_length, 0.01);
}
