#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pspin/model.hpp"

namespace pspin {

enum class SdeMode { sphere, ball };

const char* to_string(SdeMode m) noexcept;

struct SdeConfig {
  /// Euler-Maruyama step; <= 0 selects 1e-3 / params.max_rate().
  double dt = 0.0;
  double t_final = 10.0;
  /// Uniform output grid on [0, t_final], both ends included.
  int n_output_times = 200;
  int n_traj = 1000;
  std::uint64_t seed = 1;
  SdeMode mode = SdeMode::sphere;
  /// Samples are kept in |eta| <= 1 - pole_epsilon (>= kPoleEpsilon).
  double pole_epsilon = 1e-9;
  /// Sample even if the Fokker-Planck condition fails; the ensemble is then
  /// flagged non-physical and negative diffusion eigenvalues are clipped.
  bool force = false;
  /// Worker threads; 0 uses the hardware concurrency. Results do not depend
  /// on this value.
  int threads = 0;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  double step_for(const ModelParams& params) const noexcept;
};

struct Ensemble {
  std::vector<double> times;
  /// samples[t][i]: trajectory i at output time t.
  std::vector<std::vector<SphericalPoint>> samples;
  ModelParams params;
  SdeConfig config;
  double dt = 0.0;
  bool physical = true;

  std::size_t n_traj() const noexcept { return samples.empty() ? 0 : samples.front().size(); }
};

struct StepOptions {
  SdeMode mode = SdeMode::sphere;
  double pole_epsilon = 1e-9;
  bool clip_negative = false;
};

/// One Euler-Maruyama step. `xi` holds standard normal draws for (eta, phi, r);
/// the Wiener increments are sqrt(dt) xi. Sphere mode ignores xi[2] and keeps
/// r = 1. Within sin(theta) < clamp(10 dt max_rate, 0.1, 0.5) of a pole (or
/// that close to the origin in ball mode) the step is taken in Cartesian
/// coordinates and mapped back, since the chart is singular there. Throws NotPositiveSemidefinite if the local diffusion has a negative
/// eigenvalue and clip_negative is off.
SphericalPoint sde_step(const ModelParams& params, const SphericalPoint& state, double dt,
                        const Vec3& xi, const StepOptions& options = {});

/// Initial chart point for a coherent start. At a pole the azimuth is taken
/// from the tangential part of the Cartesian drift there, and eta is pulled
/// in by the pole clamp.
SphericalPoint initial_point(const ModelParams& params, const BlochVector& r0, SdeMode mode,
                             double pole_epsilon);

/// Throws ConditionViolation unless the Fokker-Planck condition of the mode
/// holds or config.force is set. Also checks mode compatibility.
void check_sampling_allowed(const ModelParams& params, const SdeConfig& config);

/// Every trajectory starts from the coherent state alpha(r0).
Ensemble run_ensemble(const ModelParams& params, const BlochVector& r0, const SdeConfig& config);

/// Trajectory i starts from initial[i]; initial.size() must equal n_traj.
Ensemble run_ensemble(const ModelParams& params, std::span<const SphericalPoint> initial,
                      const SdeConfig& config);

struct ObservableSeries {
  std::vector<double> times;
  std::vector<Vec3> mean;         ///< <J_k>
  std::vector<Vec3> mean_se;      ///< Monte Carlo standard error of <J_k>
  std::vector<Vec3> variance;     ///< <J_k^2> - <J_k>^2 with coherent-state moments
  std::vector<Vec3> variance_se;  ///< delta-method standard error of the variance
};

ObservableSeries ensemble_observables(const Ensemble& ensemble, int N);

struct SphereDensity {
  int n_eta = 0;
  int n_phi = 0;
  /// Row-major (eta bin, phi bin); eta bins ascend from -1, phi bins from 0.
  std::vector<double> values;
  Vec3 mean_direction = Vec3::Zero();
  /// Length of the mean unit vector.
  double resultant_length = 0.0;
  /// 1 - resultant_length.
  double spread = 0.0;

  double at(int i_eta, int i_phi) const { return values.at(i_eta * n_phi + i_phi); }
};

SphereDensity density_estimate(const Ensemble& ensemble, std::size_t time_index, int n_eta,
                               int n_phi);

/// Same binning for a bare sample set.
SphereDensity density_estimate(std::span<const SphericalPoint> samples, int n_eta, int n_phi);

}  // namespace pspin
