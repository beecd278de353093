#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pspin/error.hpp"
#include "pspin/exact.hpp"
#include "pspin/model.hpp"
#include "pspin/sde.hpp"

namespace pspin::cli {

enum class Command { coeffs, meanfield, fixed_points, sample, exact, compare, verify, density };

std::optional<Command> parse_command(std::string_view name);
const char* to_string(Command c) noexcept;

struct SimSection {
  double dt = 0.0;  ///< 0 picks each solver's default
  double t_final = 10.0;
  int n_output_times = 200;
  int n_traj = 1000;  ///< 0 with a sample-file start: one path per sample
  std::uint64_t seed = 1;
  std::string mode = "auto";   ///< sphere | ball | auto
  std::string basis = "auto";  ///< collective | full | auto
  bool force = false;
  int threads = 0;
  double pole_epsilon = 1e-9;
  bool adaptive = false;  ///< mean-field step halving
};

struct InitialSection {
  enum class Type { coherent, samples };
  Type type = Type::coherent;
  BlochVector r{0.0, 0.0, 1.0};
  std::filesystem::path path;
};

struct OutputSection {
  std::filesystem::path directory = ".";
  bool svg = false;
  bool json = true;
};

struct MeanFieldSection {
  int n_seeds = 64;
  int portrait_seeds = 0;
};

struct VerifySection {
  int n_params = 20;
  int n_points = 10;
  int max_N = 4;
  double tolerance = 1e-8;
};

struct DensitySection {
  int n_eta = 20;
  int n_phi = 40;
  std::vector<int> N_values;  ///< empty: model.N only
};

struct RunConfig {
  ModelParams model;
  std::string rate_unit = "reference rate";
  SimSection sim;
  InitialSection initial;
  OutputSection output;
  MeanFieldSection meanfield;
  VerifySection verify;
  DensitySection density;

  SdeMode sde_mode() const;
  Basis exact_basis() const;
  SdeConfig sde_config() const;

  /// Parameter echo written into every output. Execution-only settings
  /// (threads, output location) are left out so reruns stay byte-identical.
  nlohmann::ordered_json echo() const;
};

/// Parses and validates a JSON config. Errors are InvalidArgument whose
/// field() is the dotted key path, e.g. "model.gamma_minus".
RunConfig parse_config(std::string_view text);

/// Reads the file (IoError on failure) and parses it.
RunConfig load_config(const std::filesystem::path& path);

/// Re-runs validation after command-line overrides.
void validate(const RunConfig& config);

/// Reads (eta, phi[, r]) rows; '#' lines and a non-numeric header are skipped.
std::vector<SphericalPoint> load_samples(const std::filesystem::path& path);

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pspin::cli
