#pragma once

// Batch experiment runner behind twofold-cli. A run is described by a JSON
// document; see README.md for the schema and the CSV column contracts.

#include "twofold/fields.hpp"
#include "twofold/hamiltonian.hpp"
#include "twofold/tolerances.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace twofold::experiment {

inline constexpr std::string_view kVersion = "0.3.0";

enum class Command { Analyze, Melnikov, Predict, Simulate, Verify };

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view s);

/// c * x^i * y^j
struct Monomial {
  double c = 0.0;
  int i = 0;
  int j = 0;
};

using Polynomial = std::vector<Monomial>;

/// amplitude * sin(frequency * t + phase) * poly(x, y); poly defaults to 1.
struct Forcing {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
  Polynomial poly{{1.0, 0, 0}};
};

struct InlineModel {
  std::array<Polynomial, 2> f_minus;
  std::array<std::vector<Forcing>, 2> g_minus;
  std::array<std::vector<Forcing>, 2> g_plus;
};

struct Grids {
  int theta = 32;
  int x = 16;
  std::optional<std::array<double, 2>> x_range;  // defaults to the annulus interior
  std::array<double, 2> fold_range{-3.0, 3.0};
  int sigma_table = 64;
};

struct SimulateSettings {
  std::optional<double> theta0;  // both default to the first prediction
  std::optional<double> x0;
  double y0 = 0.0;
  double periods = 2.0;
};

struct ExperimentConfig {
  std::string model_name = "hamiltonian-twofold";
  std::optional<InlineModel> inline_model;
  hamiltonian::Params params;
  std::vector<double> epsilons{1e-2};
  Grids grids;
  Tolerances tol;
  double tol_quad = 1e-9;
  SimulateSettings simulate;
  std::string output_dir = "out";
  std::string canonical;   // sorted-key JSON dump, output directory excluded
  std::uint64_t hash = 0;  // FNV-1a of `canonical`
};

/// Parses and validates; throws Error(ConfigInvalid) naming the offending field.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Replaces the epsilon list and refreshes the hash.
void override_epsilons(ExperimentConfig& cfg, std::vector<double> eps);

std::uint64_t fnv1a64(std::string_view bytes);

/// Resolves the registry name or inline spec at the given epsilon.
FilippovModel build_model(const ExperimentConfig& cfg, double epsilon = 0.0);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

struct RunResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> artifacts;
  std::string message;
};

/// Exit codes: 0 success, 2 config error, 3 hypothesis violated, 4 numerical failure.
int exit_code_for(const std::exception& e);

RunResult run(Command cmd, const ExperimentConfig& cfg, int jobs = 1);

/// Column contract per command, as printed by --help.
std::string_view csv_columns(Command c);

}  // namespace twofold::experiment
