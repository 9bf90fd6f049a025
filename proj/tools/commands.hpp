#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ioncrystal/trap_model.hpp"

namespace ioncrystal::cli {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // --check mismatch or I/O trouble
  kValidation = 2,
  kNonConvergence = 3,
  kPartial = 4,  // resonance collisions or failed sweep points
};

struct CommonOptions {
  std::string config_path;  // empty: built-in defaults
  std::filesystem::path out_dir = ".";
  bool check = false;
  std::optional<double> ring_dc, top_dc, bottom_dc;
};

struct StabilityOptions {
  CommonOptions common;
  VoltageAxis ring{0.0, 100.0, 1.0};
  VoltageAxis cap{0.0, 100.0, 1.0};
};

struct SolveOptions {
  CommonOptions common;
  std::size_t n_ions = 5;
  std::size_t seeds = 0;  // 0: default for N
  std::uint64_t rng_seed = 1;
  int max_iterations = 500;  // Newton iterations per seed
};

struct ModesOptions {
  SolveOptions solve;
  std::optional<VoltageAxis> sweep;  // ring voltage sweep
};

struct CouplingsOptions {
  SolveOptions solve;
  std::vector<double> detunings{1.001, 1.01, 1.1, 2.0, 11.0};
};

int run_stability(const StabilityOptions& opts, std::ostream& log);
int run_equilibrium(const SolveOptions& opts, std::ostream& log);
int run_modes(const ModesOptions& opts, std::ostream& log);
int run_couplings(const CouplingsOptions& opts, std::ostream& log);

/// Parses "start:stop:step" (or a single value).
VoltageAxis parse_axis(const std::string& text);
/// Comma-separated list; an empty string gives an empty list.
std::vector<double> parse_list(const std::string& text);

int main_entry(int argc, char** argv);

}  // namespace ioncrystal::cli
