#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dcqe::cli {

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitIoError = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "DCQE_OUT_DIR";

struct RunConfig {
  std::string command;

  std::optional<std::string> config_path;
  std::optional<std::string> arch;
  std::optional<std::size_t> n_x;
  std::optional<double> fringe_cycles;
  std::optional<double> phase0;
  std::optional<double> visibility;
  std::optional<double> q;
  bool coarse = false;

  std::uint64_t n = 100000;
  std::uint64_t seed = 1;

  std::optional<std::string> input;
  std::optional<std::string> problem_path;
  std::optional<std::string> mask_path;
  std::vector<double> loss_rates;
  std::optional<double> tol;
  std::string out_dir = ".";
};

/// Parses arguments (without the program name) and runs the command.
/// Errors are written to `err` as a JSON object.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dcqe::cli
