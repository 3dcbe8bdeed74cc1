#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qmoney/scenario.hpp"

namespace qmoney::cli {

enum class Command { kSolve, kSweep, kTable3, kCertify, kLifetime, kSimulate };
enum class Format { kCsv, kJson };
enum class Mode { kLoss, kError };

std::string_view to_string(Command c);

struct JobConfig {
  Command command = Command::kSolve;

  // Single-point scenario (solve) and defaults for grids.
  Terminal terminal = Terminal::kTrusted;
  bool phase_randomized = false;
  double mu = 0.5;
  double eta_d = 1.0;
  double e = 0.0;
  std::size_t n = 1;
  Mode mode = Mode::kLoss;

  bool use_memory = false;
  double eta_m0 = 0.68;
  double tau_us = 15.0;

  // Grids; empty means "use the single-point value" except where a command
  // requires an explicit grid.
  std::vector<double> mu_list;
  std::vector<double> e_list;
  std::vector<double> eta_list;
  std::vector<std::string> scenarios;
  std::vector<std::string> families;  // "pure" | "randomized"

  std::string output;  // empty: stdout
  Format format = Format::kCsv;
  bool timestamp = true;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  bool slow = false;

  // simulate
  std::size_t card_length = 100000;
  std::size_t trials = 100;
  double kappa = 4.0;

  std::optional<MemoryModel> memory() const;
};

struct ParseOutcome {
  std::optional<JobConfig> job;
  int exit_code = 0;  // meaningful when job is empty (help, usage error)
};

// Parses flags and an optional --config file (INI: `key = value`, lists as
// `[a, b]`). Help and usage messages go to `out` / `err`.
ParseOutcome parse_job(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Throws UsageError naming the offending field.
void validate_job(const JobConfig& job);

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace qmoney::cli
