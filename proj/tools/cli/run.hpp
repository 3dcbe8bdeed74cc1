#pragma once

#include <iosfwd>
#include <vector>

#include "job.hpp"
#include "output.hpp"
#include "qmoney/scenario.hpp"

namespace qmoney::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPartial = 2;
inline constexpr int kExitInternal = 3;

// Rows of the minimal-error table: for each (family, eta_d, mu) a trusted and
// an untrusted point.
std::vector<ScenarioConfig> table3_points();

struct RunResult {
  Table table;
  bool partial_failure = false;
};

// Computes the table without writing anything. Throws UsageError for invalid
// jobs.
RunResult execute(const JobConfig& job, std::ostream& view);

// Executes and writes the artifact; returns the process exit code.
int run(const JobConfig& job, std::ostream& out, std::ostream& err);

}  // namespace qmoney::cli
