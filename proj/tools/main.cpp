#include <iostream>

#include "cli/job.hpp"
#include "cli/run.hpp"

int main(int argc, char** argv) {
  const auto parsed = qmoney::cli::parse_job(argc, argv, std::cout, std::cerr);
  if (!parsed.job) return parsed.exit_code;
  return qmoney::cli::run(*parsed.job, std::cout, std::cerr);
}
