#include "job.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <ostream>

namespace qmoney::cli {

std::string_view to_string(Command c) {
  switch (c) {
    case Command::kSolve: return "solve";
    case Command::kSweep: return "sweep";
    case Command::kTable3: return "table3";
    case Command::kCertify: return "certify";
    case Command::kLifetime: return "lifetime";
    case Command::kSimulate: return "simulate";
  }
  return "unknown";
}

std::optional<MemoryModel> JobConfig::memory() const {
  if (!use_memory && command != Command::kLifetime) return std::nullopt;
  return MemoryModel{eta_m0, tau_us};
}

ParseOutcome parse_job(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  JobConfig job;
  CLI::App app{"Security analysis of coherent-state quantum credit cards"};
  app.set_config("--config", "", "Read options from an INI file (key = value)");
  app.require_subcommand(1, 1);

  std::string scenario = "trusted";
  std::string mode = "loss";
  std::string format = "csv";
  bool no_timestamp = false;

  app.add_option("--scenario", scenario, "trusted | untrusted")
      ->check(CLI::IsMember({"trusted", "untrusted"}));
  app.add_flag("--randomized", job.phase_randomized, "Use phase-randomized states");
  app.add_option("--mu", job.mu, "Mean photon number");
  app.add_option("--eta-d", job.eta_d, "Detector efficiency");
  app.add_option("--e", job.e, "Error target");
  app.add_option("--n", job.n, "Repetitions in the SDP (trusted, pure only)");
  app.add_option("--mode", mode, "loss (minimize f_d) | error (minimize e)")
      ->check(CLI::IsMember({"loss", "error"}));
  app.add_flag("--memory", job.use_memory, "Apply the quantum-memory retrieval model");
  app.add_option("--eta-m0", job.eta_m0, "Initial memory retrieval efficiency");
  app.add_option("--tau", job.tau_us, "Memory dephasing time in microseconds");

  app.add_option("--mu-list", job.mu_list, "Grid of mu values")->delimiter(',');
  app.add_option("--e-list", job.e_list, "Grid of error targets")->delimiter(',');
  app.add_option("--eta-list", job.eta_list, "Grid of detector efficiencies")->delimiter(',');
  app.add_option("--scenarios", job.scenarios, "Scenario set, e.g. trusted,untrusted")
      ->delimiter(',')
      ->check(CLI::IsMember({"trusted", "untrusted"}));
  app.add_option("--families", job.families, "State families, e.g. pure,randomized")
      ->delimiter(',')
      ->check(CLI::IsMember({"pure", "randomized"}));

  app.add_option("-o,--output", job.output, "Output file (default stdout)");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--no-timestamp", no_timestamp, "Omit the timestamp header");
  app.add_option("--seed", job.seed, "Random seed");
  app.add_option("--workers", job.workers, "Concurrent solves in sweeps");
  app.add_flag("--slow", job.slow, "Include multi-minute computations");

  app.add_option("--length", job.card_length, "Card length for simulate");
  app.add_option("--trials", job.trials, "Cards per simulate grid point");
  app.add_option("--kappa", job.kappa, "Acceptance window in standard deviations");

  struct Sub {
    Command command;
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {Command::kSolve, "solve", "Solve one scenario"},
      {Command::kSweep, "sweep", "Solve a grid of scenarios"},
      {Command::kTable3, "table3", "Minimal error at the honest loss budget on the reference grid"},
      {Command::kCertify, "certify", "Dual certificates on the mu x e grid"},
      {Command::kLifetime, "lifetime", "Secure lifetimes with a decohering memory"},
      {Command::kSimulate, "simulate", "Monte Carlo of the honest protocol"},
  };
  std::vector<std::pair<CLI::App*, Command>> handles;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->fallthrough();
    handles.emplace_back(sub, s.command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    ParseOutcome r;
    r.exit_code = app.exit(e, out, err) == 0 ? 0 : 1;
    return r;
  }

  for (const auto& [sub, command] : handles) {
    if (sub->parsed()) job.command = command;
  }
  job.terminal = parse_terminal(scenario);
  job.mode = mode == "error" ? Mode::kError : Mode::kLoss;
  job.format = format == "json" ? Format::kJson : Format::kCsv;
  job.timestamp = !no_timestamp;
  return {job, 0};
}

namespace {

void check_range(const char* field, double v, double lo, double hi, bool open_lo = false) {
  const bool ok = std::isfinite(v) && (open_lo ? v > lo : v >= lo) && v <= hi;
  if (!ok) {
    throw UsageError(std::string(field) + ": value " + std::to_string(v) + " outside " +
                     (open_lo ? "(" : "[") + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace

void validate_job(const JobConfig& job) {
  check_range("mu", job.mu, 0.0, 1e3);
  check_range("eta-d", job.eta_d, 0.0, 1.0, true);
  check_range("e", job.e, 0.0, 0.5);
  check_range("eta-m0", job.eta_m0, 0.0, 1.0, true);
  check_range("tau", job.tau_us, 0.0, 1e9, true);
  check_range("kappa", job.kappa, 0.0, 1e3, true);
  for (double v : job.mu_list) check_range("mu-list", v, 0.0, 1e3);
  for (double v : job.e_list) check_range("e-list", v, 0.0, 0.5);
  for (double v : job.eta_list) check_range("eta-list", v, 0.0, 1.0, true);
  if (job.workers < 1) throw UsageError("workers: must be >= 1");
  if (job.n < 1) throw UsageError("n: must be >= 1");

  if (job.n > 1) {
    if (job.command != Command::kSolve) throw UsageError("n: only solve supports n > 1");
    if (job.terminal != Terminal::kTrusted || job.phase_randomized) {
      throw UsageError("n: n > 1 requires the trusted scenario with pure states");
    }
    if (job.mode != Mode::kLoss) throw UsageError("n: n > 1 requires mode loss");
  }

  switch (job.command) {
    case Command::kSweep:
      if (job.mu_list.empty()) throw UsageError("mu-list: sweep requires a non-empty mu grid");
      break;
    case Command::kLifetime:
      if (job.mode != Mode::kLoss) throw UsageError("mode: lifetime requires mode loss");
      break;
    case Command::kSimulate:
      if (job.card_length < 1) throw UsageError("length: must be >= 1");
      if (job.trials < 1) throw UsageError("trials: must be >= 1");
      break;
    case Command::kCertify:
      for (double v : job.e_list) {
        if (v <= 0.0) throw UsageError("e-list: certificates need e > 0");
      }
      break;
    default:
      break;
  }
}

}  // namespace qmoney::cli
