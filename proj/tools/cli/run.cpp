#include "run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>

#include "qmoney/errors.hpp"
#include "qmoney/protocol_sim.hpp"
#include "qmoney/security.hpp"

namespace qmoney::cli {

namespace {

const std::vector<double> kCertifyMu{0.01, 0.05, 0.10, 0.50, 1.00, 2.00};
const std::vector<double> kCertifyE{1e-6, 1e-3, 0.01, 0.02, 0.05, 0.10};

struct TableBlock {
  const char* title;
  bool randomized;
  double eta_d;
  std::vector<double> mu;
};

const std::vector<TableBlock>& table3_blocks() {
  static const std::vector<TableBlock> blocks{
      {"Non phase-randomized, eta_d=100%", false, 1.0, {0.05, 0.10, 0.15, 0.25, 0.55}},
      {"Phase-randomized, eta_d=100%", true, 1.0, {0.50, 0.75, 1.00, 1.25, 1.50}},
      {"Phase-randomized, eta_d=80%", true, 0.8, {0.40, 0.60, 0.80, 1.00, 1.20}},
  };
  return blocks;
}

std::vector<Cell> standard_cells(const ScenarioConfig& c, const std::optional<SecurityReport>& r,
                                 const std::optional<double>& t_star) {
  std::vector<Cell> row{std::string(to_string(c.terminal)), c.phase_randomized, c.mu, c.eta_d,
                        c.error_target};
  if (r) {
    row.emplace_back(r->f_h);
    row.emplace_back(r->f_d ? Cell{*r->f_d} : Cell{});
    row.emplace_back(r->e_star ? Cell{*r->e_star} : Cell{});
    row.emplace_back(r->gap);
    row.emplace_back(r->secure);
  } else {
    row.emplace_back(honest_loss(c.mu, c.eta_d, 0.0, c.memory));
    row.insert(row.end(), 4, Cell{});
  }
  row.emplace_back(t_star ? Cell{*t_star} : Cell{});
  return row;
}

std::vector<std::string> columns_with(std::initializer_list<const char*> extra) {
  std::vector<std::string> cols = standard_columns();
  cols.emplace_back("status");
  for (const char* e : extra) cols.emplace_back(e);
  return cols;
}

RunResult sweep_table(const std::vector<ScenarioConfig>& points, const SweepOptions& opts) {
  RunResult res;
  res.table.columns = columns_with({});
  for (const SweepRow& row : sweep(points, opts)) {
    auto cells = standard_cells(row.config, row.report, row.t_star);
    if (row.failed()) {
      res.partial_failure = true;
      cells.emplace_back("failed: " + row.error);
    } else {
      cells.emplace_back(std::string(to_string(row.report->status)));
    }
    res.table.add_row(std::move(cells));
  }
  return res;
}

ScenarioConfig base_config(const JobConfig& job) {
  ScenarioConfig c;
  c.terminal = job.terminal;
  c.phase_randomized = job.phase_randomized;
  c.mu = job.mu;
  c.eta_d = job.eta_d;
  c.error_target = job.e;
  c.n = job.n;
  c.memory = job.memory();
  return c;
}

SweepGrid grid_from(const JobConfig& job) {
  SweepGrid g;
  g.terminals.clear();
  for (const auto& s : job.scenarios) g.terminals.push_back(parse_terminal(s));
  if (g.terminals.empty()) g.terminals.push_back(job.terminal);
  g.phase_randomized.clear();
  for (const auto& f : job.families) g.phase_randomized.push_back(f == "randomized");
  if (g.phase_randomized.empty()) g.phase_randomized.push_back(job.phase_randomized);
  g.eta_d = job.eta_list.empty() ? std::vector<double>{job.eta_d} : job.eta_list;
  g.e = job.e_list.empty() ? std::vector<double>{job.e} : job.e_list;
  g.mu = job.mu_list.empty() ? std::vector<double>{job.mu} : job.mu_list;
  return g;
}

SweepOptions sweep_options(const JobConfig& job, SweepMode mode) {
  SweepOptions o;
  o.mode = mode;
  o.workers = job.workers;
  o.memory = job.memory();
  o.lifetimes = mode == SweepMode::kMinLoss && o.memory.has_value();
  return o;
}

void print_percent_view(std::ostream& os, const Table& t) {
  // Row pairs (trusted, untrusted) in table3_points() order.
  const auto& blocks = table3_blocks();
  std::size_t r = 0;
  char line[128];
  std::snprintf(line, sizeof line, "%6s  %12s  %14s  %7s\n", "mu", "e, trusted", "e, untrusted", "f_h");
  os << line;
  for (const auto& b : blocks) {
    os << b.title << '\n';
    for (double mu : b.mu) {
      auto pct = [&](std::size_t row) -> std::string {
        const Cell& c = t.rows[row][7];
        if (!std::holds_alternative<double>(c)) return "failed";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * std::get<double>(c));
        return buf;
      };
      std::snprintf(line, sizeof line, "%6.2f  %12s  %14s  %6.1f%%\n", mu, pct(r).c_str(),
                    pct(r + 1).c_str(), 100.0 * std::exp(-b.eta_d * mu));
      os << line;
      r += 2;
    }
  }
}

RunResult certify_table(const JobConfig& job) {
  RunResult res;
  res.table.columns = columns_with({"valid", "d1", "d2", "d3", "max_off_diagonal",
                                    "trace_residual", "lmi_max_eigenvalue", "gap_tolerance"});
  const auto& mus = job.mu_list.empty() ? kCertifyMu : job.mu_list;
  const auto& es = job.e_list.empty() ? kCertifyE : job.e_list;
  for (double e : es) {
    for (double mu : mus) {
      ScenarioConfig c = base_config(job);
      c.mu = mu;
      c.error_target = e;
      c.memory.reset();
      std::vector<Cell> cells;
      try {
        const Certificate cert = certify(c);
        SecurityReport r;
        r.config = c;
        r.f_h = honest_loss(mu, c.eta_d);
        r.f_d = cert.solution.primal_value;
        r.secure = *r.f_d > r.f_h;
        r.gap = cert.solution.gap;
        r.status = cert.solution.status;
        cells = standard_cells(c, r, std::nullopt);
        const DualConditions& d = cert.conditions;
        std::string status = d.valid ? "valid" : "invalid:";
        for (const auto& f : d.failures) status += " " + f + ";";
        cells.emplace_back(status);
        cells.insert(cells.end(), {Cell{d.valid}, Cell{d.d1}, Cell{d.d2}, Cell{d.d3},
                                   Cell{d.max_off_diagonal}, Cell{d.trace_residual},
                                   Cell{d.lmi_max_eigenvalue}, Cell{d.gap_tolerance}});
        if (!d.valid) res.partial_failure = true;
      } catch (const SolverError& ex) {
        res.partial_failure = true;
        cells = standard_cells(c, std::nullopt, std::nullopt);
        cells.emplace_back(std::string("failed: ") + ex.what());
        cells.insert(cells.end(), 8, Cell{});
      }
      res.table.add_row(std::move(cells));
    }
  }
  return res;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RunResult simulate_table(const JobConfig& job) {
  RunResult res;
  res.table.columns = columns_with({"length", "trials", "acceptance_rate",
                                    "no_detection_fraction", "no_detection_z",
                                    "matched_error_rate", "double_click_fraction"});
  const std::vector<double> mus = job.mu_list.empty() ? std::vector<double>{0.1, 0.5, 1.0} : job.mu_list;
  const std::vector<double> etas = job.eta_list.empty() ? std::vector<double>{1.0, 0.8} : job.eta_list;
  std::uint64_t point = 0;
  for (double eta : etas) {
    for (double mu : mus) {
      const VerifyPolicy policy = VerifyPolicy::honest(mu, eta, job.kappa);
      std::size_t accepted = 0, none = 0, matched = 0, wrong = 0, doubles = 0;
      for (std::size_t trial = 0; trial < job.trials; ++trial) {
        const std::uint64_t s = mix(mix(job.seed, point), trial);
        const CardInstance card = issue_card(job.card_length, mu, mix(s, 0));
        const auto challenge = random_challenges(job.card_length, mix(s, 1));
        const ChallengeTranscript tr = measure_honest(card, challenge, eta, mix(s, 2));
        const Verdict v = bank_verify(card, tr, policy);
        accepted += v.accepted;
        none += v.no_detections;
        matched += v.matched_answers;
        wrong += v.mismatches;
        doubles += tr.double_clicks;
      }
      const double total = static_cast<double>(job.trials * job.card_length);
      const double frac = static_cast<double>(none) / total;
      const double sigma = std::sqrt(policy.f_h * (1.0 - policy.f_h) / total);
      std::vector<Cell> cells{std::string("honest"), false, mu, eta, Cell{}, policy.f_h,
                              Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, std::string("ok")};
      cells.insert(cells.end(),
                   {Cell{static_cast<double>(job.card_length)}, Cell{static_cast<double>(job.trials)},
                    Cell{static_cast<double>(accepted) / static_cast<double>(job.trials)},
                    Cell{frac}, Cell{sigma > 0 ? (frac - policy.f_h) / sigma : 0.0},
                    Cell{matched ? static_cast<double>(wrong) / static_cast<double>(matched) : 0.0},
                    Cell{static_cast<double>(doubles) / total}});
      res.table.add_row(std::move(cells));
      ++point;
    }
  }
  return res;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<ScenarioConfig> table3_points() {
  std::vector<ScenarioConfig> out;
  for (const auto& b : table3_blocks()) {
    for (double mu : b.mu) {
      for (Terminal t : {Terminal::kTrusted, Terminal::kUntrusted}) {
        ScenarioConfig c;
        c.terminal = t;
        c.phase_randomized = b.randomized;
        c.eta_d = b.eta_d;
        c.mu = mu;
        out.push_back(c);
      }
    }
  }
  return out;
}

RunResult execute(const JobConfig& job, std::ostream& view) {
  validate_job(job);
  switch (job.command) {
    case Command::kSolve: {
      const SweepMode mode = job.mode == Mode::kLoss ? SweepMode::kMinLoss : SweepMode::kMinError;
      return sweep_table({base_config(job)}, sweep_options(job, mode));
    }
    case Command::kSweep: {
      const SweepMode mode = job.mode == Mode::kLoss ? SweepMode::kMinLoss : SweepMode::kMinError;
      return sweep_table(expand_grid(grid_from(job)), sweep_options(job, mode));
    }
    case Command::kTable3: {
      SweepOptions o;
      o.mode = SweepMode::kMinError;
      o.workers = job.workers;
      RunResult res = sweep_table(table3_points(), o);
      print_percent_view(view, res.table);
      return res;
    }
    case Command::kCertify:
      return certify_table(job);
    case Command::kLifetime: {
      JobConfig j = job;
      if (j.eta_list.empty()) j.eta_list = {1.0, 0.95, 0.8};
      return sweep_table(expand_grid(grid_from(j)), sweep_options(j, SweepMode::kMinLoss));
    }
    case Command::kSimulate:
      return simulate_table(job);
  }
  throw std::logic_error("unhandled command");
}

int run(const JobConfig& job, std::ostream& out, std::ostream& err) {
  try {
    std::ofstream file;
    if (!job.output.empty()) {
      file.open(job.output);
      if (!file) throw UsageError("output: cannot open " + job.output);
    }
    std::ostream& sink = job.output.empty() ? out : file;
    std::ostream& view = job.output.empty() ? err : out;

    const RunResult res = execute(job, view);
    std::optional<std::string> stamp;
    if (job.timestamp) stamp = utc_timestamp();
    if (job.format == Format::kCsv) {
      std::optional<std::string> header;
      if (stamp) header = "generated " + *stamp + " by qmoney " + std::string(to_string(job.command));
      write_csv(sink, res.table, header);
    } else {
      write_json(sink, res.table, std::string(to_string(job.command)), stamp);
    }
    sink.flush();
    if (res.partial_failure) {
      err << "qmoney: some points failed; see the status column\n";
      return kExitPartial;
    }
    return kExitOk;
  } catch (const UsageError& ex) {
    err << "qmoney: usage error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& ex) {
    err << "qmoney: usage error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const CapacityError& ex) {
    err << "qmoney: usage error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "qmoney: internal error: " << ex.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace qmoney::cli
