#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../oracles.hpp"
#include "qmoney/operators.hpp"
#include "qmoney/protocol_sim.hpp"
#include "qmoney/security.hpp"

using namespace qmoney;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome(bool slow)> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome qubit_baselines(bool) {
  const double t = qubit_baseline(Terminal::kTrusted);
  const double u = qubit_baseline(Terminal::kUntrusted);
  const bool ok = std::abs(t - 0.25) <= 1e-5 && std::abs(u - 0.125) <= 1e-5;
  return {ok, fmt("trusted=%.6f (want 0.25) untrusted=%.6f (want 0.125)", t, u)};
}

struct Table3Row {
  bool randomized;
  double eta_d;
  double mu;
  double e_trusted_pct;
  double e_untrusted_pct;
  double f_h_pct;
  bool f_h_typo;
};

const std::vector<Table3Row>& table3() {
  static const std::vector<Table3Row> rows{
      {false, 1.0, 0.05, 0.1, 0.1, 95.1, false}, {false, 1.0, 0.10, 0.3, 0.1, 90.5, false},
      {false, 1.0, 0.15, 0.4, 0.1, 86.1, false}, {false, 1.0, 0.25, 0.5, 0.0, 77.9, false},
      {false, 1.0, 0.55, 0.7, 0.0, 57.7, false}, {true, 1.0, 0.50, 2.2, 1.1, 60.1, true},
      {true, 1.0, 0.75, 2.6, 1.3, 47.2, false},  {true, 1.0, 1.00, 2.7, 1.3, 36.8, false},
      {true, 1.0, 1.25, 2.6, 1.3, 28.7, false},  {true, 1.0, 1.50, 2.4, 1.2, 22.3, false},
      {true, 0.8, 0.40, 1.1, 0.2, 72.6, false},  {true, 0.8, 0.60, 1.4, 0.2, 61.9, false},
      {true, 0.8, 0.80, 1.5, 0.2, 52.7, false},  {true, 0.8, 1.00, 1.5, 0.1, 44.9, false},
      {true, 0.8, 1.20, 1.5, 0.1, 38.3, false},
  };
  return rows;
}

Outcome table3_reproduction(bool) {
  std::vector<ScenarioConfig> pts;
  for (const auto& r : table3()) {
    for (Terminal t : {Terminal::kTrusted, Terminal::kUntrusted}) {
      ScenarioConfig c;
      c.terminal = t;
      c.phase_randomized = r.randomized;
      c.eta_d = r.eta_d;
      c.mu = r.mu;
      pts.push_back(c);
    }
  }
  SweepOptions opts;
  opts.mode = SweepMode::kMinError;
  const auto rows = sweep(pts, opts);

  bool ok = true;
  double worst = 0.0;
  std::ostringstream bad;
  for (std::size_t i = 0; i < table3().size(); ++i) {
    const auto& r = table3()[i];
    for (int k = 0; k < 2; ++k) {
      const auto& row = rows[2 * i + k];
      const double want = k == 0 ? r.e_trusted_pct : r.e_untrusted_pct;
      if (row.failed()) {
        ok = false;
        bad << " [mu=" << r.mu << " failed: " << row.error << "]";
        continue;
      }
      const double got = 100.0 * *row.report->e_star;
      worst = std::max(worst, std::abs(got - want));
      if (std::abs(got - want) > 0.2) {
        ok = false;
        bad << fmt(" [%s mu=%.2f eta=%.1f %s: %.3f%% vs %.1f%%]", r.randomized ? "rand" : "pure", r.mu,
                   r.eta_d, k == 0 ? "trusted" : "untrusted", got, want);
      }
    }
    const double f_h = honest_loss(r.mu, r.eta_d);
    const double formula = std::exp(-r.eta_d * r.mu);
    const double printed = r.f_h_typo ? std::round(1000.0 * formula) / 10.0 : r.f_h_pct;
    if (std::abs(f_h - formula) > 1e-12 || std::abs(100.0 * f_h - printed) > 0.05 + 1e-9) {
      ok = false;
      bad << fmt(" [f_h mu=%.2f: %.4f vs %.1f%%]", r.mu, f_h, printed);
    }
  }
  return {ok, fmt("30 cells, max |e - reference| = %.3f pp; f_h to 3 decimals (mu=0.50 randomized vs 0.607, "
                  "printed 60.1%% flagged as typo)",
                  worst) +
                  bad.str()};
}

Outcome crossing(bool) {
  std::vector<ScenarioConfig> pts;
  const int points = 20;
  for (int i = 0; i < points; ++i) {
    ScenarioConfig c;
    c.mu = 1.50 + 0.025 * i;  // 1.500 .. 1.975
    pts.push_back(c);
  }
  const auto rows = sweep(pts, {});
  std::vector<double> mu, diff;
  for (const auto& r : rows) {
    if (r.failed()) return {false, "solve failed at mu=" + std::to_string(r.config.mu) + ": " + r.error};
    mu.push_back(r.config.mu);
    diff.push_back(*r.report->f_d - r.report->f_h);
  }
  const double tol = 1e-6;
  std::size_t k = 0;
  while (k < mu.size() && diff[k] > tol) ++k;
  if (k == 0 || k == mu.size()) return {false, "crossing not bracketed by the grid"};
  // Secant through the last two points above the tolerance, kept inside the bracket.
  double root = mu[k - 1];
  if (k >= 2) {
    const double slope = (diff[k - 1] - diff[k - 2]) / (mu[k - 1] - mu[k - 2]);
    if (slope < 0) root = std::clamp(mu[k - 1] - diff[k - 1] / slope, mu[k - 1], mu[k]);
  }
  const bool ok = std::abs(root - 1.7) <= 0.05;
  return {ok, fmt("f_d(mu) = exp(-mu) at mu* = %.4f (bracket [%.3f, %.3f], want 1.70 +- 0.05)", root,
                  mu[k - 1], mu[k])};
}

Outcome certificates(bool) {
  const std::vector<double> mus{0.01, 0.05, 0.10, 0.50, 1.00, 2.00};
  const std::vector<double> es{1e-6, 1e-3, 0.01, 0.02, 0.05, 0.10};
  bool ok = true;
  double worst_d3 = 0, worst_off = 0, worst_tr = 0, worst_gap = 0;
  std::ostringstream bad;
  for (double e : es) {
    for (double mu : mus) {
      ScenarioConfig c;
      c.mu = mu;
      c.error_target = e;
      try {
        const Certificate cert = certify(c);
        const DualConditions& d = cert.conditions;
        worst_d3 = std::max(worst_d3, std::abs(d.d3 - 0.5));
        worst_off = std::max(worst_off, d.max_off_diagonal);
        worst_tr = std::max(worst_tr, std::abs(d.trace_residual));
        worst_gap = std::max(worst_gap, d.gap);
        const bool pass = d.valid && std::abs(d.d3 - 0.5) <= 1e-3 && d.d1 < 0 && d.d2 < 0 &&
                          d.max_off_diagonal <= 1e-6 && std::abs(d.trace_residual) <= 1e-4 &&
                          d.gap <= d.gap_tolerance;
        if (!pass) {
          ok = false;
          bad << fmt(" [mu=%.2f e=%g:", mu, e);
          for (const auto& f : d.failures) bad << ' ' << f;
          bad << ']';
        }
      } catch (const std::exception& ex) {
        ok = false;
        bad << fmt(" [mu=%.2f e=%g: %s]", mu, e, ex.what());
      }
    }
  }
  return {ok, fmt("36 points: max|d3-0.5|=%.2e max offdiag(D)=%.2e max trace residual=%.2e max gap=%.2e",
                  worst_d3, worst_off, worst_tr, worst_gap) +
                  bad.str()};
}

Outcome parallel_repetition(bool slow) {
  ScenarioConfig c;
  c.mu = 0.5;
  c.error_target = 0.01;
  c.n = 2;
  const ParallelCheck p = tensor_parallel_check(c, slow);
  bool ok = p.max_residual <= 1e-6 && std::abs(p.tensor_objective - p.f_d1) <= 1e-6;
  std::string detail = fmt("mu=0.5 e=0.01: f_d(1)=%.7f tensor objective=%.7f max residual=%.2e min eig=%.2e",
                           p.f_d1, p.tensor_objective, p.max_residual, p.min_eigenvalue);
  if (slow) {
    if (!p.f_d2) {
      ok = false;
      detail += "; full n=2 solve did not converge";
    } else {
      ok = ok && std::abs(*p.f_d2 - p.f_d1) <= 1e-4;
      detail += fmt("; full n=2 f_d=%.7f (|diff|=%.2e)", *p.f_d2, std::abs(*p.f_d2 - p.f_d1));
    }
  } else {
    detail += "; full n=2 solve skipped (use --slow)";
  }
  return {ok, detail};
}

Outcome choi_identity(bool) {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::uniform_int_distribution<int> dim(1, 4);
    const int d_in = dim(rng), d_out = dim(rng);
    const int min_rank = (d_in + d_out - 1) / d_out;
    const int rank = std::uniform_int_distribution<int>(min_rank, 4)(rng);
    const auto kraus = oracle::random_kraus(d_in, d_out, rank, rng);
    const std::vector<ComplexMatrix> k(kraus.begin(), kraus.end());
    const auto r = choi_identity_check(k, oracle::random_unit(d_in, rng), oracle::random_unit(d_out, rng));
    worst = std::max(worst, std::abs(r.lhs - r.rhs));
  }
  return {worst <= 1e-12, fmt("100 instances, max |direct - Choi| = %.2e", worst)};
}

Outcome honest_monte_carlo(bool) {
  const std::size_t n = 100000, trials = 1000;
  bool ok = true;
  std::ostringstream out;
  std::uint64_t seed = 77;
  for (double eta : {1.0, 0.8}) {
    for (double mu : {0.1, 0.5, 1.0}) {
      const VerifyPolicy policy = VerifyPolicy::honest(mu, eta);
      std::size_t accepted = 0, none = 0, wrong = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        const CardInstance card = issue_card(n, mu, seed++);
        const ChallengeTranscript tr = measure_honest(card, random_challenges(n, seed++), eta, seed++);
        const Verdict v = bank_verify(card, tr, policy);
        accepted += v.accepted;
        none += v.no_detections;
        wrong += v.mismatches;
      }
      const double total = static_cast<double>(n * trials);
      const double p = std::exp(-eta * mu);
      const double z = (static_cast<double>(none) / total - p) / std::sqrt(p * (1 - p) / total);
      const double rate = static_cast<double>(accepted) / static_cast<double>(trials);
      const bool pass = wrong == 0 && std::abs(z) <= 4.0 && rate >= 0.999;
      ok = ok && pass;
      out << fmt(" [mu=%.1f eta=%.1f: accept=%.4f z=%+.2f wrong=%zu]", mu, eta, rate, z, wrong);
    }
  }
  return {ok, fmt("n=1e5, %zu cards per point:", trials) + out.str()};
}

Outcome memory_lifetime(bool) {
  ScenarioConfig c;
  c.phase_randomized = true;
  c.mu = 0.5;
  c.memory = MemoryModel{};
  std::vector<double> ts;
  const std::vector<double> etas{1.0, 0.95, 0.9, 0.85, 0.8};
  for (double eta : etas) {
    c.eta_d = eta;
    ts.push_back(secure_lifetime(c));
  }
  const double t0 = ts.front();
  bool ok = std::isfinite(t0) && t0 > 0.0 && t0 >= 1.0 && t0 < 10.0;
  std::string detail = fmt("t* (eta_d=1) = %.3f us; eta_d 1.0..0.8:", t0);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    detail += fmt(" %.3f", ts[i]);
    if (i > 0 && !(ts[i] < ts[i - 1] || (ts[i] == 0.0 && ts[i - 1] == 0.0))) ok = false;
  }
  return {ok, detail};
}

Outcome randomization_benefit(bool) {
  ScenarioConfig pure;
  pure.mu = 1.0;
  pure.error_target = 0.01;
  ScenarioConfig rnd = pure;
  rnd.phase_randomized = true;
  const double a = *min_loss_sdp(pure).f_d;
  const double b = *min_loss_sdp(rnd).f_d;
  return {b > a, fmt("mu=1 e=0.01: f_d randomized=%.6f > pure=%.6f", b, a)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks; prints one PASS/FAIL line per criterion"};
  int only = 0;
  bool slow = false;
  app.add_option("--criterion", only, "Run a single criterion (1-9)")->check(CLI::Range(1, 9));
  app.add_flag("--slow", slow, "Include the full n=2 solve");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "qubit baselines", 10.0, qubit_baselines},
      {2, "minimal-error table", 900.0, table3_reproduction},
      {3, "secure-region crossing", 300.0, crossing},
      {4, "dual certificates", 600.0, certificates},
      {5, "parallel repetition", 1800.0, parallel_repetition},
      {6, "Choi identity", 5.0, choi_identity},
      {7, "honest Monte Carlo", 60.0, honest_monte_carlo},
      {8, "memory lifetime", 600.0, memory_lifetime},
      {9, "phase-randomization benefit", 300.0, randomization_benefit},
  };

  int failures = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(slow);
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs <= c.budget_s;
    const bool pass = o.pass && in_budget;
    failures += !pass;
    std::printf("[%s] C%d %s: %s (%.1f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_budget ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
