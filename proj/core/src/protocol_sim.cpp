#include "qmoney/protocol_sim.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "qmoney/errors.hpp"

namespace qmoney {

CardInstance issue_card(std::size_t n, double mu, std::uint64_t seed) {
  if (n == 0) throw DomainError("issue_card: card length must be >= 1");
  if (!(mu >= 0.0)) throw DomainError("issue_card: mu must be >= 0");
  std::mt19937_64 rng(seed);
  CardInstance card;
  card.serial = rng();
  card.n = n;
  card.mu = mu;
  card.key.resize(n);
  card.basis.resize(n);
  std::uint64_t r = 0;
  for (std::size_t j = 0; j < n; ++j, r >>= 2) {
    if (j % 32 == 0) r = rng();
    card.key[j] = static_cast<std::uint8_t>(r & 1U);
    card.basis[j] = static_cast<std::uint8_t>((r >> 1) & 1U);
  }
  return card;
}

namespace {

// Bernoulli(p) as a single comparison against a uniform 64-bit draw.
std::uint64_t click_threshold(double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

}  // namespace

std::vector<std::uint8_t> random_challenges(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> c(n);
  std::uint64_t r = 0;
  for (std::size_t j = 0; j < n; ++j, r >>= 1) {
    if (j % 64 == 0) r = rng();
    c[j] = static_cast<std::uint8_t>(r & 1U);
  }
  return c;
}

ChallengeTranscript measure_honest(const CardInstance& card,
                                   const std::vector<std::uint8_t>& challenge,
                                   double eta_d, std::uint64_t seed) {
  if (challenge.size() != card.n) {
    throw ContractViolation("measure_honest: challenge length does not match the card");
  }
  if (!(eta_d >= 0.0 && eta_d <= 1.0)) throw DomainError("measure_honest: eta_d must lie in [0, 1]");

  std::mt19937_64 rng(seed);
  const std::uint64_t matched = click_threshold(-std::expm1(-eta_d * card.mu));
  const std::uint64_t split = click_threshold(-std::expm1(-eta_d * card.mu / 2.0));

  ChallengeTranscript t;
  t.challenge = challenge;
  t.answers.resize(card.n);
  for (std::size_t j = 0; j < card.n; ++j) {
    bool click[2] = {false, false};
    if (challenge[j] == card.basis[j]) {
      click[card.key[j]] = rng() < matched;
    } else {
      click[0] = rng() < split;
      click[1] = rng() < split;
    }
    if (click[0] && click[1]) {
      ++t.double_clicks;
      t.answers[j] = (rng() & 1U) ? Answer::kOne : Answer::kZero;
    } else if (click[0]) {
      t.answers[j] = Answer::kZero;
    } else if (click[1]) {
      t.answers[j] = Answer::kOne;
    } else {
      t.answers[j] = Answer::kNone;
    }
  }
  return t;
}

VerifyPolicy VerifyPolicy::honest(double mu, double eta_d, double kappa) {
  return {std::exp(-eta_d * mu), kappa};
}

Verdict bank_verify(const CardInstance& card, const ChallengeTranscript& transcript,
                    const VerifyPolicy& policy) {
  if (transcript.answers.size() != card.n || transcript.challenge.size() != card.n ||
      card.key.size() != card.n || card.basis.size() != card.n) {
    throw ContractViolation("bank_verify: transcript length does not match the card");
  }
  Verdict v;
  for (std::size_t j = 0; j < card.n; ++j) {
    const Answer a = transcript.answers[j];
    if (a == Answer::kNone) {
      ++v.no_detections;
      continue;
    }
    if (transcript.challenge[j] != card.basis[j]) continue;
    ++v.matched_answers;
    if (static_cast<std::uint8_t>(a) != card.key[j]) ++v.mismatches;
  }
  for (std::size_t j = 0; j < card.n; ++j) {
    if (transcript.challenge[j] == card.basis[j]) ++v.matched_positions;
  }

  const double n = static_cast<double>(card.n);
  v.expected_no_detections = policy.f_h * n;
  v.window = policy.kappa * std::sqrt(policy.f_h * (1.0 - policy.f_h) * n);

  std::ostringstream why;
  if (v.mismatches > 0) {
    why << v.mismatches << " matched-basis answers differ from the key";
  } else if (std::abs(static_cast<double>(v.no_detections) - v.expected_no_detections) > v.window) {
    why << v.no_detections << " no-detection reports, expected " << v.expected_no_detections
        << " +- " << v.window;
  }
  v.reason = why.str();
  v.accepted = v.reason.empty();
  return v;
}

}  // namespace qmoney
