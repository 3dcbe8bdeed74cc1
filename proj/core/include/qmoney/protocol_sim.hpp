#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qmoney {

// State of position j is beta_k with k = basis[j] + 2 * key[j]
// (|+>, |+i>, |->, |-i>).
struct CardInstance {
  std::uint64_t serial = 0;
  std::vector<std::uint8_t> key;
  std::vector<std::uint8_t> basis;
  std::size_t n = 0;
  double mu = 0.0;
};

enum class Answer : std::uint8_t { kZero = 0, kOne = 1, kNone = 2 };

struct ChallengeTranscript {
  std::vector<std::uint8_t> challenge;  // c_j in {0, 1}
  std::vector<Answer> answers;
  std::size_t double_clicks = 0;
};

// Throws DomainError for n = 0 or mu < 0.
CardInstance issue_card(std::size_t n, double mu, std::uint64_t seed);

std::vector<std::uint8_t> random_challenges(std::size_t n, std::uint64_t seed);

// Poisson click model: a matching challenge puts intensity mu on the detector
// of the key bit, a mismatched one mu/2 on each detector. No click gives
// kNone, a double click a uniformly random bit.
ChallengeTranscript measure_honest(const CardInstance& card,
                                   const std::vector<std::uint8_t>& challenge,
                                   double eta_d, std::uint64_t seed);

struct VerifyPolicy {
  double f_h = 0.0;    // expected no-detection fraction
  double kappa = 4.0;  // window half-width in binomial standard deviations

  static VerifyPolicy honest(double mu, double eta_d, double kappa = 4.0);
};

struct Verdict {
  bool accepted = false;
  std::size_t matched_positions = 0;
  std::size_t matched_answers = 0;  // non-empty answers at matched positions
  std::size_t mismatches = 0;
  std::size_t no_detections = 0;
  double expected_no_detections = 0.0;
  double window = 0.0;
  std::string reason;  // empty when accepted
};

// Throws ContractViolation when the transcript does not match the card.
Verdict bank_verify(const CardInstance& card, const ChallengeTranscript& transcript,
                    const VerifyPolicy& policy);

}  // namespace qmoney
