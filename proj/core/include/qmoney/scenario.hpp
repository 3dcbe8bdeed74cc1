#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace qmoney {

enum class Terminal { kTrusted, kUntrusted };

std::string_view to_string(Terminal t);
// Accepts "trusted" / "untrusted"; throws DomainError otherwise.
Terminal parse_terminal(std::string_view name);

// Gaussian dephasing of a stored pulse: eta_m(t) = eta_m0 * exp(-t^2 / tau^2).
struct MemoryModel {
  double eta_m0 = 0.68;
  double tau_us = 15.0;

  double retrieval_efficiency(double t_us) const;
};

struct ScenarioConfig {
  Terminal terminal = Terminal::kTrusted;
  bool phase_randomized = false;
  double mu = 0.5;           // mean photon number per pulse
  double eta_d = 1.0;        // detector efficiency
  double error_target = 0.0; // adversarial error rate e
  std::size_t n = 1;         // parallel repetitions in the SDP
  std::optional<MemoryModel> memory;
  // Card length for the sqrt(n) acceptance windows; 0 disables them.
  std::size_t card_length = 0;

  // Throws DomainError on any out-of-range field.
  void validate() const;
};

}  // namespace qmoney
