#pragma once

// CHSH self-test run between Alice and Bob on a batch of shared pairs.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string_view>

#include "diqpq/bases_povm.hpp"
#include "diqpq/errors.hpp"
#include "diqpq/rng.hpp"

namespace diqpq {

inline const double kChshQuantumValue = [] {
  const double c = std::cos(std::numbers::pi / 8);
  return c * c;
}();

enum class Referee { Alice, Bob };

inline constexpr std::string_view to_string(Referee r) noexcept {
  return r == Referee::Alice ? "Alice" : "Bob";
}

struct ChshRound {
  unsigned u = 0;  // Alice's input
  unsigned v = 0;  // Bob's input
  unsigned b = 0;  // Bob's output
  unsigned c = 0;  // Alice's output
  unsigned win = 0;
};

struct ChshReport {
  std::size_t n = 0;
  double z_statistic = 0.0;
  double threshold = 0.0;
  bool aborted = false;
  Referee referee = Referee::Alice;
  // The referee's counterpart declares its input/output pairs first.
  Referee first_announcer = Referee::Bob;
};

// Device behaviour for the test rounds. The default is an ideal device.
struct ChshDevice {
  double flip_probability = 0.0;  // each output flipped independently
  bool uniform_outputs = false;   // outputs are fair coins, ignoring the state
};

inline MeasBasis chsh_bob_basis(unsigned v) {
  if (v > 1) throw ContractViolation("chsh_bob_basis: input must be a bit");
  return v == 0 ? MeasBasis(ket0(), ket1()) : MeasBasis(ket_plus(), ket_minus());
}

// u = 0: {cos(pi/8)|0> + sin(pi/8)|1>, -sin(pi/8)|0> + cos(pi/8)|1>}
// u = 1: {cos(pi/8)|0> - sin(pi/8)|1>,  sin(pi/8)|0> + cos(pi/8)|1>}
inline MeasBasis chsh_alice_basis(unsigned u) {
  if (u > 1) throw ContractViolation("chsh_alice_basis: input must be a bit");
  const double c = std::cos(std::numbers::pi / 8);
  const double s = std::sin(std::numbers::pi / 8);
  return u == 0 ? MeasBasis(PureState(c, s), PureState(-s, c))
                : MeasBasis(PureState(c, -s), PureState(s, c));
}

// Z_i = 1 iff b xor c == u and v.
inline constexpr unsigned chsh_win(unsigned u, unsigned v, unsigned b, unsigned c) noexcept {
  return ((b ^ c) & 1u) == ((u & v) & 1u) ? 1u : 0u;
}

inline double chsh_threshold(double eta) {
  if (!(eta >= 0.0) || !(eta < kChshQuantumValue))
    throw ContractViolation("CHSH noise tolerance eta must lie in [0, cos^2(pi/8))");
  return kChshQuantumValue - eta;
}

inline bool chsh_should_abort(double z, double eta) { return z < chsh_threshold(eta); }

inline ChshRound play_chsh_round(unsigned u, unsigned v, const ChshDevice& device, Rng& rng) {
  ChshRound r{u, v, 0, 0, 0};
  if (device.uniform_outputs) {
    r.b = rng.bit();
    r.c = rng.bit();
  } else {
    const EprOutcome o = sample_epr(chsh_bob_basis(v), chsh_alice_basis(u), rng);
    r.b = o.bob;
    r.c = o.alice;
  }
  if (device.flip_probability > 0.0) {
    if (rng.bernoulli(device.flip_probability)) r.b ^= 1u;
    if (rng.bernoulli(device.flip_probability)) r.c ^= 1u;
  }
  r.win = chsh_win(r.u, r.v, r.b, r.c);
  return r;
}

// Plays n rounds with inputs drawn by the referee. When `rounds_out` is
// non-empty it must hold n entries and receives every round.
inline ChshReport run_chsh_test(std::size_t n, double eta, Referee referee, Rng& rng,
                                const ChshDevice& device = {},
                                std::span<ChshRound> rounds_out = {}) {
  if (n == 0) throw ContractViolation("run_chsh_test: n must be at least 1");
  if (!rounds_out.empty() && rounds_out.size() != n)
    throw ContractViolation("run_chsh_test: round buffer size mismatch");
  const double threshold = chsh_threshold(eta);
  std::size_t wins = 0;
  for (std::size_t i = 0; i < n; ++i) {
    // The referee draws both inputs; order of the two draws is fixed so
    // either referee consumes the stream identically.
    const unsigned u = rng.bit();
    const unsigned v = rng.bit();
    const ChshRound r = play_chsh_round(u, v, device, rng);
    wins += r.win;
    if (!rounds_out.empty()) rounds_out[i] = r;
  }
  ChshReport rep;
  rep.n = n;
  rep.z_statistic = static_cast<double>(wins) / static_cast<double>(n);
  rep.threshold = threshold;
  rep.aborted = rep.z_statistic < threshold;
  rep.referee = referee;
  rep.first_announcer = referee == Referee::Alice ? Referee::Bob : Referee::Alice;
  return rep;
}

// Count-weighted merge of independent reports of the same test.
inline ChshReport merge_reports(const ChshReport& a, const ChshReport& b) {
  if (a.referee != b.referee || a.threshold != b.threshold)
    throw ContractViolation("merge_reports: reports belong to different tests");
  ChshReport m = a;
  m.n = a.n + b.n;
  m.z_statistic = (a.z_statistic * static_cast<double>(a.n) +
                   b.z_statistic * static_cast<double>(b.n)) /
                  static_cast<double>(m.n);
  m.aborted = m.z_statistic < m.threshold;
  return m;
}

}  // namespace diqpq
