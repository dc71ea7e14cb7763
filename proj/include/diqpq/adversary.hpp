#pragma once

// Dishonest-party strategies and their empirical success against the
// closed-form bounds. Attacks act independently on each pair; final-key
// figures group consecutive rounds into k-blocks.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>

#include "diqpq/bases_povm.hpp"
#include "diqpq/bounds.hpp"
#include "diqpq/errors.hpp"
#include "diqpq/qmath.hpp"
#include "diqpq/rng.hpp"

namespace diqpq {

enum class AttackKind { AliceHelstrom, AliceUSD, BobMiddleState };

inline constexpr std::string_view to_string(AttackKind k) noexcept {
  switch (k) {
    case AttackKind::AliceHelstrom: return "alice-helstrom";
    case AttackKind::AliceUSD: return "alice-usd";
    case AttackKind::BobMiddleState: return "bob-middle";
  }
  return "unknown";
}

inline std::optional<AttackKind> parse_attack_kind(std::string_view tag) {
  for (AttackKind k : {AttackKind::AliceHelstrom, AttackKind::AliceUSD, AttackKind::BobMiddleState})
    if (tag == to_string(k)) return k;
  return std::nullopt;
}

// Statistical slack used by respects_bound: 4 binomial standard deviations.
inline constexpr double kBoundSigmas = 4.0;

struct AttackReport {
  AttackKind kind = AttackKind::AliceHelstrom;
  double theta = 0.0;
  std::size_t rounds = 0;
  std::size_t k = 1;

  // AliceHelstrom: fraction of raw bits guessed correctly.
  // AliceUSD: fraction of raw bits learned conclusively (and correctly).
  // BobMiddleState: fraction of Alice's conclusive bits that agree with an
  // independent uniform reference key.
  double per_bit_success = 0.0;
  // Fraction of rounds in which the party holding the POVM commits to a bit.
  double conclusive_rate = 0.0;
  // Fraction of committed bits that equal Bob's actual raw bit.
  double conclusive_accuracy = 0.0;
  std::size_t inconclusive_count = 0;
  double theoretical_bound = 0.0;
  double sigma = 0.0;
  bool respects_bound = false;
  bool correctness_preserved = true;

  // k-block figures. The block event is: all k raw guesses correct
  // (AliceHelstrom), all k raw bits conclusive (AliceUSD, BobMiddleState).
  std::size_t blocks = 0;
  double block_success = 0.0;
  double block_bound = 0.0;
  double block_sigma = 0.0;
  bool block_respects_bound = false;
  // AliceHelstrom only: fraction of blocks whose XOR of guesses equals the
  // final-key bit. Informational; not compared against block_bound.
  double block_parity_success = 0.0;
};

// AliceHelstrom: (1/2 + 1/2 sin)^k. AliceUSD and the index-guessing bound
// against a dishonest Bob: (1 - cos)^k.
inline double final_key_guess_bound(const Theta& theta, std::size_t k, AttackKind strategy) {
  if (k == 0) throw ContractViolation("final_key_guess_bound: k must be positive");
  const double base = strategy == AttackKind::AliceHelstrom ? helstrom_bound(theta)
                                                            : conclusive_fraction(theta);
  return std::pow(base, static_cast<double>(k));
}

namespace detail {

inline double binomial_sigma(double p, std::size_t n) {
  return n == 0 ? 0.0 : std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

inline bool within_bound(double value, double bound, double sigma) {
  return value <= bound + kBoundSigmas * sigma + 1e-12;
}

// Accumulates per-round results into k-blocks.
class BlockCounter {
 public:
  explicit BlockCounter(std::size_t k) : k_(k) {}

  void push(bool event, unsigned parity_guess, unsigned parity_truth) {
    all_ = all_ && event;
    guess_ ^= parity_guess;
    truth_ ^= parity_truth;
    if (++fill_ == k_) {
      ++blocks_;
      hits_ += all_ ? 1 : 0;
      parity_hits_ += guess_ == truth_ ? 1 : 0;
      fill_ = 0;
      all_ = true;
      guess_ = truth_ = 0;
    }
  }

  std::size_t blocks() const noexcept { return blocks_; }
  double rate() const noexcept { return blocks_ ? double(hits_) / double(blocks_) : 0.0; }
  double parity_rate() const noexcept {
    return blocks_ ? double(parity_hits_) / double(blocks_) : 0.0;
  }

 private:
  std::size_t k_;
  std::size_t fill_ = 0, blocks_ = 0, hits_ = 0, parity_hits_ = 0;
  bool all_ = true;
  unsigned guess_ = 0, truth_ = 0;
};

inline void finish_blocks(AttackReport& rep, const BlockCounter& bc, const Theta& theta) {
  rep.blocks = bc.blocks();
  rep.block_success = bc.rate();
  rep.block_parity_success = bc.parity_rate();
  rep.block_bound = final_key_guess_bound(theta, rep.k, rep.kind);
  rep.block_sigma = binomial_sigma(rep.block_bound, rep.blocks);
  rep.block_respects_bound = within_bound(rep.block_success, rep.block_bound, rep.block_sigma);
}

inline void require_rounds(std::size_t rounds, std::size_t k) {
  if (rounds == 0) throw ContractViolation("attack: rounds must be at least 1");
  if (k == 0) throw ContractViolation("attack: k must be positive");
}

}  // namespace detail

// Dishonest Alice measures each collapsed qubit in the Helstrom basis for the
// announced ensemble {|a>, |a'>} and always guesses.
inline AttackReport attack_alice_helstrom(const Theta& theta, std::size_t rounds, Rng& rng,
                                          std::size_t k = 2) {
  detail::require_rounds(rounds, k);
  const std::array<MeasBasis, 2> bob{key_basis(0, theta), key_basis(1, theta)};
  // Outcome 0 of helstrom[a] means "R = 0" (state |a>), outcome 1 "R = 1".
  std::array<std::optional<MeasBasis>, 2> helstrom;
  for (unsigned a = 0; a < 2; ++a) {
    const auto [pos, neg] = helstrom_measurement(Operator2::projector(bob[0][a]),
                                                 Operator2::projector(bob[1][a]));
    helstrom[a].emplace(pos, neg);
  }

  AttackReport rep;
  rep.kind = AttackKind::AliceHelstrom;
  rep.theta = theta.radians();
  rep.rounds = rounds;
  rep.k = k;
  detail::BlockCounter bc(k);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < rounds; ++i) {
    const unsigned r = rng.bit();
    unsigned a = 0;
    const PureState collapsed = collapse_epr(bob[r], rng, a);
    const unsigned guess = sample_basis(*helstrom[a], collapsed, rng);
    correct += guess == r ? 1 : 0;
    bc.push(guess == r, guess, r);
  }
  rep.per_bit_success = double(correct) / double(rounds);
  rep.conclusive_rate = 1.0;
  rep.conclusive_accuracy = rep.per_bit_success;
  rep.theoretical_bound = helstrom_bound(theta);
  rep.sigma = detail::binomial_sigma(rep.theoretical_bound, rounds);
  rep.respects_bound = detail::within_bound(rep.per_bit_success, rep.theoretical_bound, rep.sigma);
  detail::finish_blocks(rep, bc, theta);
  return rep;
}

// Dishonest Alice uses the optimal unambiguous discrimination POVM.
inline AttackReport attack_alice_usd(const Theta& theta, std::size_t rounds, Rng& rng,
                                     std::size_t k = 2) {
  detail::require_rounds(rounds, k);
  const std::array<MeasBasis, 2> bob{key_basis(0, theta), key_basis(1, theta)};
  const std::array<Povm3, 2> povm{build_povm(0, theta), build_povm(1, theta)};

  AttackReport rep;
  rep.kind = AttackKind::AliceUSD;
  rep.theta = theta.radians();
  rep.rounds = rounds;
  rep.k = k;
  detail::BlockCounter bc(k);
  std::size_t conclusive = 0, correct = 0;
  for (std::size_t i = 0; i < rounds; ++i) {
    const unsigned r = rng.bit();
    unsigned a = 0;
    const PureState collapsed = collapse_epr(bob[r], rng, a);
    const unsigned out = sample_index(outcome_distribution(povm[a], collapsed), rng);
    const bool is_conclusive = out != 2;
    conclusive += is_conclusive ? 1 : 0;
    correct += is_conclusive && out == r ? 1 : 0;
    bc.push(is_conclusive, is_conclusive ? out : 0u, is_conclusive ? r : 0u);
  }
  rep.inconclusive_count = rounds - conclusive;
  rep.conclusive_rate = double(conclusive) / double(rounds);
  rep.conclusive_accuracy = conclusive ? double(correct) / double(conclusive) : 1.0;
  rep.per_bit_success = double(correct) / double(rounds);
  rep.theoretical_bound = conclusive_fraction(theta);
  rep.sigma = detail::binomial_sigma(rep.theoretical_bound, rounds);
  rep.respects_bound = detail::within_bound(rep.per_bit_success, rep.theoretical_bound, rep.sigma);
  rep.correctness_preserved = correct == conclusive;
  detail::finish_blocks(rep, bc, theta);
  return rep;
}

// Dishonest Bob measures in the middle basis and announces 1 on |0''>, 0 on
// |1''>. Honest Alice always lands on a conclusive outcome, but her bits are
// uncorrelated with any key Bob could hold; agreement is measured against an
// independently drawn uniform reference key.
inline AttackReport attack_bob_middle_state(const Theta& theta, std::size_t rounds, Rng& rng,
                                            std::size_t k = 2) {
  detail::require_rounds(rounds, k);
  const MeasBasis middle = middle_basis(theta);
  const std::array<Povm3, 2> povm{build_povm(0, theta), build_povm(1, theta)};

  AttackReport rep;
  rep.kind = AttackKind::BobMiddleState;
  rep.theta = theta.radians();
  rep.rounds = rounds;
  rep.k = k;
  detail::BlockCounter bc(k);
  std::size_t conclusive = 0, agree = 0;
  for (std::size_t i = 0; i < rounds; ++i) {
    const unsigned reference = rng.bit();
    unsigned m = 0;
    const PureState collapsed = collapse_epr(middle, rng, m);
    const unsigned announced = 1u - m;
    const unsigned out = sample_index(outcome_distribution(povm[announced], collapsed), rng);
    const bool is_conclusive = out != 2;
    conclusive += is_conclusive ? 1 : 0;
    agree += is_conclusive && out == reference ? 1 : 0;
    bc.push(is_conclusive, 0u, 0u);
  }
  rep.inconclusive_count = rounds - conclusive;
  rep.conclusive_rate = double(conclusive) / double(rounds);
  rep.per_bit_success = conclusive ? double(agree) / double(conclusive) : 0.0;
  rep.conclusive_accuracy = rep.per_bit_success;
  rep.theoretical_bound = 0.5;
  rep.sigma = detail::binomial_sigma(0.5, conclusive);
  rep.respects_bound = detail::within_bound(rep.per_bit_success, rep.theoretical_bound, rep.sigma);
  rep.correctness_preserved = false;
  detail::finish_blocks(rep, bc, theta);
  return rep;
}

inline AttackReport run_attack(AttackKind kind, const Theta& theta, std::size_t rounds, Rng& rng,
                               std::size_t k = 2) {
  switch (kind) {
    case AttackKind::AliceHelstrom: return attack_alice_helstrom(theta, rounds, rng, k);
    case AttackKind::AliceUSD: return attack_alice_usd(theta, rounds, rng, k);
    case AttackKind::BobMiddleState: return attack_bob_middle_state(theta, rounds, rng, k);
  }
  throw ContractViolation("run_attack: unknown attack kind");
}

}  // namespace diqpq
