#pragma once

// Honest-party QPQ pipeline:
//
//   verification   gamma*K pairs, two CHSH runs (Alice referee, Bob referee)
//   key            (1-gamma)*K pairs: Bob measures in key_basis(R_i), announces
//                  his outcome a_i, Alice applies build_povm(a_i)
//   DI POVM tests  gamma*K/2 pairs checked for conflicts, gamma*K/2 pairs for
//                  the conclusive rate; the remaining k*N pairs are the raw key
//   post-process   cyclic shift by s0, permutation, XOR of consecutive k-blocks
//   query          Alice announces s = i - j, Bob one-time-pads the database
//                  with the final key shifted by s
//
// Aborts are reported by throwing ProtocolAbort.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "diqpq/bases_povm.hpp"
#include "diqpq/chsh.hpp"
#include "diqpq/errors.hpp"
#include "diqpq/rng.hpp"
#include "diqpq/transcript.hpp"

namespace diqpq {

// ---------------------------------------------------------------------------
// Bit and trit strings

using BitString = std::vector<std::uint8_t>;

enum class Trit : std::uint8_t { Zero = 0, One = 1, Unknown = 2 };

using TritString = std::vector<Trit>;

inline constexpr char to_char(Trit t) noexcept {
  return t == Trit::Zero ? '0' : t == Trit::One ? '1' : '?';
}

inline constexpr bool known(Trit t) noexcept { return t != Trit::Unknown; }

inline constexpr Trit trit_of_bit(unsigned b) noexcept { return b ? Trit::One : Trit::Zero; }

// Whitespace is ignored so the strings can be written in blocks.
inline BitString parse_bits(std::string_view s) {
  BitString out;
  for (char ch : s) {
    if (ch == '0' || ch == '1')
      out.push_back(static_cast<std::uint8_t>(ch - '0'));
    else if (ch != ' ' && ch != '\t')
      throw ContractViolation(std::string("parse_bits: unexpected character '") + ch + "'");
  }
  return out;
}

inline TritString parse_trits(std::string_view s) {
  TritString out;
  for (char ch : s) {
    if (ch == '0') out.push_back(Trit::Zero);
    else if (ch == '1') out.push_back(Trit::One);
    else if (ch == '?' || ch == '_') out.push_back(Trit::Unknown);
    else if (ch != ' ' && ch != '\t')
      throw ContractViolation(std::string("parse_trits: unexpected character '") + ch + "'");
  }
  return out;
}

inline std::string to_string(const BitString& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

inline std::string to_string(const TritString& trits) {
  std::string s;
  s.reserve(trits.size());
  for (auto t : trits) s.push_back(to_char(t));
  return s;
}

inline std::size_t count_known(const TritString& trits) {
  return static_cast<std::size_t>(std::count_if(trits.begin(), trits.end(), known));
}

// ---------------------------------------------------------------------------
// Configuration

// Alice's POVM device. The defaults are an ideal device.
struct PovmDevice {
  // Probability of emitting the conclusive outcome that is impossible for the
  // collapsed state (a "D1 on |0>" style conflict).
  double conflict_rate = 0.0;
  // Honest conclusive outcomes are kept with this probability and otherwise
  // reported as inconclusive.
  double conclusive_scale = 1.0;
};

struct DeviceModel {
  ChshDevice chsh;
  PovmDevice povm;
  // Each of Alice's known final-key bits is flipped with this probability
  // before error estimation (residual channel noise).
  double final_key_flip = 0.0;
};

struct ProtocolConfig {
  Theta theta{std::numbers::pi / 3};
  std::size_t K = 1000;         // pairs distributed per attempt
  double gamma = 0.4;           // fraction of pairs used by each test stage
  std::size_t k = 2;            // raw bits per final bit
  std::size_t N = 100;          // database size
  double eta = 0.1;             // noise tolerance of the CHSH and rate tests
  std::uint64_t seed = 1;
  unsigned max_retries = 16;
  double error_threshold = 0.0;  // epsilon of the error-rate check
  DeviceModel devices;

  // gamma*K, checked integral by validate().
  std::size_t test_pairs() const {
    return static_cast<std::size_t>(std::llround(gamma * static_cast<double>(K)));
  }
  std::size_t half_test_pairs() const { return test_pairs() / 2; }
  std::size_t key_phase_pairs() const { return K - test_pairs(); }
  std::size_t raw_key_length() const { return k * N; }

  // Throws ConfigError naming the violated constraint.
  void validate() const {
    if (K == 0) throw ConfigError("K must be positive");
    if (N == 0) throw ConfigError("N must be positive");
    if (k == 0) throw ConfigError("k must be positive");
    if (!(gamma > 0.0 && gamma < 0.5)) throw ConfigError("gamma must lie in (0, 1/2)");
    const double gk = gamma * static_cast<double>(K);
    if (std::abs(gk - std::round(gk)) > 1e-9) throw ConfigError("gamma*K must be an integer");
    const std::size_t g = test_pairs();
    if (g == 0) throw ConfigError("gamma*K must be positive");
    if (g % 2 != 0) throw ConfigError("gamma*K/2 must be an integer");
    if (K - 2 * g != k * N) throw ConfigError("(1-2*gamma)*K != k*N");
    if (!(eta >= 0.0 && eta < kChshQuantumValue))
      throw ConfigError("eta must lie in [0, cos^2(pi/8))");
    if (max_retries == 0) throw ConfigError("max_retries must be at least 1");
    if (!(error_threshold >= 0.0 && error_threshold <= 1.0))
      throw ConfigError("error_threshold must lie in [0, 1]");
    const auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(devices.chsh.flip_probability) || !prob(devices.povm.conflict_rate) ||
        !prob(devices.povm.conclusive_scale) || !prob(devices.final_key_flip))
      throw ConfigError("device probabilities must lie in [0, 1]");
  }
};

// ---------------------------------------------------------------------------
// Key material and phase reports

struct KeyMaterial {
  BitString bob_raw;        // R
  TritString alice_raw;     // R_A
  BitString announcements;  // a_i
  BitString bob_final;      // F
  TritString alice_final;   // F_A

  std::size_t known_raw() const { return count_known(alice_raw); }
  std::size_t known_final() const { return count_known(alice_final); }
};

struct Database {
  BitString bits;
  std::size_t size() const noexcept { return bits.size(); }
};

inline Database random_database(std::size_t n, Rng& rng) {
  Database db;
  db.bits.resize(n);
  for (auto& b : db.bits) b = static_cast<std::uint8_t>(rng.bit());
  return db;
}

struct DiPovmReport {
  std::size_t conflict_checked = 0;
  std::size_t conflicts = 0;
  std::size_t rate_checked = 0;
  std::size_t conclusive = 0;  // P
  double rate_threshold = 0.0;  // (1 - cos - eta) * gamma*K/2
  bool passed = false;
};

enum class AbortReason { ChshAliceReferee, ChshBobReferee, PovmConflict, PovmRate, ErrorRate };

inline constexpr std::string_view to_string(AbortReason r) noexcept {
  switch (r) {
    case AbortReason::ChshAliceReferee: return "chsh-alice-referee";
    case AbortReason::ChshBobReferee: return "chsh-bob-referee";
    case AbortReason::PovmConflict: return "povm-conflict";
    case AbortReason::PovmRate: return "povm-rate";
    case AbortReason::ErrorRate: return "error-rate";
  }
  return "unknown";
}

class ProtocolAbort : public std::runtime_error {
 public:
  ProtocolAbort(AbortReason reason, const std::string& what)
      : std::runtime_error(what), reason_(reason) {}

  AbortReason reason() const noexcept { return reason_; }

  std::optional<ChshReport> chsh;
  std::optional<DiPovmReport> di;
  std::optional<double> error_rate;

 private:
  AbortReason reason_;
};

// ---------------------------------------------------------------------------
// Entanglement verification

inline std::pair<ChshReport, ChshReport> run_verification(const ProtocolConfig& cfg, Rng& rng,
                                                          Transcript* transcript = nullptr) {
  cfg.validate();
  const std::size_t n = cfg.half_test_pairs();
  std::vector<ChshRound> rounds(transcript ? n : 0);

  const auto run_one = [&](Referee referee, std::string_view phase) {
    ChshReport rep = run_chsh_test(n, cfg.eta, referee, rng, cfg.devices.chsh, rounds);
    if (transcript) {
      for (std::size_t i = 0; i < n; ++i) {
        const ChshRound& r = rounds[i];
        TranscriptRecord rec;
        rec.phase = phase;
        rec.index = i;
        rec.inputs = {{"u", r.u}, {"v", r.v}};
        rec.announced = {{"first", to_string(rep.first_announcer)}, {"b", r.b}, {"c", r.c}};
        rec.outcomes = {{"z", r.win}};
        transcript->add(std::move(rec));
      }
    }
    return rep;
  };

  const ChshReport alice = run_one(Referee::Alice, "chsh_alice_referee");
  if (alice.aborted) {
    ProtocolAbort e(AbortReason::ChshAliceReferee, "CHSH test with Alice as referee failed");
    e.chsh = alice;
    throw e;
  }
  const ChshReport bob = run_one(Referee::Bob, "chsh_bob_referee");
  if (bob.aborted) {
    ProtocolAbort e(AbortReason::ChshBobReferee, "CHSH test with Bob as referee failed");
    e.chsh = bob;
    throw e;
  }
  return {alice, bob};
}

// ---------------------------------------------------------------------------
// Key establishment

// One key-establishment round on a fresh pair. Bob's outcome is his
// announcement a_i; Alice's outcome is decoded to a trit.
struct KeyRound {
  unsigned bob_bit;    // R_i
  unsigned announced;  // a_i
  Trit alice;
};

class KeyEstablisher {
 public:
  KeyEstablisher(const Theta& theta, const PovmDevice& device)
      : theta_(theta),
        device_(device),
        bases_{key_basis(0, theta), key_basis(1, theta)},
        povms_{build_povm(0, theta), build_povm(1, theta)} {}

  KeyRound round(Rng& rng) const {
    const unsigned r = rng.bit();
    unsigned a = 0;
    const PureState collapsed = collapse_epr(bases_[r], rng, a);
    unsigned out = sample_index(outcome_distribution(povms_[a], collapsed), rng);
    if (device_.conflict_rate > 0.0 && rng.bernoulli(device_.conflict_rate)) {
      out = 1u - r;
    } else if (out != 2 && device_.conclusive_scale < 1.0 &&
               !rng.bernoulli(device_.conclusive_scale)) {
      out = 2;
    }
    return {r, a, out == 2 ? Trit::Unknown : trit_of_bit(out)};
  }

  const Theta& theta() const noexcept { return theta_; }

 private:
  Theta theta_;
  PovmDevice device_;
  std::array<MeasBasis, 2> bases_;
  std::array<Povm3, 2> povms_;
};

inline KeyMaterial establish_raw_key(const Theta& theta, std::size_t pairs, const PovmDevice& device,
                                     Rng& rng, Transcript* transcript = nullptr) {
  const KeyEstablisher est(theta, device);
  KeyMaterial m;
  m.bob_raw.reserve(pairs);
  m.alice_raw.reserve(pairs);
  m.announcements.reserve(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    const KeyRound r = est.round(rng);
    m.bob_raw.push_back(static_cast<std::uint8_t>(r.bob_bit));
    m.announcements.push_back(static_cast<std::uint8_t>(r.announced));
    m.alice_raw.push_back(r.alice);
    if (transcript) {
      TranscriptRecord rec;
      rec.phase = "key";
      rec.index = i;
      rec.inputs = {{"R", r.bob_bit}};
      rec.announced = {{"a", r.announced}};
      rec.outcomes = {{"alice", std::string(1, to_char(r.alice))}};
      transcript->add(std::move(rec));
    }
  }
  return m;
}

inline KeyMaterial run_key_establishment(const ProtocolConfig& cfg, Rng& rng,
                                         Transcript* transcript = nullptr) {
  cfg.validate();
  return establish_raw_key(cfg.theta, cfg.key_phase_pairs(), cfg.devices.povm, rng, transcript);
}

// ---------------------------------------------------------------------------
// DI testing of Alice's POVM device

// Label of Bob's post-measurement state: |0>, |1>, |0'>, |1'>.
inline std::string bob_state_label(unsigned bob_bit, unsigned announced) {
  std::string s(1, announced ? '1' : '0');
  if (bob_bit) s.push_back('\'');
  return s;
}

struct DiPovmResult {
  DiPovmReport report;
  KeyMaterial raw_key;  // the k*N surviving positions, in original order
};

inline DiPovmResult run_di_povm_tests(const ProtocolConfig& cfg, const KeyMaterial& material,
                                      Rng& rng, Transcript* transcript = nullptr) {
  cfg.validate();
  const std::size_t total = cfg.key_phase_pairs();
  if (material.bob_raw.size() != total || material.alice_raw.size() != total ||
      material.announcements.size() != total)
    throw ContractViolation("run_di_povm_tests: key material length != (1-gamma)*K");

  const std::size_t h = cfg.half_test_pairs();
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  DiPovmReport rep;
  rep.conflict_checked = h;
  rep.rate_checked = h;
  rep.rate_threshold = (cfg.theta.one_minus_cos() - cfg.eta) * static_cast<double>(h);

  // Sub-test 1: Bob reveals his post-measurement state; a conclusive outcome
  // naming the other basis is a conflict.
  for (std::size_t t = 0; t < h; ++t) {
    const std::size_t pos = order[t];
    const Trit a = material.alice_raw[pos];
    const bool conflict = known(a) && static_cast<unsigned>(a) != material.bob_raw[pos];
    rep.conflicts += conflict ? 1 : 0;
    if (transcript) {
      TranscriptRecord rec;
      rec.phase = "di_conflict";
      rec.index = pos;
      rec.announced = {{"bob_state", bob_state_label(material.bob_raw[pos], material.announcements[pos])}};
      rec.outcomes = {{"alice", std::string(1, to_char(a))}, {"conflict", conflict}};
      transcript->add(std::move(rec));
    }
  }
  if (rep.conflicts > 0) {
    ProtocolAbort e(AbortReason::PovmConflict, "POVM test: conflicting outcome observed");
    e.di = rep;
    throw e;
  }

  // Sub-test 2: conclusive count P against (1 - cos - eta) * gamma*K/2.
  for (std::size_t t = h; t < 2 * h; ++t) {
    const std::size_t pos = order[t];
    const bool conclusive = known(material.alice_raw[pos]);
    rep.conclusive += conclusive ? 1 : 0;
    if (transcript) {
      TranscriptRecord rec;
      rec.phase = "di_rate";
      rec.index = pos;
      rec.outcomes = {{"conclusive", conclusive}};
      transcript->add(std::move(rec));
    }
  }
  if (static_cast<double>(rep.conclusive) < rep.rate_threshold) {
    ProtocolAbort e(AbortReason::PovmRate, "POVM test: conclusive rate below threshold");
    e.di = rep;
    throw e;
  }
  rep.passed = true;

  std::vector<std::size_t> keep(order.begin() + static_cast<std::ptrdiff_t>(2 * h), order.end());
  std::sort(keep.begin(), keep.end());
  DiPovmResult out{rep, {}};
  for (std::size_t pos : keep) {
    out.raw_key.bob_raw.push_back(material.bob_raw[pos]);
    out.raw_key.alice_raw.push_back(material.alice_raw[pos]);
    out.raw_key.announcements.push_back(material.announcements[pos]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Post-processing

inline bool is_permutation_of_range(std::span<const std::size_t> perm) {
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t p : perm) {
    if (p >= perm.size() || seen[p]) return false;
    seen[p] = true;
  }
  return true;
}

inline std::vector<std::size_t> identity_permutation(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

inline std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  auto p = identity_permutation(n);
  rng.shuffle(std::span<std::size_t>(p));
  return p;
}

// Cyclic left shift by s0, then reorder (out[t] = shifted[perm[t]]), then XOR
// consecutive k-blocks. Alice's final bit is known only if all k constituent
// trits are.
inline KeyMaterial postprocess_keys(const KeyMaterial& material, std::size_t s0,
                                    std::span<const std::size_t> perm, std::size_t k, std::size_t N,
                                    Transcript* transcript = nullptr) {
  const std::size_t len = k * N;
  if (k == 0 || N == 0) throw ContractViolation("postprocess_keys: k and N must be positive");
  if (material.bob_raw.size() != len || material.alice_raw.size() != len)
    throw ContractViolation("postprocess_keys: raw key length != k*N");
  if (perm.size() != len || !is_permutation_of_range(perm))
    throw ContractViolation("postprocess_keys: perm is not a permutation of k*N positions");

  KeyMaterial out = material;
  BitString bob(len);
  TritString alice(len);
  for (std::size_t t = 0; t < len; ++t) {
    const std::size_t src = (perm[t] + s0) % len;
    bob[t] = material.bob_raw[src];
    alice[t] = material.alice_raw[src];
  }

  if (transcript) {
    TranscriptRecord rec;
    rec.phase = "postprocess_announce";
    rec.index = 0;
    rec.announced = {{"perm", std::vector<std::size_t>(perm.begin(), perm.end())}, {"s0", s0}};
    transcript->add(std::move(rec));
  }

  out.bob_final.assign(N, 0);
  out.alice_final.assign(N, Trit::Unknown);
  for (std::size_t i = 0; i < N; ++i) {
    unsigned fb = 0, fa = 0;
    bool all_known = true;
    std::string bob_block, alice_block;
    for (std::size_t j = i * k; j < (i + 1) * k; ++j) {
      fb ^= bob[j];
      if (known(alice[j])) fa ^= static_cast<unsigned>(alice[j]);
      else all_known = false;
      if (transcript) {
        bob_block.push_back(bob[j] ? '1' : '0');
        alice_block.push_back(to_char(alice[j]));
      }
    }
    out.bob_final[i] = static_cast<std::uint8_t>(fb);
    out.alice_final[i] = all_known ? trit_of_bit(fa) : Trit::Unknown;
    if (transcript) {
      TranscriptRecord rec;
      rec.phase = "postprocess";
      rec.index = i;
      rec.inputs = {{"bob_block", bob_block}, {"alice_block", alice_block}};
      rec.outcomes = {{"bob_final", fb}, {"alice_final", std::string(1, to_char(out.alice_final[i]))}};
      transcript->add(std::move(rec));
    }
  }
  return out;
}

// Fraction of Alice's known final bits that disagree with Bob's; 0 when she
// knows none. Stands in for the external error-correction step.
inline double estimate_error_rate(const KeyMaterial& m) {
  std::size_t known_bits = 0, wrong = 0;
  for (std::size_t i = 0; i < m.alice_final.size(); ++i) {
    if (!known(m.alice_final[i])) continue;
    ++known_bits;
    wrong += static_cast<unsigned>(m.alice_final[i]) != m.bob_final[i] ? 1 : 0;
  }
  return known_bits == 0 ? 0.0 : static_cast<double>(wrong) / static_cast<double>(known_bits);
}

// ---------------------------------------------------------------------------
// Full key pipeline

struct PairUsage {
  std::size_t verification = 0;  // gamma*K
  std::size_t di_tests = 0;      // gamma*K
  std::size_t raw_key = 0;       // k*N
  std::size_t total() const noexcept { return verification + di_tests + raw_key; }
};

struct SessionResult {
  KeyMaterial keys;
  ChshReport chsh_alice;
  ChshReport chsh_bob;
  DiPovmReport di;
  std::vector<std::size_t> perm;
  std::size_t s0 = 0;
  double error_rate = 0.0;
  PairUsage pairs;
  unsigned attempts = 1;
};

// One pass of every phase on a fresh batch of K pairs. The final key may have
// no bit known to Alice; run_with_retries handles that case.
inline SessionResult run_session(const ProtocolConfig& cfg, Rng& rng,
                                 Transcript* transcript = nullptr) {
  cfg.validate();
  SessionResult s;
  std::tie(s.chsh_alice, s.chsh_bob) = run_verification(cfg, rng, transcript);
  s.pairs.verification = 2 * cfg.half_test_pairs();

  const KeyMaterial all = run_key_establishment(cfg, rng, transcript);
  DiPovmResult di = run_di_povm_tests(cfg, all, rng, transcript);
  s.di = di.report;
  s.pairs.di_tests = 2 * cfg.half_test_pairs();
  s.pairs.raw_key = di.raw_key.bob_raw.size();

  // Bob announces the permutation, then Alice the shift.
  const std::size_t len = cfg.raw_key_length();
  s.perm = random_permutation(len, rng);
  s.s0 = static_cast<std::size_t>(rng.below(len));
  s.keys = postprocess_keys(di.raw_key, s.s0, s.perm, cfg.k, cfg.N, transcript);

  if (cfg.devices.final_key_flip > 0.0) {
    for (auto& t : s.keys.alice_final)
      if (known(t) && rng.bernoulli(cfg.devices.final_key_flip))
        t = t == Trit::Zero ? Trit::One : Trit::Zero;
  }
  s.error_rate = estimate_error_rate(s.keys);
  if (s.error_rate > cfg.error_threshold) {
    ProtocolAbort e(AbortReason::ErrorRate, "final-key error rate above threshold");
    e.error_rate = s.error_rate;
    throw e;
  }
  return s;
}

// Repeats the pipeline on fresh batches until Alice knows at least one final
// bit. Attempt a draws from rng.split(a).
inline SessionResult run_with_retries(const ProtocolConfig& cfg, Rng& rng,
                                      Transcript* transcript = nullptr) {
  cfg.validate();
  for (unsigned attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Rng attempt_rng = rng.split(attempt);
    Transcript local;
    SessionResult s = run_session(cfg, attempt_rng, transcript ? &local : nullptr);
    if (transcript) transcript->append(local);
    if (s.keys.known_final() > 0) {
      s.attempts = attempt + 1;
      return s;
    }
  }
  throw RetriesExhausted("Alice knows no final-key bit after " + std::to_string(cfg.max_retries) +
                             " attempts",
                         cfg.max_retries);
}

// ---------------------------------------------------------------------------
// Private query

// ciphertext[t] = X[t] xor F[(t + s) mod N]
inline BitString encrypt_database(const BitString& database, const BitString& final_key,
                                  std::size_t shift) {
  if (database.size() != final_key.size() || database.empty())
    throw ContractViolation("encrypt_database: database and key lengths differ");
  const std::size_t n = database.size();
  BitString c(n);
  for (std::size_t t = 0; t < n; ++t) c[t] = database[t] ^ final_key[(t + shift) % n];
  return c;
}

inline BitString decrypt_database(const BitString& ciphertext, const BitString& final_key,
                                  std::size_t shift) {
  return encrypt_database(ciphertext, final_key, shift);
}

struct QueryOutcome {
  std::size_t requested_index = 0;  // j
  std::size_t used_key_index = 0;   // i
  std::size_t shift = 0;            // s = i - j mod N
  unsigned retrieved_bit = 0;
  bool correct = false;
  std::size_t known_final_bits = 0;
  unsigned attempts = 1;
};

inline QueryOutcome answer_query(const BitString& bob_final, const TritString& alice_final,
                                 const Database& database, std::size_t j, Rng& rng,
                                 Transcript* transcript = nullptr) {
  const std::size_t n = bob_final.size();
  if (alice_final.size() != n || database.size() != n)
    throw ContractViolation("answer_query: key and database lengths differ");
  if (j >= n) throw DomainError("answer_query: index out of range");
  std::vector<std::size_t> known_idx;
  for (std::size_t i = 0; i < n; ++i)
    if (known(alice_final[i])) known_idx.push_back(i);
  if (known_idx.empty()) throw ContractViolation("answer_query: Alice knows no final-key bit");

  QueryOutcome q;
  q.requested_index = j;
  q.used_key_index = known_idx[static_cast<std::size_t>(rng.below(known_idx.size()))];
  q.shift = (q.used_key_index + n - j) % n;
  q.known_final_bits = known_idx.size();

  const BitString cipher = encrypt_database(database.bits, bob_final, q.shift);
  q.retrieved_bit = cipher[j] ^ static_cast<unsigned>(alice_final[q.used_key_index]);
  q.correct = q.retrieved_bit == database.bits[j];

  if (transcript) {
    TranscriptRecord rec;
    rec.phase = "query";
    rec.index = j;
    rec.inputs = {{"i", q.used_key_index}};
    rec.announced = {{"s", q.shift}};
    rec.outcomes = {{"ciphertext", to_string(cipher)}, {"retrieved", q.retrieved_bit}};
    transcript->add(std::move(rec));
  }
  return q;
}

// Runs the whole protocol once per requested index; query q draws from
// rng.split(q).
inline std::vector<QueryOutcome> multi_query(const ProtocolConfig& cfg, const Database& database,
                                             std::span<const std::size_t> indices, Rng& rng,
                                             Transcript* transcript = nullptr) {
  cfg.validate();
  if (database.size() != cfg.N) throw ContractViolation("multi_query: database size != N");
  for (std::size_t j : indices)
    if (j >= cfg.N) throw DomainError("multi_query: index out of range");
  std::vector<QueryOutcome> out;
  out.reserve(indices.size());
  for (std::size_t q = 0; q < indices.size(); ++q) {
    Rng qrng = rng.split(q);
    SessionResult s = run_with_retries(cfg, qrng, transcript);
    QueryOutcome o = answer_query(s.keys.bob_final, s.keys.alice_final, database, indices[q], qrng,
                                  transcript);
    o.attempts = s.attempts;
    out.push_back(o);
  }
  return out;
}

}  // namespace diqpq
