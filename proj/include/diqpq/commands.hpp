#pragma once

// Batch subcommands behind the diqpq command-line tool. Each command writes
// its report to `out` and returns a process exit status.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "diqpq/adversary.hpp"
#include "diqpq/bounds.hpp"
#include "diqpq/chsh.hpp"
#include "diqpq/protocol.hpp"
#include "diqpq/transcript.hpp"

namespace diqpq {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitProtocolAbort = 3,
  kExitBoundViolation = 4,
};

enum class Command { Run, Chsh, Attack, Bounds, Sweep };

struct RunManifest {
  ProtocolConfig config;
  double theta = std::numbers::pi / 3;  // copied into config.theta by resolve()
  Command command = Command::Run;
  std::string out_path;         // empty: write to the given stream
  std::string transcript_path;  // run only; empty: no transcript
  std::size_t trials = 100000;  // CHSH rounds, attack rounds, samples per sweep point
  std::size_t queries = 1;      // l
  std::string attack = "alice-helstrom";
  std::size_t grid_points = 50;
  bool single_theta = false;    // sweep just `theta`
  bool empirical = false;       // sweep: add Monte-Carlo columns
  unsigned threads = 1;

  // Builds config.theta and checks every constraint; throws ConfigError.
  void resolve() {
    try {
      config.theta = Theta(theta);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    if (trials == 0) throw ConfigError("trials must be at least 1");
    if (grid_points == 0) throw ConfigError("grid_points must be at least 1");
    if (threads == 0) throw ConfigError("threads must be at least 1");
    config.validate();
  }
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline ordered_json config_json(const RunManifest& m) {
  const ProtocolConfig& c = m.config;
  ordered_json j;
  j["theta"] = c.theta.radians();
  j["K"] = c.K;
  j["gamma"] = c.gamma;
  j["k"] = c.k;
  j["N"] = c.N;
  j["eta"] = c.eta;
  j["seed"] = c.seed;
  j["max_retries"] = c.max_retries;
  j["error_threshold"] = c.error_threshold;
  j["trials"] = m.trials;
  j["queries"] = m.queries;
  j["devices"] = {{"chsh_flip", c.devices.chsh.flip_probability},
                  {"chsh_uniform", c.devices.chsh.uniform_outputs},
                  {"povm_conflict_rate", c.devices.povm.conflict_rate},
                  {"povm_conclusive_scale", c.devices.povm.conclusive_scale},
                  {"final_key_flip", c.devices.final_key_flip}};
  return j;
}

inline ordered_json chsh_json(const ChshReport& r) {
  return {{"referee", to_string(r.referee)},   {"first_announcer", to_string(r.first_announcer)},
          {"n", r.n},                          {"z", r.z_statistic},
          {"threshold", r.threshold},          {"aborted", r.aborted}};
}

inline ordered_json di_json(const DiPovmReport& r) {
  return {{"conflict_checked", r.conflict_checked}, {"conflicts", r.conflicts},
          {"rate_checked", r.rate_checked},         {"conclusive", r.conclusive},
          {"rate_threshold", r.rate_threshold},     {"passed", r.passed}};
}

inline ordered_json attack_json(const AttackReport& r) {
  return {{"kind", to_string(r.kind)},
          {"theta", r.theta},
          {"rounds", r.rounds},
          {"k", r.k},
          {"per_bit_success", r.per_bit_success},
          {"conclusive_rate", r.conclusive_rate},
          {"conclusive_accuracy", r.conclusive_accuracy},
          {"inconclusive_count", r.inconclusive_count},
          {"theoretical_bound", r.theoretical_bound},
          {"sigma", r.sigma},
          {"respects_bound", r.respects_bound},
          {"correctness_preserved", r.correctness_preserved},
          {"blocks", r.blocks},
          {"block_success", r.block_success},
          {"block_bound", r.block_bound},
          {"block_respects_bound", r.block_respects_bound},
          {"block_parity_success", r.block_parity_success}};
}

// Writes to m.out_path when set, otherwise to `fallback`.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file: " + path);
  write(f);
}

}  // namespace detail

// Full protocol: one fresh key session and one query per requested index.
// Indices and the database are drawn from dedicated substreams of the seed.
inline int cmd_run(RunManifest m, std::ostream& out) {
  m.resolve();
  const ProtocolConfig& cfg = m.config;
  Rng root(cfg.seed);
  Rng db_rng = root.split(0);
  const Database db = random_database(cfg.N, db_rng);
  Rng idx_rng = root.split(1);
  std::vector<std::size_t> indices(m.queries);
  for (auto& j : indices) j = static_cast<std::size_t>(idx_rng.below(cfg.N));

  ordered_json rep;
  rep["command"] = "run";
  rep["config"] = detail::config_json(m);
  rep["queries"] = ordered_json::array();
  Transcript transcript;
  Transcript* tp = m.transcript_path.empty() ? nullptr : &transcript;
  int status = kExitOk;
  Rng query_root = root.split(2);
  for (std::size_t q = 0; q < indices.size(); ++q) {
    Rng qrng = query_root.split(q);
    ordered_json qj;
    qj["requested_index"] = indices[q];
    try {
      const SessionResult s = run_with_retries(cfg, qrng, tp);
      const QueryOutcome o = answer_query(s.keys.bob_final, s.keys.alice_final, db, indices[q], qrng, tp);
      qj["phases"] = {{"chsh_alice_referee", detail::chsh_json(s.chsh_alice)},
                      {"chsh_bob_referee", detail::chsh_json(s.chsh_bob)},
                      {"di_povm", detail::di_json(s.di)},
                      {"error_rate", s.error_rate}};
      qj["pairs"] = {{"verification", s.pairs.verification},
                     {"di_tests", s.pairs.di_tests},
                     {"raw_key", s.pairs.raw_key},
                     {"total", s.pairs.total()}};
      qj["attempts"] = s.attempts;
      qj["known_raw_bits"] = s.keys.known_raw();
      qj["known_final_bits"] = s.keys.known_final();
      qj["used_key_index"] = o.used_key_index;
      qj["shift"] = o.shift;
      qj["s0"] = s.s0;
      qj["retrieved_bit"] = o.retrieved_bit;
      qj["expected_bit"] = db.bits[indices[q]];
      qj["correct"] = o.correct;
    } catch (const ProtocolAbort& e) {
      qj["aborted"] = to_string(e.reason());
      qj["message"] = e.what();
      if (e.chsh) qj["chsh"] = detail::chsh_json(*e.chsh);
      if (e.di) qj["di_povm"] = detail::di_json(*e.di);
      if (e.error_rate) qj["error_rate"] = *e.error_rate;
      status = kExitProtocolAbort;
    } catch (const RetriesExhausted& e) {
      qj["aborted"] = "retries-exhausted";
      qj["message"] = e.what();
      qj["attempts"] = e.attempts();
      status = kExitProtocolAbort;
    }
    rep["queries"].push_back(qj);
    if (status != kExitOk) break;
  }
  rep["status"] = status;
  detail::emit(m.out_path, out, [&](std::ostream& os) { os << rep.dump(2) << '\n'; });
  if (tp) {
    std::ofstream f(m.transcript_path, std::ios::binary);
    if (!f) throw ConfigError("cannot open transcript file: " + m.transcript_path);
    transcript.write_jsonl(f);
  }
  return status;
}

// Both CHSH sub-tests with `trials` rounds each.
inline int cmd_chsh(RunManifest m, std::ostream& out) {
  m.resolve();
  Rng root(m.config.seed);
  Rng a = root.split(0), b = root.split(1);
  const ChshReport ra = run_chsh_test(m.trials, m.config.eta, Referee::Alice, a, m.config.devices.chsh);
  const ChshReport rb = run_chsh_test(m.trials, m.config.eta, Referee::Bob, b, m.config.devices.chsh);
  ordered_json rep;
  rep["command"] = "chsh";
  rep["config"] = detail::config_json(m);
  rep["quantum_value"] = kChshQuantumValue;
  rep["alice_referee"] = detail::chsh_json(ra);
  rep["bob_referee"] = detail::chsh_json(rb);
  const int status = ra.aborted || rb.aborted ? kExitProtocolAbort : kExitOk;
  rep["status"] = status;
  detail::emit(m.out_path, out, [&](std::ostream& os) { os << rep.dump(2) << '\n'; });
  return status;
}

inline int cmd_attack(RunManifest m, std::ostream& out) {
  m.resolve();
  const auto kind = parse_attack_kind(m.attack);
  if (!kind) throw ConfigError("unknown attack: " + m.attack);
  Rng rng(m.config.seed);
  const AttackReport r = run_attack(*kind, m.config.theta, m.trials, rng, m.config.k);
  ordered_json rep;
  rep["command"] = "attack";
  rep["config"] = detail::config_json(m);
  rep["report"] = detail::attack_json(r);
  // Only correctness-preserving attacks are held to the bounds.
  const bool violated = r.correctness_preserved && (!r.respects_bound || !r.block_respects_bound);
  const int status = violated ? kExitBoundViolation : kExitOk;
  rep["status"] = status;
  detail::emit(m.out_path, out, [&](std::ostream& os) { os << rep.dump(2) << '\n'; });
  return status;
}

inline int cmd_bounds(RunManifest m, std::ostream& out) {
  m.resolve();
  const SecuritySummary s = security_summary(m.config.theta, m.config.k, m.config.N, m.queries);
  ordered_json rep;
  rep["command"] = "bounds";
  rep["config"] = detail::config_json(m);
  rep["summary"] = {{"theta", s.theta},
                    {"k", s.k},
                    {"N", s.N},
                    {"l", s.l},
                    {"data_privacy_entropy", s.data_privacy_entropy},
                    {"lambda_bound", s.lambda_bound},
                    {"user_privacy_entropy", s.user_privacy_entropy},
                    {"delta_bound", s.delta_bound},
                    {"conclusive_fraction", s.conclusive_fraction},
                    {"helstrom_bound", s.helstrom_bound},
                    {"final_key_helstrom_bound",
                     final_key_guess_bound(m.config.theta, s.k, AttackKind::AliceHelstrom)},
                    {"index_guess_bound",
                     final_key_guess_bound(m.config.theta, s.k, AttackKind::BobMiddleState)}};
  rep["status"] = kExitOk;
  detail::emit(m.out_path, out, [&](std::ostream& os) { os << rep.dump(2) << '\n'; });
  return kExitOk;
}

struct EmpiricalPoint {
  double conclusive = 0.0;
  double helstrom = 0.0;
  bool within_bounds = true;
};

// CSV columns: theta,conclusive,helstrom,lambda,delta and, with `empirical`,
// conclusive_mc,helstrom_mc. Point i samples from substream i, so the output
// does not depend on the thread count.
inline int cmd_sweep(RunManifest m, std::ostream& out) {
  m.resolve();
  const std::vector<double> grid =
      m.single_theta ? std::vector<double>{m.config.theta.radians()} : default_theta_grid(m.grid_points);
  const std::vector<SweepRow> rows = sweep_theta(grid, m.config.k);

  std::vector<EmpiricalPoint> mc(rows.size());
  if (m.empirical) {
    const Rng root(m.config.seed);
    const auto point = [&](std::size_t i) {
      const Theta theta(grid[i]);
      Rng r = root.split(i);
      Rng r_usd = r.split(0), r_hel = r.split(1);
      const AttackReport usd = attack_alice_usd(theta, m.trials, r_usd, 1);
      const AttackReport hel = attack_alice_helstrom(theta, m.trials, r_hel, 1);
      return EmpiricalPoint{usd.conclusive_rate, hel.per_bit_success,
                            usd.respects_bound && hel.respects_bound};
    };
    for (std::size_t start = 0; start < rows.size(); start += m.threads) {
      std::vector<std::future<EmpiricalPoint>> jobs;
      for (std::size_t i = start; i < std::min(rows.size(), start + m.threads); ++i)
        jobs.push_back(std::async(m.threads > 1 ? std::launch::async : std::launch::deferred, point, i));
      for (std::size_t i = 0; i < jobs.size(); ++i) mc[start + i] = jobs[i].get();
    }
  }

  bool violated = false;
  detail::emit(m.out_path, out, [&](std::ostream& os) {
    os << "theta,conclusive,helstrom,lambda,delta";
    if (m.empirical) os << ",conclusive_mc,helstrom_mc";
    os << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const SweepRow& r = rows[i];
      os << detail::fmt_double(r.theta) << ',' << detail::fmt_double(r.conclusive) << ','
         << detail::fmt_double(r.helstrom) << ',' << detail::fmt_double(r.lambda) << ','
         << detail::fmt_double(r.delta);
      if (m.empirical) {
        os << ',' << detail::fmt_double(mc[i].conclusive) << ',' << detail::fmt_double(mc[i].helstrom);
        violated = violated || !mc[i].within_bounds;
      }
      os << '\n';
    }
  });
  return violated ? kExitBoundViolation : kExitOk;
}

inline int dispatch(const RunManifest& m, std::ostream& out) {
  switch (m.command) {
    case Command::Run: return cmd_run(m, out);
    case Command::Chsh: return cmd_chsh(m, out);
    case Command::Attack: return cmd_attack(m, out);
    case Command::Bounds: return cmd_bounds(m, out);
    case Command::Sweep: return cmd_sweep(m, out);
  }
  return kExitConfigError;
}

}  // namespace diqpq
