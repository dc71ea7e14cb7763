// diqpq: batch front-end for the DI-QPQ simulator.
//
//   diqpq run    --config exp.cfg --seed 7 --out report.json --transcript run.jsonl
//   diqpq chsh   --trials 100000 --eta 0.01
//   diqpq attack --attack alice-helstrom --theta 1.0471975511965976
//   diqpq bounds --theta 1.0471975511965976 --k 2 --N 100 --queries 5
//   diqpq sweep  --out fig1.csv [--empirical --trials 100000]
//
// The config file holds flat `key = value` lines using the long option names
// (theta, K, gamma, k, N, eta, seed, ...); command-line flags override it.
//
// Exit codes: 0 success, 2 config error, 3 protocol abort, 4 bound violation.

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "diqpq/diqpq.hpp"

int main(int argc, char** argv) {
  using namespace diqpq;

  CLI::App app{"Device-independent quantum private query simulator"};
  app.set_config("--config", "", "flat key=value configuration file");
  app.require_subcommand(1);
  app.fallthrough();

  RunManifest m;
  ProtocolConfig& c = m.config;
  app.add_option("--seed", c.seed, "64-bit seed");
  app.add_option("--theta", m.theta, "key-basis angle in radians, (0, pi/2]");
  app.add_option("--K", c.K, "entangled pairs per attempt");
  app.add_option("--gamma", c.gamma, "test fraction, (0, 1/2)");
  app.add_option("--k", c.k, "raw bits per final-key bit");
  app.add_option("--N", c.N, "database size");
  app.add_option("--eta", c.eta, "noise tolerance");
  app.add_option("--max-retries,--max_retries", c.max_retries, "key attempts before giving up");
  app.add_option("--error-threshold,--error_threshold", c.error_threshold,
                 "abort when the final-key error rate exceeds this");
  app.add_option("--trials", m.trials, "CHSH rounds, attack rounds, or samples per sweep point");
  app.add_option("--queries,--l", m.queries, "number of database bits to retrieve");
  app.add_option("--out", m.out_path, "report path (default stdout)");
  app.add_option("--transcript", m.transcript_path, "run: line-delimited transcript path");
  app.add_option("--attack", m.attack, "alice-helstrom | alice-usd | bob-middle");
  app.add_option("--grid-points,--grid_points", m.grid_points, "sweep: evenly spaced theta values");
  app.add_flag("--single-theta,--single_theta", m.single_theta, "sweep: only the configured theta");
  app.add_flag("--empirical", m.empirical, "sweep: add Monte-Carlo columns");
  app.add_option("--threads", m.threads, "sweep: worker count (does not change results)");
  app.add_option("--chsh-flip,--chsh_flip", c.devices.chsh.flip_probability, "CHSH output flip probability");
  app.add_flag("--chsh-uniform,--chsh_uniform", c.devices.chsh.uniform_outputs, "CHSH devices output coin flips");
  app.add_option("--povm-conflict-rate,--povm_conflict_rate", c.devices.povm.conflict_rate,
                 "POVM device conflict probability");
  app.add_option("--povm-conclusive-scale,--povm_conclusive_scale", c.devices.povm.conclusive_scale,
                 "POVM device conclusive retention");
  app.add_option("--final-key-flip,--final_key_flip", c.devices.final_key_flip,
                 "flip probability on Alice's known final bits");

  const std::map<std::string, Command> commands{{"run", Command::Run},
                                                {"chsh", Command::Chsh},
                                                {"attack", Command::Attack},
                                                {"bounds", Command::Bounds},
                                                {"sweep", Command::Sweep}};
  for (const auto& [name, cmd] : commands) {
    auto* sub = app.add_subcommand(name);
    sub->callback([&m, cmd = cmd] { m.command = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  try {
    return dispatch(m, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
}
