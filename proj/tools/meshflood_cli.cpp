// meshflood: run, compare, and oracle-check broadcast flooding scenarios.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "meshflood/meshflood.hpp"

namespace fs = std::filesystem;
using namespace meshflood;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAccounting = 3;
constexpr int kExitOracle = 4;

struct Overrides {
  std::string mode;
  std::string seed;
  std::string rule2;
  std::string inflight;

  void add_to(CLI::App* cmd, bool with_mode) {
    if (with_mode) cmd->add_option("--mode", mode, "relay | blind")->check(CLI::IsMember({"relay", "blind"}));
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--rule2", rule2, "last-emitter rule on | off")->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--inflight", inflight, "deliver | drop copies in flight across a reconfiguration")
        ->check(CLI::IsMember({"deliver", "drop"}));
  }

  void apply(SimConfig& cfg) const {
    if (!mode.empty()) apply_setting(cfg, "mode", mode);
    if (!seed.empty()) apply_setting(cfg, "seed", seed);
    if (!rule2.empty()) apply_setting(cfg, "rule2", rule2);
    if (!inflight.empty()) apply_setting(cfg, "inflight", inflight);
  }
};

template <typename Fn>
void write_file(const fs::path& p, Fn&& fn) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  fn(f);
  if (!f) throw Error("write failed: " + p.string());
}

int write_run(const fs::path& dir, const RunResult& r, bool dump_relays, bool dump_topology) {
  fs::create_directories(dir);
  write_file(dir / "series.csv", [&](std::ostream& os) { export_csv(r.series, os); });
  write_file(dir / "summary.txt", [&](std::ostream& os) { write_summary(os, r.summary); });
  if (dump_relays) write_file(dir / "relays.txt", [&](std::ostream& os) { write_relays(os, r.initial_assignment); });
  if (dump_topology) {
    write_file(dir / "topology.txt", [&](std::ostream& os) { write_topology(os, r.initial_topology); });
  }
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  return r.summary.accounting_ok ? kExitOk : kExitAccounting;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (auto dash = item.find('-'); dash != std::string::npos) {
      const auto lo = parse_int<std::uint64_t>(item.substr(0, dash));
      const auto hi = parse_int<std::uint64_t>(item.substr(dash + 1));
      if (hi < lo) throw ConfigError("empty seed range " + item);
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else if (!item.empty()) {
      seeds.push_back(parse_int<std::uint64_t>(item));
    }
  }
  if (seeds.empty()) throw ConfigError("no seeds given");
  return seeds;
}

int cmd_run(const std::string& scenario, const Overrides& ov, const fs::path& out, bool dump_relays,
            bool dump_topology, const std::string& seeds, unsigned jobs) {
  SimConfig base = load_scenario(scenario);
  ov.apply(base);
  base.validate();
  if (seeds.empty()) return write_run(out, run(base), dump_relays, dump_topology);

  // Batch mode: independent seeds, isolated output directories.
  const auto list = parse_seed_list(seeds);
  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{kExitOk};
  std::mutex err_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < list.size(); i = next++) {
      SimConfig cfg = base;
      cfg.seed = list[i];
      int code = kExitOk;
      try {
        code = write_run(out / ("seed_" + std::to_string(list[i])), run(cfg), dump_relays, dump_topology);
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mu);
        std::cerr << "seed " << list[i] << ": " << e.what() << '\n';
        code = kExitFailure;
      }
      int prev = worst.load();
      while (code > prev && !worst.compare_exchange_weak(prev, code)) {
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned j = 0; j < std::max(1u, jobs); ++j) pool.emplace_back(worker);
  pool.clear();
  return worst.load();
}

int cmd_compare(const std::string& scenario, const Overrides& ov, const fs::path& out) {
  SimConfig cfg = load_scenario(scenario);
  ov.apply(cfg);
  cfg.mode = FloodMode::RelayFlood;
  const RunResult optimized = run(cfg);
  cfg.mode = FloodMode::BlindFlood;
  const RunResult blind = run(cfg);

  int code = write_run(out / "relay", optimized, false, false);
  code = std::max(code, write_run(out / "blind", blind, false, false));
  const auto report = compare(optimized.summary, blind.summary);
  write_file(out / "compare.txt", [&](std::ostream& os) { write_compare(os, report); });
  write_compare(std::cout, report);
  return code;
}

int cmd_oracle(const std::string& scenario, const Overrides& ov, std::size_t max_n) {
  SimConfig cfg = load_scenario(scenario);
  ov.apply(cfg);
  cfg.validate();
  const Topology t = initial_topology(cfg);
  const auto heuristic = select_relays(t, cfg.candidate_order);
  if (!coverage_check(t, heuristic.relays).empty()) {
    std::cerr << "heuristic relay set fails coverage check\n";
    return kExitOracle;
  }
  const auto optimal = brute_force_min_relays(t, max_n);
  const double ratio = optimal.empty() ? 1.0
                                       : static_cast<double>(heuristic.relays.size()) /
                                             static_cast<double>(optimal.size());
  std::cout << "heuristic=" << heuristic.relays.size() << '\n'
            << "optimal=" << optimal.size() << '\n'
            << "ratio=" << std::fixed << std::setprecision(6) << ratio << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic broadcast-flooding simulator for wireless mesh networks"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out = "out";
  Overrides ov;

  auto* run_cmd = app.add_subcommand("run", "Run one scenario");
  bool dump_relays = false;
  bool dump_topology = false;
  std::string seeds;
  unsigned jobs = 1;
  run_cmd->add_option("scenario", scenario, "Scenario file or fixture name (fig3, path:N, grid:N, k:N)")
      ->required();
  run_cmd->add_option("--out", out, "Output directory");
  run_cmd->add_flag("--dump-relays", dump_relays, "Write relays.txt");
  run_cmd->add_flag("--dump-topology", dump_topology, "Write topology.txt");
  run_cmd->add_option("--seeds", seeds, "Batch seeds, e.g. 1-10,42");
  run_cmd->add_option("--jobs", jobs, "Concurrent batch runs")->check(CLI::PositiveNumber);
  ov.add_to(run_cmd, true);

  auto* compare_cmd = app.add_subcommand("compare", "Run optimized and blind flooding on one scenario");
  compare_cmd->add_option("scenario", scenario, "Scenario file or fixture name")->required();
  compare_cmd->add_option("--out", out, "Output directory");
  ov.add_to(compare_cmd, false);

  auto* oracle_cmd = app.add_subcommand("oracle", "Compare the relay heuristic with the exact minimum");
  std::size_t max_n = 12;
  oracle_cmd->add_option("scenario", scenario, "Scenario file or fixture name")->required();
  oracle_cmd->add_option("--max-n", max_n, "Largest topology the exact search accepts");
  ov.add_to(oracle_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(scenario, ov, out, dump_relays, dump_topology, seeds, jobs);
    if (*compare_cmd) return cmd_compare(scenario, ov, out);
    if (*oracle_cmd) return cmd_oracle(scenario, ov, max_n);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const EmptyScenarioError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SizeLimitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const AccountingError& e) {
    std::cerr << "accounting error: " << e.what() << '\n';
    return kExitAccounting;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
