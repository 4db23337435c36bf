// Command line front end: run one experiment, sweep every preset across
// seeds, or check the linked evaluator against the full one.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "querylink/config.hpp"
#include "querylink/engine.hpp"
#include "querylink/experiment.hpp"
#include "querylink/generator.hpp"
#include "querylink/parser.hpp"
#include "querylink/rng.hpp"
#include "querylink/stats.hpp"

namespace fs = std::filesystem;
using namespace querylink;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitUsage = 2;

std::string fmt2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

// Accepts a path to a config file or a preset name searched under ./configs.
std::string resolve_config_arg(const std::string& arg) {
  std::vector<fs::path> candidates = {
      arg,
      arg + ".json",
      fs::path("configs") / arg,
      fs::path("configs") / (arg + ".json"),
  };
  for (const fs::path& p : candidates) {
    if (fs::exists(p) && fs::is_regular_file(p)) return p.string();
  }
  throw ConfigError("config not found: " + arg +
                    " (tried the path itself and ./configs)");
}

Direction parse_direction_flag(const std::string& s) {
  if (s == "fwd" || s == "forwards") return Direction::FORWARDS;
  if (s == "bwd" || s == "backwards") return Direction::BACKWARDS;
  throw ConfigError("direction must be fwd or bwd, got '" + s + "'");
}

void print_run_summary(const ExperimentConfig& cfg, const RunOutput& out,
                       const fs::path& csvPath) {
  Summary s = summarize(out.series);
  std::cout << "wrote " << csvPath.string() << "\n";
  std::cout << cfg.name << " seed=" << cfg.seed
            << " final_search_reduction_pct=" << fmt2(s.finalSearchReductionPct)
            << " final_qos_loss_pct=" << fmt2(s.finalQoSLossPct)
            << " linked_only_reduction_pct=" << fmt2(s.linkedOnlyReductionPct)
            << "\n";
  const StoreStats& st = out.storeStats;
  std::cout << "store entries=" << st.entryCount << " level1="
            << st.levelCounts[0] << " level2=" << st.levelCounts[1]
            << " level3=" << st.levelCounts[2] << " evictions=" << st.evictions
            << " rejected_self_links=" << st.rejectedSelfLinks << "\n";
}

struct RunArgs {
  std::string config;
  std::optional<uint64_t> seed;
  std::string outDir = ".";
  std::optional<std::string> direction;
  std::optional<std::string> leafOrder;
  std::optional<std::string> traceFile;
  bool debugStore = false;
};

int cmd_run(const RunArgs& args) {
  ExperimentConfig cfg = load_config(resolve_config_arg(args.config));
  if (args.seed) cfg.seed = *args.seed;
  if (args.direction) cfg.direction = parse_direction_flag(*args.direction);
  if (args.leafOrder) {
    if (*args.leafOrder == "ltr") {
      cfg.leafOrder = LeafOrder::LTR;
    } else if (*args.leafOrder == "rtl") {
      cfg.leafOrder = LeafOrder::RTL;
    } else {
      throw ConfigError("leaf order must be ltr or rtl");
    }
  }

  fs::create_directories(args.outDir);
  std::ofstream trace;
  std::ofstream storeDump;
  RunHooks hooks;
  if (args.traceFile) {
    trace.open(*args.traceFile, std::ios::binary);
    if (!trace) throw ConfigError("cannot open trace file: " + *args.traceFile);
    hooks.trace = &trace;
  }
  fs::path dumpPath;
  if (args.debugStore) {
    hooks.strictStoreChecks = true;
    dumpPath = fs::path(args.outDir) /
               (cfg.name + "_s" + std::to_string(cfg.seed) + ".store.txt");
    storeDump.open(dumpPath, std::ios::binary);
    if (!storeDump) {
      throw ConfigError("cannot open store dump file: " + dumpPath.string());
    }
    hooks.storeDump = &storeDump;
  }

  RunOutput out = run_experiment(cfg, hooks);
  fs::path csvPath = fs::path(args.outDir) / run_csv_name(cfg);
  write_csv_file(out.series, csvPath.string());
  print_run_summary(cfg, out, csvPath);
  if (args.debugStore) std::cout << "store dump " << dumpPath.string() << "\n";
  return kExitOk;
}

struct SweepArgs {
  std::string configsDir = "configs";
  int seeds = 5;
  std::string outDir = ".";
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

int cmd_sweep(const SweepArgs& args) {
  std::vector<fs::path> presets;
  if (!fs::is_directory(args.configsDir)) {
    throw ConfigError("configs directory not found: " + args.configsDir);
  }
  for (const auto& entry : fs::directory_iterator(args.configsDir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      presets.push_back(entry.path());
    }
  }
  std::sort(presets.begin(), presets.end());
  if (presets.empty()) {
    throw ConfigError("no .json presets under " + args.configsDir);
  }
  if (args.seeds < 1) throw ConfigError("--seeds must be >= 1");

  fs::create_directories(args.outDir);
  fs::path summaryPath = fs::path(args.outDir) / "sweep_summary.csv";
  std::ofstream summary(summaryPath, std::ios::binary);
  if (!summary) {
    throw ConfigError("cannot open " + summaryPath.string());
  }
  summary << "config,seed,final_search_reduction_pct,final_qos_loss_pct,"
             "linked_only_reduction_pct\n";

  for (const fs::path& preset : presets) {
    ExperimentConfig base = load_config(preset.string());
    std::vector<double> reductions;
    std::vector<double> losses;
    std::vector<double> linkedOnly;
    for (int seed = 1; seed <= args.seeds; ++seed) {
      ExperimentConfig cfg = base;
      cfg.seed = static_cast<uint64_t>(seed);
      RunOutput out = run_experiment(cfg);
      fs::path csvPath = fs::path(args.outDir) / run_csv_name(cfg);
      write_csv_file(out.series, csvPath.string());
      Summary s = summarize(out.series);
      reductions.push_back(s.finalSearchReductionPct);
      losses.push_back(s.finalQoSLossPct);
      linkedOnly.push_back(s.linkedOnlyReductionPct);
      summary << cfg.name << ',' << seed << ','
              << fmt2(s.finalSearchReductionPct) << ','
              << fmt2(s.finalQoSLossPct) << ','
              << fmt2(s.linkedOnlyReductionPct) << "\n";
      std::cout << cfg.name << " seed=" << seed
                << " reduction=" << fmt2(s.finalSearchReductionPct)
                << " qos_loss=" << fmt2(s.finalQoSLossPct)
                << " linked_only=" << fmt2(s.linkedOnlyReductionPct) << "\n";
    }
    summary << base.name << ",mean," << fmt2(mean_of(reductions)) << ','
            << fmt2(mean_of(losses)) << ',' << fmt2(mean_of(linkedOnly))
            << "\n";
    summary << base.name << ",stddev," << fmt2(stddev_of(reductions)) << ','
            << fmt2(stddev_of(losses)) << ',' << fmt2(stddev_of(linkedOnly))
            << "\n";
  }
  std::cout << "wrote " << summaryPath.string() << "\n";
  return kExitOk;
}

struct OracleArgs {
  uint64_t seed = 1;
  long count = 1000;
};

// Compares evaluate_linked over an empty store against evaluate_full on a
// small network: answers and node counts must agree query for query.
int cmd_oracle_check(const OracleArgs& args) {
  NetworkConfig netCfg;
  netCfg.sourceTypeCount = 5;
  netCfg.instancesPerType = 5;
  netCfg.valueTypeCount = 5;
  netCfg.sourceBands = {{70, {"A", "B"}}, {30, {"C", "D", "E"}}};
  netCfg.valueBands = {{70, {"Value1", "Value2"}},
                       {30, {"Value3", "Value4", "Value5"}}};
  QueryConfig qCfg;

  SeededRng rng(args.seed);
  Network net = generate_network(netCfg, rng);
  Evaluator evaluator(net, {});
  LinkStore emptyStore;

  long matched = 0;
  for (long i = 1; i <= args.count; ++i) {
    Query q = generate_query(netCfg, qCfg, rng);
    EvalResult full = evaluator.evaluate_full(q);
    EvalResult linked = evaluator.evaluate_linked(q, emptyStore);
    bool ok = full.answer == linked.answer &&
              full.nodesSearched == linked.nodesSearched &&
              !linked.usedLinks && !linked.fellBackToFull;
    if (ok) {
      ++matched;
    } else {
      std::cout << "mismatch at query " << i << ": " << render_query(q)
                << "\n  full   value=" << full.answer.value
                << " satisfied=" << full.answer.satisfied
                << " nodes=" << full.nodesSearched
                << "\n  linked value=" << linked.answer.value
                << " satisfied=" << linked.answer.satisfied
                << " nodes=" << linked.nodesSearched << "\n";
    }
  }
  std::cout << matched << "/" << args.count << " matched\n";
  return matched == args.count ? kExitOk : kExitPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Link-assisted select-from-where query experiments"};
  app.require_subcommand(1);

  RunArgs runArgs;
  CLI::App* run = app.add_subcommand("run", "Run one experiment, write its CSV");
  run->add_option("--config", runArgs.config,
                  "Config file path or preset name under ./configs")
      ->required();
  uint64_t seedOpt = 0;
  CLI::Option* seedFlag =
      run->add_option("--seed", seedOpt, "Override the config seed");
  run->add_option("--out", runArgs.outDir, "Output directory")
      ->capture_default_str();
  std::string directionOpt;
  CLI::Option* directionFlag = run->add_option(
      "--direction", directionOpt, "Link direction: fwd or bwd");
  std::string leafOrderOpt;
  CLI::Option* leafOrderFlag = run->add_option(
      "--leaf-order", leafOrderOpt, "Leaf evaluation order: ltr or rtl");
  std::string traceOpt;
  CLI::Option* traceFlag =
      run->add_option("--trace", traceOpt, "Write per-query trace lines here");
  run->add_flag("--debug-store", runArgs.debugStore,
                "Check store invariants each mutation, dump the store after");

  SweepArgs sweepArgs;
  CLI::App* sweep =
      app.add_subcommand("sweep", "Run every preset across seeds 1..N");
  sweep->add_option("--configs", sweepArgs.configsDir, "Preset directory")
      ->capture_default_str();
  sweep->add_option("--seeds", sweepArgs.seeds, "Seeds per preset (1..N)")
      ->capture_default_str();
  sweep->add_option("--out", sweepArgs.outDir, "Output directory")
      ->capture_default_str();

  OracleArgs oracleArgs;
  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "Check linked evaluation against full search");
  oracle->add_option("--seed", oracleArgs.seed, "Stream seed")
      ->capture_default_str();
  oracle->add_option("--count", oracleArgs.count, "Queries to compare")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) {
      if (*seedFlag) runArgs.seed = seedOpt;
      if (*directionFlag) runArgs.direction = directionOpt;
      if (*leafOrderFlag) runArgs.leafOrder = leafOrderOpt;
      if (*traceFlag) runArgs.traceFile = traceOpt;
      return cmd_run(runArgs);
    }
    if (sweep->parsed()) return cmd_sweep(sweepArgs);
    if (oracle->parsed()) return cmd_oracle_check(oracleArgs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
