#include "querylink/experiment.hpp"

#include <ostream>
#include <string>

#include "querylink/engine.hpp"
#include "querylink/generator.hpp"
#include "querylink/rng.hpp"
#include "querylink/version.hpp"

namespace querylink {

namespace {

struct IntervalAccumulator {
  long queries = 0;
  long linkedAnswered = 0;
  long nodesLinked = 0;
  long nodesFullBaseline = 0;
  long eligible = 0;
  double lossSum = 0.0;
  long optimalMatches = 0;
  long worse = 0;
  double worseGapSum = 0.0;
  long linkedOnlyNodes = 0;

  IntervalStats seal(int index) const {
    IntervalStats s;
    s.intervalIndex = index;
    s.linkedAnswered = linkedAnswered;
    s.nodesLinked = nodesLinked;
    s.nodesFullBaseline = nodesFullBaseline;
    s.searchReductionPct =
        nodesFullBaseline > 0
            ? round2(100.0 * (1.0 - static_cast<double>(nodesLinked) /
                                        static_cast<double>(nodesFullBaseline)))
            : 0.0;
    s.qosLossPct = eligible > 0 ? round2(lossSum / eligible) : 0.0;
    s.optimalMatchCount = optimalMatches;
    s.worseCount = worse;
    s.meanWorseGapPct = worse > 0 ? round2(worseGapSum / worse) : 0.0;
    s.linkedOnlyNodes = linkedOnlyNodes;
    return s;
  }
};

}  // namespace

RunOutput run_experiment(const ExperimentConfig& cfg, const RunHooks& hooks) {
  validate_config(cfg);

  SeededRng rng(cfg.seed);
  Network net = generate_network(cfg.network, rng);
  Evaluator evaluator(net, {cfg.direction, cfg.leafOrder});
  LinkStore store(cfg.store);
  store.set_strict_checks(hooks.strictStoreChecks);

  RunOutput out;
  out.series.meta.seed = cfg.seed;
  out.series.meta.configHash = config_hash(cfg);
  out.series.meta.codeVersion = kVersion;

  IntervalAccumulator acc;
  int intervalIndex = 0;

  for (long ordinal = 1; ordinal <= cfg.totalQueries; ++ordinal) {
    Query q = generate_query(cfg.network, cfg.query, rng);
    EvalResult full = evaluator.evaluate_full(q);
    EvalResult linked = evaluator.evaluate_linked(q, store);
    evaluator.feedback(store, linked, q);

    ++acc.queries;
    if (linked.usedLinks) ++acc.linkedAnswered;
    acc.nodesLinked += linked.nodesSearched;
    acc.nodesFullBaseline += full.nodesSearched;
    if (linked.answer.value == full.answer.value) ++acc.optimalMatches;
    if (full.answer.satisfied && full.answer.value > 0) {
      ++acc.eligible;
      double loss = 100.0 *
                    static_cast<double>(full.answer.value -
                                        linked.answer.value) /
                    static_cast<double>(full.answer.value);
      acc.lossSum += loss;
      if (linked.answer.value < full.answer.value) {
        ++acc.worse;
        acc.worseGapSum += loss;
      }
    }
    if (linked.usedLinks && !linked.fellBackToFull) {
      acc.linkedOnlyNodes += linked.nodesSearched;
      out.series.meta.linkedOnlyNodesTotal += linked.nodesSearched;
      out.series.meta.linkedOnlyBaselineTotal += full.nodesSearched;
    }
    if (hooks.trace) *hooks.trace << trace_line(ordinal, q, linked) << "\n";
    if (hooks.onQuery) hooks.onQuery(ordinal, full, linked);

    if (acc.queries == cfg.intervalSize) {
      out.series.intervals.push_back(acc.seal(intervalIndex++));
      acc = IntervalAccumulator{};
    }
  }

  if (hooks.storeDump) store.dump(*hooks.storeDump);
  out.storeStats = store.stats();
  return out;
}

std::string run_csv_name(const ExperimentConfig& cfg) {
  return cfg.name + "_s" + std::to_string(cfg.seed) + ".csv";
}

}  // namespace querylink
