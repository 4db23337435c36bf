#pragma once

// Experiment orchestration: one network, one query stream, two evaluations
// per query.
//
// Every query runs through the full search (the untouched optimal baseline)
// and through the linked path sharing one store, which then receives the
// feedback. Interval stats are windowed, not cumulative.

#include <functional>
#include <iosfwd>
#include <string>

#include "querylink/config.hpp"
#include "querylink/stats.hpp"

namespace querylink {

struct RunOutput {
  StatsSeries series;
  StoreStats storeStats;
};

struct RunHooks {
  std::ostream* trace = nullptr;          // engine trace lines
  std::ostream* storeDump = nullptr;      // store dump after the run
  bool strictStoreChecks = false;         // per-mutation invariant checks
  // Called after each query with (ordinal, fullResult, linkedResult).
  std::function<void(long, const EvalResult&, const EvalResult&)> onQuery;
};

RunOutput run_experiment(const ExperimentConfig& cfg, const RunHooks& hooks = {});

// CSV file name for one run: "<name>_s<seed>.csv".
std::string run_csv_name(const ExperimentConfig& cfg);

}  // namespace querylink
