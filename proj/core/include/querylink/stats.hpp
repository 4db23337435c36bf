#pragma once

// Windowed experiment statistics and their CSV form.
//
// Percentages are rounded to two decimals when an interval is sealed, so a
// written CSV parses back to bit-identical IntervalStats.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace querylink {

struct IntervalStats {
  int intervalIndex = 0;
  long linkedAnswered = 0;      // queries whose evaluation used links
  long nodesLinked = 0;         // linked-path fetches, fallback included
  long nodesFullBaseline = 0;   // full-search baseline fetches
  double searchReductionPct = 0.0;
  double qosLossPct = 0.0;      // mean loss over satisfied optimal > 0
  long optimalMatchCount = 0;   // linked value == optimal value
  long worseCount = 0;          // eligible queries answered below optimal
  double meanWorseGapPct = 0.0;
  long linkedOnlyNodes = 0;     // fetches over linked, non-fallback queries

  bool operator==(const IntervalStats&) const = default;
};

struct SeriesMeta {
  uint64_t seed = 0;
  std::string configHash;
  std::string codeVersion;
  long linkedOnlyNodesTotal = 0;
  long linkedOnlyBaselineTotal = 0;  // baseline fetches over the same queries

  bool operator==(const SeriesMeta&) const = default;
};

struct StatsSeries {
  SeriesMeta meta;
  std::vector<IntervalStats> intervals;

  bool operator==(const StatsSeries&) const = default;
};

struct Summary {
  double finalSearchReductionPct = 0.0;
  double finalQoSLossPct = 0.0;
  double linkedOnlyReductionPct = 0.0;
};

// Final-interval metrics plus the whole-run linked-only reduction.
Summary summarize(const StatsSeries& series);

// Metadata comment line, header row, one row per interval. Fixed column
// order; percentages with two decimals.
void write_csv(const StatsSeries& series, std::ostream& os);
void write_csv_file(const StatsSeries& series, const std::string& path);

// Exact inverse of write_csv. Throws std::runtime_error on malformed input.
StatsSeries read_csv(std::istream& is);
StatsSeries read_csv_file(const std::string& path);

// Round half away from zero to two decimals; the rounding every percentage
// field goes through.
double round2(double x);

extern const char* const kCsvHeader;

}  // namespace querylink
