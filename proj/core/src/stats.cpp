#include "querylink/stats.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace querylink {

const char* const kCsvHeader =
    "interval_index,linked_answered,nodes_linked,nodes_full_baseline,"
    "search_reduction_pct,qos_loss_pct,optimal_match_count,worse_count,"
    "mean_worse_gap_pct,linked_only_nodes";

double round2(double x) { return std::llround(x * 100.0) / 100.0; }

namespace {

std::string fmt2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

long parse_long(const std::string& tok, int lineNo) {
  size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("csv line " + std::to_string(lineNo) +
                             ": bad integer '" + tok + "'");
  }
  if (used != tok.size()) {
    throw std::runtime_error("csv line " + std::to_string(lineNo) +
                             ": bad integer '" + tok + "'");
  }
  return v;
}

uint64_t parse_u64(const std::string& tok, int lineNo) {
  size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(tok, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("csv line " + std::to_string(lineNo) +
                             ": bad unsigned integer '" + tok + "'");
  }
  if (used != tok.size()) {
    throw std::runtime_error("csv line " + std::to_string(lineNo) +
                             ": bad unsigned integer '" + tok + "'");
  }
  return v;
}

double parse_double(const std::string& tok, int lineNo) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("csv line " + std::to_string(lineNo) +
                             ": bad number '" + tok + "'");
  }
  if (used != tok.size()) {
    throw std::runtime_error("csv line " + std::to_string(lineNo) +
                             ": bad number '" + tok + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void apply_meta_token(SeriesMeta& meta, const std::string& tok, int lineNo) {
  size_t eq = tok.find('=');
  if (eq == std::string::npos) {
    throw std::runtime_error("csv line " + std::to_string(lineNo) +
                             ": bad metadata token '" + tok + "'");
  }
  std::string key = tok.substr(0, eq);
  std::string val = tok.substr(eq + 1);
  if (key == "seed") {
    meta.seed = parse_u64(val, lineNo);
  } else if (key == "config_hash") {
    meta.configHash = val;
  } else if (key == "code_version") {
    meta.codeVersion = val;
  } else if (key == "linked_only_nodes_total") {
    meta.linkedOnlyNodesTotal = parse_long(val, lineNo);
  } else if (key == "linked_only_baseline_total") {
    meta.linkedOnlyBaselineTotal = parse_long(val, lineNo);
  } else {
    throw std::runtime_error("csv line " + std::to_string(lineNo) +
                             ": unknown metadata key '" + key + "'");
  }
}

}  // namespace

Summary summarize(const StatsSeries& series) {
  Summary s;
  if (!series.intervals.empty()) {
    const IntervalStats& last = series.intervals.back();
    s.finalSearchReductionPct = last.searchReductionPct;
    s.finalQoSLossPct = last.qosLossPct;
  }
  if (series.meta.linkedOnlyBaselineTotal > 0) {
    double frac = static_cast<double>(series.meta.linkedOnlyNodesTotal) /
                  static_cast<double>(series.meta.linkedOnlyBaselineTotal);
    s.linkedOnlyReductionPct = round2(100.0 * (1.0 - frac));
  }
  return s;
}

void write_csv(const StatsSeries& series, std::ostream& os) {
  const SeriesMeta& m = series.meta;
  os << "# seed=" << m.seed << " config_hash=" << m.configHash
     << " code_version=" << m.codeVersion
     << " linked_only_nodes_total=" << m.linkedOnlyNodesTotal
     << " linked_only_baseline_total=" << m.linkedOnlyBaselineTotal << "\n";
  os << kCsvHeader << "\n";
  for (const IntervalStats& s : series.intervals) {
    os << s.intervalIndex << ',' << s.linkedAnswered << ',' << s.nodesLinked
       << ',' << s.nodesFullBaseline << ',' << fmt2(s.searchReductionPct)
       << ',' << fmt2(s.qosLossPct) << ',' << s.optimalMatchCount << ','
       << s.worseCount << ',' << fmt2(s.meanWorseGapPct) << ','
       << s.linkedOnlyNodes << "\n";
  }
}

void write_csv_file(const StatsSeries& series, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_csv(series, os);
  if (!os) throw std::runtime_error("write failed: " + path);
}

StatsSeries read_csv(std::istream& is) {
  StatsSeries series;
  std::string line;
  int lineNo = 0;
  bool sawHeader = false;
  while (std::getline(is, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (sawHeader) {
        throw std::runtime_error("csv line " + std::to_string(lineNo) +
                                 ": metadata after header");
      }
      std::istringstream ts(line.substr(1));
      std::string tok;
      while (ts >> tok) apply_meta_token(series.meta, tok, lineNo);
      continue;
    }
    if (!sawHeader) {
      if (line != kCsvHeader) {
        throw std::runtime_error("csv line " + std::to_string(lineNo) +
                                 ": unexpected header '" + line + "'");
      }
      sawHeader = true;
      continue;
    }
    std::vector<std::string> f = split(line, ',');
    if (f.size() != 10) {
      throw std::runtime_error("csv line " + std::to_string(lineNo) + ": " +
                               std::to_string(f.size()) +
                               " fields, expected 10");
    }
    IntervalStats s;
    s.intervalIndex = static_cast<int>(parse_long(f[0], lineNo));
    s.linkedAnswered = parse_long(f[1], lineNo);
    s.nodesLinked = parse_long(f[2], lineNo);
    s.nodesFullBaseline = parse_long(f[3], lineNo);
    s.searchReductionPct = parse_double(f[4], lineNo);
    s.qosLossPct = parse_double(f[5], lineNo);
    s.optimalMatchCount = parse_long(f[6], lineNo);
    s.worseCount = parse_long(f[7], lineNo);
    s.meanWorseGapPct = parse_double(f[8], lineNo);
    s.linkedOnlyNodes = parse_long(f[9], lineNo);
    series.intervals.push_back(s);
  }
  if (!sawHeader) throw std::runtime_error("csv: missing header row");
  return series;
}

StatsSeries read_csv_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return read_csv(is);
}

}  // namespace querylink
