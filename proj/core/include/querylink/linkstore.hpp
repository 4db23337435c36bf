#pragma once

// Three-level weighted reference store keyed by comparison paths.
//
// A path names the question "starting from this origin instance's value,
// which instances of that type satisfied this comparison"; for example
// [b1, Value2, A, Value1, EQ] keys references from B instance b1 to A
// instances whose Value1 equalled b1's Value2. References enter at the
// bottom level, climb on reinforcement and sink on misses, and only
// top-level references are trusted enough to be returned by lookup.
//
// Weight automaton: below the top, weights sit in (demotionFloor,
// promotionThreshold]. A positive bumps the weight; crossing above the
// threshold moves the ref up one level at weight floor+1. Top-level weights
// keep climbing past the threshold, a running count of reconfirmations. A
// negative drops the weight; reaching the floor moves the ref down one level
// at weight promotionThreshold, or removes it entirely from level 1.
//
// Each level holds at most capacityPerLevel refs; inserting into a full
// level first evicts the lowest-weight (oldest on tie) ref.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "querylink/types.hpp"

namespace querylink {

enum class Direction { FORWARDS, BACKWARDS };

const char* to_string(Direction d);

enum class Polarity { POSITIVE, NEGATIVE };

struct PathKey {
  InstanceId origin;
  ValueTypeId originValue;
  SourceTypeId targetType;
  ValueTypeId targetValue;
  CompareOp op = CompareOp::EQ;

  bool operator==(const PathKey&) const = default;
  auto operator<=>(const PathKey&) const = default;
};

struct PathKeyHash {
  size_t operator()(const PathKey& k) const;
};

// FORWARDS links run lhs instance -> rhs instances, BACKWARDS the reverse.
// Throws std::invalid_argument when the origin's type does not match the
// comparison side the direction makes it own.
PathKey build_path(const Comparison& c, const SourceInstance& origin,
                   Direction dir);

struct LinkRef {
  InstanceId target;
  int weight = 0;
  uint64_t insertedAt = 0;  // monotonic per store, stamped on level entry
};

struct StoreConstants {
  int capacityPerLevel = 50;
  int promotionThreshold = 3;
  int demotionFloor = 0;
};

struct StoreStats {
  size_t entryCount = 0;
  size_t levelCounts[3] = {0, 0, 0};
  uint64_t evictions = 0;
  uint64_t rejectedSelfLinks = 0;
};

class LinkStore {
 public:
  static constexpr int kLevels = 3;

  explicit LinkStore(StoreConstants constants = {});

  const StoreConstants& constants() const { return constants_; }

  // Applies one piece of evidence for (key -> target). Self-links
  // (target == key.origin) are rejected and counted, never stored.
  // A negative for an unknown target is a no-op.
  void record_evidence(const PathKey& key, const InstanceId& target,
                       Polarity polarity);

  // Top-level targets only, ordered by descending weight then ascending
  // insertion stamp. Empty when the key is absent or nothing has climbed.
  std::vector<InstanceId> lookup(const PathKey& key) const;

  // True when lookup(key) would return anything, without building the list.
  bool has_top_refs(const PathKey& key) const;

  bool empty() const { return entries_.empty(); }
  StoreStats stats() const;

  // One ref per line, sorted: path fields, target, level, weight.
  void dump(std::ostream& os) const;

  // When set, every mutation re-checks the invariants of the entry it
  // touched (capacity, weight bands, cross-level target uniqueness).
  // Throws std::logic_error on violation.
  void set_strict_checks(bool on) { strictChecks_ = on; }

  // Whole-store sweep of the same invariants.
  void check_invariants() const;

 private:
  struct Entry {
    std::vector<LinkRef> levels[kLevels];  // levels[0] is level 1
  };

  void check_entry(const PathKey& key, const Entry& e) const;
  void insert_ref(Entry& e, int levelIdx, const InstanceId& target,
                  int weight);
  static int find_ref(const Entry& e, const InstanceId& target,
                      int* levelIdx);

  StoreConstants constants_;
  std::unordered_map<PathKey, Entry, PathKeyHash> entries_;
  uint64_t clock_ = 0;
  uint64_t evictions_ = 0;
  uint64_t rejectedSelfLinks_ = 0;
  bool strictChecks_ = false;
};

}  // namespace querylink
