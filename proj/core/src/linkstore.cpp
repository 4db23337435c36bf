#include "querylink/linkstore.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <tuple>

namespace querylink {

const char* to_string(Direction d) {
  return d == Direction::FORWARDS ? "forwards" : "backwards";
}

size_t PathKeyHash::operator()(const PathKey& k) const {
  // FNV-1a over the key fields with separators.
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0x1f;
    h *= 1099511628211ULL;
  };
  mix(k.origin);
  mix(k.originValue);
  mix(k.targetType);
  mix(k.targetValue);
  h ^= static_cast<uint64_t>(k.op);
  h *= 1099511628211ULL;
  return static_cast<size_t>(h);
}

PathKey build_path(const Comparison& c, const SourceInstance& origin,
                   Direction dir) {
  PathKey key;
  key.op = c.op;
  if (dir == Direction::FORWARDS) {
    if (origin.type != c.lhs.type)
      throw std::invalid_argument("forwards path origin " + origin.id +
                                  " is not of type " + c.lhs.type);
    key.origin = origin.id;
    key.originValue = c.lhs.value;
    key.targetType = c.rhs.type;
    key.targetValue = c.rhs.value;
  } else {
    if (origin.type != c.rhs.type)
      throw std::invalid_argument("backwards path origin " + origin.id +
                                  " is not of type " + c.rhs.type);
    key.origin = origin.id;
    key.originValue = c.rhs.value;
    key.targetType = c.lhs.type;
    key.targetValue = c.lhs.value;
  }
  return key;
}

LinkStore::LinkStore(StoreConstants constants) : constants_(constants) {
  if (constants_.capacityPerLevel < 1)
    throw std::invalid_argument("capacityPerLevel must be positive");
  if (constants_.demotionFloor < 0)
    throw std::invalid_argument("demotionFloor must be non-negative");
  if (constants_.promotionThreshold <= constants_.demotionFloor)
    throw std::invalid_argument(
        "promotionThreshold must exceed demotionFloor");
}

int LinkStore::find_ref(const Entry& e, const InstanceId& target,
                        int* levelIdx) {
  for (int l = 0; l < kLevels; ++l) {
    for (size_t i = 0; i < e.levels[l].size(); ++i) {
      if (e.levels[l][i].target == target) {
        *levelIdx = l;
        return static_cast<int>(i);
      }
    }
  }
  return -1;
}

void LinkStore::insert_ref(Entry& e, int levelIdx, const InstanceId& target,
                           int weight) {
  auto& level = e.levels[levelIdx];
  if (level.size() >= static_cast<size_t>(constants_.capacityPerLevel)) {
    // Evict the lowest weight; oldest stamp breaks ties.
    size_t victim = 0;
    for (size_t i = 1; i < level.size(); ++i) {
      if (level[i].weight < level[victim].weight ||
          (level[i].weight == level[victim].weight &&
           level[i].insertedAt < level[victim].insertedAt))
        victim = i;
    }
    level.erase(level.begin() + static_cast<long>(victim));
    ++evictions_;
  }
  level.push_back(LinkRef{target, weight, ++clock_});
}

void LinkStore::record_evidence(const PathKey& key, const InstanceId& target,
                                Polarity polarity) {
  if (target == key.origin) {
    ++rejectedSelfLinks_;
    return;
  }
  const int floor = constants_.demotionFloor;
  const int threshold = constants_.promotionThreshold;

  if (polarity == Polarity::POSITIVE) {
    Entry& e = entries_[key];
    int levelIdx = -1;
    int refIdx = find_ref(e, target, &levelIdx);
    if (refIdx < 0) {
      insert_ref(e, 0, target, floor + 1);
    } else {
      LinkRef& ref = e.levels[levelIdx][refIdx];
      ++ref.weight;
      // Top-level weights keep growing: there is nowhere left to promote
      // to, so the weight becomes a running score of how often the ref is
      // reconfirmed.
      if (ref.weight > threshold && levelIdx + 1 < kLevels) {
        e.levels[levelIdx].erase(e.levels[levelIdx].begin() + refIdx);
        insert_ref(e, levelIdx + 1, target, floor + 1);
      }
    }
    if (strictChecks_) check_entry(key, e);
  } else {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    Entry& e = it->second;
    int levelIdx = -1;
    int refIdx = find_ref(e, target, &levelIdx);
    if (refIdx < 0) return;
    LinkRef& ref = e.levels[levelIdx][refIdx];
    --ref.weight;
    if (ref.weight <= floor) {
      e.levels[levelIdx].erase(e.levels[levelIdx].begin() + refIdx);
      if (levelIdx > 0) insert_ref(e, levelIdx - 1, target, threshold);
      bool empty = true;
      for (const auto& level : e.levels)
        if (!level.empty()) empty = false;
      if (empty) {
        entries_.erase(it);
        return;
      }
    }
    if (strictChecks_) check_entry(key, e);
  }
}

std::vector<InstanceId> LinkStore::lookup(const PathKey& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return {};
  const auto& top = it->second.levels[kLevels - 1];
  std::vector<const LinkRef*> refs;
  refs.reserve(top.size());
  for (const auto& r : top) refs.push_back(&r);
  std::sort(refs.begin(), refs.end(), [](const LinkRef* a, const LinkRef* b) {
    if (a->weight != b->weight) return a->weight > b->weight;
    return a->insertedAt < b->insertedAt;
  });
  std::vector<InstanceId> out;
  out.reserve(refs.size());
  for (const auto* r : refs) out.push_back(r->target);
  return out;
}

bool LinkStore::has_top_refs(const PathKey& key) const {
  auto it = entries_.find(key);
  return it != entries_.end() && !it->second.levels[kLevels - 1].empty();
}

StoreStats LinkStore::stats() const {
  StoreStats s;
  s.entryCount = entries_.size();
  for (const auto& [key, e] : entries_)
    for (int l = 0; l < kLevels; ++l) s.levelCounts[l] += e.levels[l].size();
  s.evictions = evictions_;
  s.rejectedSelfLinks = rejectedSelfLinks_;
  return s;
}

void LinkStore::dump(std::ostream& os) const {
  struct Row {
    const PathKey* key;
    int level;
    const LinkRef* ref;
  };
  std::vector<Row> rows;
  for (const auto& [key, e] : entries_)
    for (int l = 0; l < kLevels; ++l)
      for (const auto& r : e.levels[l]) rows.push_back(Row{&key, l + 1, &r});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (*a.key != *b.key) return *a.key < *b.key;
    if (a.level != b.level) return a.level > b.level;
    if (a.ref->weight != b.ref->weight) return a.ref->weight > b.ref->weight;
    if (a.ref->insertedAt != b.ref->insertedAt)
      return a.ref->insertedAt < b.ref->insertedAt;
    return a.ref->target < b.ref->target;
  });
  for (const auto& row : rows) {
    os << row.key->origin << ' ' << row.key->originValue << ' '
       << row.key->targetType << ' ' << row.key->targetValue << ' '
       << to_string(row.key->op) << ' ' << row.ref->target << ' ' << row.level
       << ' ' << row.ref->weight << '\n';
  }
}

void LinkStore::check_entry(const PathKey& key, const Entry& e) const {
  const int floor = constants_.demotionFloor;
  const int threshold = constants_.promotionThreshold;
  std::map<InstanceId, int> seen;
  for (int l = 0; l < kLevels; ++l) {
    if (e.levels[l].size() > static_cast<size_t>(constants_.capacityPerLevel))
      throw std::logic_error("capacity exceeded at level " +
                             std::to_string(l + 1));
    for (const auto& r : e.levels[l]) {
      if (r.weight <= floor || (l + 1 < kLevels && r.weight > threshold))
        throw std::logic_error("weight " + std::to_string(r.weight) +
                               " outside (" + std::to_string(floor) + ", " +
                               std::to_string(threshold) + "]");
      if (r.target == key.origin) throw std::logic_error("self link stored");
      if (++seen[r.target] > 1)
        throw std::logic_error("target " + r.target +
                               " present at two levels of one entry");
    }
  }
}

void LinkStore::check_invariants() const {
  for (const auto& [key, e] : entries_) check_entry(key, e);
}

}  // namespace querylink
