#include "querylink/engine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "querylink/parser.hpp"

namespace querylink {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::PREVIOUS_EVAL:
      return "prev";
    case Provenance::LINKS:
      return "links";
    case Provenance::FULL_SEARCH:
      return "full";
  }
  return "unknown";
}

namespace {

// One covered query in this many is re-answered from the full population
// so the store keeps hearing about answers its links have drifted away
// from. Keyed off the query text, not a counter, so replays stay
// deterministic.
constexpr uint64_t kRevalidationStride = 16;

uint64_t query_text_hash(const Query& q) {
  uint64_t h = 1469598103934665603ULL;
  for (char c : render_query(q)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

struct LeafInfo {
  const WhereNode* node = nullptr;
  int lhsType = -1;
  int lhsValue = -1;
  int rhsType = -1;
  int rhsValue = -1;
};

struct NodeOutcome {
  bool satisfied = false;
  std::map<int, std::vector<int>> sets;  // typeIdx -> sorted survivor indices
};

std::vector<int> intersect_sorted(const std::vector<int>& a,
                                  const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

std::vector<int> union_sorted(const std::vector<int>& a,
                              const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

int require_type(const Network& net, const SourceTypeId& t) {
  int idx = net.type_index(t);
  if (idx < 0) throw std::invalid_argument("unknown source type: " + t);
  return idx;
}

int require_value(const Network& net, const ValueTypeId& v) {
  int idx = net.value_index(v);
  if (idx < 0) throw std::invalid_argument("unknown value type: " + v);
  return idx;
}

// Resolves every name in the query and lists the leaves in text order.
std::vector<LeafInfo> plan_leaves(const Network& net, const Query& q) {
  if (!q.where) throw std::invalid_argument("query has no where clause");
  for (const auto& t : q.from) require_type(net, t);
  for (const auto& f : q.select) {
    require_type(net, f.type);
    require_value(net, f.value);
  }
  std::vector<LeafInfo> leaves;
  std::function<void(const WhereNode&)> walk = [&](const WhereNode& n) {
    if (n.is_leaf) {
      LeafInfo info;
      info.node = &n;
      info.lhsType = require_type(net, n.leaf.lhs.type);
      info.lhsValue = require_value(net, n.leaf.lhs.value);
      info.rhsType = require_type(net, n.leaf.rhs.type);
      info.rhsValue = require_value(net, n.leaf.rhs.value);
      leaves.push_back(info);
      return;
    }
    walk(*n.left);
    walk(*n.right);
  };
  walk(*q.where);
  return leaves;
}

// Answering through links only pays off when every leaf that will need
// target candidates can draw them from the store. Walks the leaves in
// evaluation order, tracking which types will already carry survivor sets,
// and asks the store whether any origin instance has trusted refs for each
// leaf that would otherwise full-search its target side.
bool links_cover(const Network& net, const EvalOptions& options,
                 const Query& q, const LinkStore& store) {
  std::vector<LeafInfo> leaves = plan_leaves(net, q);
  const bool originIsLhs = options.direction == Direction::FORWARDS;
  std::set<int> ctxTypes;
  for (size_t step = 0; step < leaves.size(); ++step) {
    const LeafInfo& info = options.leafOrder == LeafOrder::LTR
                               ? leaves[step]
                               : leaves[leaves.size() - 1 - step];
    const int originType = originIsLhs ? info.lhsType : info.rhsType;
    const int targetType = originIsLhs ? info.rhsType : info.lhsType;
    if (!ctxTypes.count(targetType)) {
      bool covered = false;
      for (const SourceInstance& inst : net.instances_of(originType)) {
        if (store.has_top_refs(
                build_path(info.node->leaf, inst, options.direction))) {
          covered = true;
          break;
        }
      }
      if (!covered) return false;
    } else if (!ctxTypes.count(originType)) {
      // Links never serve the origin side; this leaf would scan the origin
      // population in full no matter what the store holds.
      return false;
    }
    ctxTypes.insert(info.lhsType);
    ctxTypes.insert(info.rhsType);
  }
  return true;
}

struct SideResolution {
  std::vector<int> candidates;
  Provenance provenance = Provenance::FULL_SEARCH;
  long fetched = 0;
};

class Cascade {
 public:
  Cascade(const Network& net, const EvalOptions& options,
          const LinkStore* store, const std::vector<LeafInfo>& leaves)
      : net_(net), options_(options), store_(store), reports_(leaves.size()) {
    for (size_t i = 0; i < leaves.size(); ++i) leafIndex_[leaves[i].node] = i;
    for (const auto& info : leaves) infoByNode_[info.node] = info;
  }

  NodeOutcome run(const WhereNode& root) { return eval(root); }

  long nodes_searched() const { return nodesSearched_; }
  bool used_links() const { return usedLinks_; }
  std::vector<LeafReport> take_reports() { return std::move(reports_); }

 private:
  std::vector<int> all_indices(int typeIdx) const {
    std::vector<int> v(net_.instances_of(typeIdx).size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
    return v;
  }

  void overlay(const std::map<int, std::vector<int>>& sets) {
    for (const auto& [t, s] : sets) ctx_[t] = s;
  }

  SideResolution resolve_plain(int typeIdx) const {
    auto it = ctx_.find(typeIdx);
    if (it != ctx_.end()) {
      return {it->second, Provenance::PREVIOUS_EVAL,
              static_cast<long>(it->second.size())};
    }
    std::vector<int> all = all_indices(typeIdx);
    long n = static_cast<long>(all.size());
    return {std::move(all), Provenance::FULL_SEARCH, n};
  }

  NodeOutcome eval_leaf(const WhereNode& n) {
    const LeafInfo& info = infoByNode_.at(&n);
    LeafReport& rep = reports_[leafIndex_.at(&n)];
    rep.comparison = n.leaf;
    rep.lhsTypeIndex = info.lhsType;
    rep.rhsTypeIndex = info.rhsType;

    const bool originIsLhs = options_.direction == Direction::FORWARDS;
    const int originType = originIsLhs ? info.lhsType : info.rhsType;
    const int targetType = originIsLhs ? info.rhsType : info.lhsType;

    SideResolution lhsSide;
    SideResolution rhsSide;
    std::vector<std::pair<int, int>> pairIdx;  // (lhsIdx, rhsIdx)
    bool linkMode = false;

    if (store_ && ctx_.find(targetType) == ctx_.end()) {
      auto ctxOrigin = ctx_.find(originType);
      std::vector<int> originScan = ctxOrigin != ctx_.end()
                                        ? ctxOrigin->second
                                        : all_indices(originType);
      std::vector<std::pair<int, int>> edges;  // (originIdx, targetIdx)
      for (int o : originScan) {
        PathKey key = build_path(n.leaf, net_.instance(originType, o),
                                 options_.direction);
        for (const InstanceId& tid : store_->lookup(key)) {
          auto [tt, ti] = net_.instance_ref(tid);
          if (tt != targetType) continue;
          edges.emplace_back(o, ti);
        }
      }
      if (!edges.empty()) {
        linkMode = true;
        usedLinks_ = true;
        std::vector<int> touchedOrigins;
        std::vector<int> targets;
        for (const auto& [o, t] : edges) {
          touchedOrigins.push_back(o);
          targets.push_back(t);
          rep.linkEdges.push_back({net_.instance(originType, o).id,
                                   net_.instance(targetType, t).id});
        }
        sort_unique(touchedOrigins);
        sort_unique(targets);

        SideResolution originSide;
        if (ctxOrigin != ctx_.end()) {
          originSide = {ctxOrigin->second, Provenance::PREVIOUS_EVAL,
                        static_cast<long>(ctxOrigin->second.size())};
        } else {
          long n2 = static_cast<long>(touchedOrigins.size());
          originSide = {std::move(touchedOrigins), Provenance::LINKS, n2};
        }
        long nt = static_cast<long>(targets.size());
        SideResolution targetSide{std::move(targets), Provenance::LINKS, nt};

        for (const auto& [o, t] : edges) {
          int l = originIsLhs ? o : t;
          int r = originIsLhs ? t : o;
          if (info.lhsType == info.rhsType && l == r) continue;
          int lv = net_.instance(info.lhsType, l).value_at(
              static_cast<size_t>(info.lhsValue));
          int rv = net_.instance(info.rhsType, r).value_at(
              static_cast<size_t>(info.rhsValue));
          if (compare_values(n.leaf.op, lv, rv)) pairIdx.emplace_back(l, r);
        }
        std::sort(pairIdx.begin(), pairIdx.end());
        pairIdx.erase(std::unique(pairIdx.begin(), pairIdx.end()),
                      pairIdx.end());

        lhsSide = originIsLhs ? std::move(originSide) : std::move(targetSide);
        rhsSide = originIsLhs ? std::move(targetSide) : std::move(originSide);
      }
    }

    if (!linkMode) {
      lhsSide = resolve_plain(info.lhsType);
      rhsSide = resolve_plain(info.rhsType);
      for (int l : lhsSide.candidates) {
        int lv = net_.instance(info.lhsType, l).value_at(
            static_cast<size_t>(info.lhsValue));
        for (int r : rhsSide.candidates) {
          if (info.lhsType == info.rhsType && l == r) continue;
          int rv = net_.instance(info.rhsType, r).value_at(
              static_cast<size_t>(info.rhsValue));
          if (compare_values(n.leaf.op, lv, rv)) pairIdx.emplace_back(l, r);
        }
      }
    }

    nodesSearched_ += lhsSide.fetched + rhsSide.fetched;
    rep.lhsProvenance = lhsSide.provenance;
    rep.rhsProvenance = rhsSide.provenance;
    rep.pairIndices = pairIdx;
    rep.pairs.reserve(pairIdx.size());
    for (const auto& [l, r] : pairIdx) {
      rep.pairs.push_back({net_.instance(info.lhsType, l).id,
                           net_.instance(info.rhsType, r).id});
    }

    NodeOutcome out;
    out.satisfied = !pairIdx.empty();
    std::vector<int> lhsSurvivors;
    std::vector<int> rhsSurvivors;
    for (const auto& [l, r] : pairIdx) {
      lhsSurvivors.push_back(l);
      rhsSurvivors.push_back(r);
    }
    sort_unique(lhsSurvivors);
    sort_unique(rhsSurvivors);
    if (info.lhsType == info.rhsType) {
      out.sets[info.lhsType] = union_sorted(lhsSurvivors, rhsSurvivors);
    } else {
      out.sets[info.lhsType] = std::move(lhsSurvivors);
      out.sets[info.rhsType] = std::move(rhsSurvivors);
    }
    return out;
  }

  NodeOutcome eval(const WhereNode& n) {
    if (n.is_leaf) {
      NodeOutcome out = eval_leaf(n);
      overlay(out.sets);
      return out;
    }
    const bool ltr = options_.leafOrder == LeafOrder::LTR;
    const WhereNode& first = ltr ? *n.left : *n.right;
    const WhereNode& second = ltr ? *n.right : *n.left;

    NodeOutcome out;
    if (n.logical == LogicalOp::AND) {
      NodeOutcome a = eval(first);
      NodeOutcome b = eval(second);
      out.satisfied = a.satisfied && b.satisfied;
      for (const auto& [t, s] : a.sets) {
        auto it = b.sets.find(t);
        if (it == b.sets.end()) {
          out.sets[t] = s;
        } else {
          std::vector<int> both = intersect_sorted(s, it->second);
          if (both.empty()) out.satisfied = false;
          out.sets[t] = std::move(both);
        }
      }
      for (const auto& [t, s] : b.sets) {
        if (!a.sets.count(t)) out.sets[t] = s;
      }
    } else {
      std::map<int, std::vector<int>> saved = ctx_;
      NodeOutcome a = eval(first);
      ctx_ = saved;
      NodeOutcome b = eval(second);
      ctx_ = std::move(saved);
      out.satisfied = a.satisfied || b.satisfied;
      for (const auto& [t, s] : a.sets) {
        auto it = b.sets.find(t);
        out.sets[t] =
            it == b.sets.end() ? s : union_sorted(s, it->second);
      }
      for (const auto& [t, s] : b.sets) {
        if (!a.sets.count(t)) out.sets[t] = s;
      }
    }
    if (out.satisfied) {
      // An empty set on a satisfied node means the type was constrained
      // only inside unsatisfied branches; it drops out as unconstrained.
      for (auto it = out.sets.begin(); it != out.sets.end();) {
        if (it->second.empty()) {
          it = out.sets.erase(it);
        } else {
          ++it;
        }
      }
    }
    overlay(out.sets);
    return out;
  }

  const Network& net_;
  const EvalOptions& options_;
  const LinkStore* store_;
  std::vector<LeafReport> reports_;
  std::map<const WhereNode*, size_t> leafIndex_;
  std::map<const WhereNode*, LeafInfo> infoByNode_;
  std::map<int, std::vector<int>> ctx_;
  long nodesSearched_ = 0;
  bool usedLinks_ = false;
};

Answer derive_answer(const Network& net, const Query& q,
                     const NodeOutcome& root,
                     const std::vector<LeafReport>& reports) {
  Answer a;
  if (!root.satisfied) return a;
  a.satisfied = true;

  // Select types in first-appearance order, with per-type value multiplicity.
  std::vector<int> selectOrder;
  std::map<int, std::vector<int>> selectValues;
  for (const auto& f : q.select) {
    int t = net.type_index(f.type);
    int v = net.value_index(f.value);
    if (!selectValues.count(t)) selectOrder.push_back(t);
    selectValues[t].push_back(v);
  }

  std::map<int, int> bound;  // typeIdx -> instIdx
  for (int t : selectOrder) {
    auto it = root.sets.find(t);
    if (it == root.sets.end() || it->second.empty()) continue;
    int bestIdx = -1;
    long bestSum = 0;
    for (int i : it->second) {
      const SourceInstance& inst = net.instance(t, i);
      long sum = 0;
      for (int v : selectValues[t]) sum += inst.value_at(static_cast<size_t>(v));
      if (bestIdx < 0 || sum > bestSum) {
        bestIdx = i;
        bestSum = sum;
      }
    }
    bound[t] = bestIdx;
  }

  // Remaining surviving types bind the instance pairing with already-bound
  // partners across the most leaves.
  for (const auto& [t, survivors] : root.sets) {
    if (bound.count(t) || survivors.empty()) continue;
    int bestIdx = -1;
    int bestScore = -1;
    for (int i : survivors) {
      int score = 0;
      for (const LeafReport& rep : reports) {
        bool hit = false;
        if (rep.lhsTypeIndex == t) {
          auto bIt = bound.find(rep.rhsTypeIndex);
          if (bIt != bound.end()) {
            for (const auto& [l, r] : rep.pairIndices) {
              if (l == i && r == bIt->second) {
                hit = true;
                break;
              }
            }
          }
        }
        if (!hit && rep.rhsTypeIndex == t) {
          auto bIt = bound.find(rep.lhsTypeIndex);
          if (bIt != bound.end()) {
            for (const auto& [l, r] : rep.pairIndices) {
              if (r == i && l == bIt->second) {
                hit = true;
                break;
              }
            }
          }
        }
        if (hit) ++score;
      }
      if (score > bestScore) {
        bestScore = score;
        bestIdx = i;
      }
    }
    bound[t] = bestIdx;
  }

  for (int t : selectOrder) {
    auto it = bound.find(t);
    if (it == bound.end()) continue;
    const SourceInstance& inst = net.instance(t, it->second);
    for (int v : selectValues[t]) {
      a.value += inst.value_at(static_cast<size_t>(v));
    }
  }
  for (const auto& [t, i] : bound) {
    a.bindings[net.source_types()[static_cast<size_t>(t)]] =
        net.instance(t, i).id;
  }
  return a;
}

EvalResult eval_once(const Network& net, const EvalOptions& options,
                     const Query& q, const LinkStore* store) {
  std::vector<LeafInfo> leaves = plan_leaves(net, q);
  Cascade cascade(net, options, store, leaves);
  NodeOutcome root = cascade.run(*q.where);
  EvalResult r;
  r.nodesSearched = cascade.nodes_searched();
  r.usedLinks = cascade.used_links();
  r.leaves = cascade.take_reports();
  r.answer = derive_answer(net, q, root, r.leaves);
  return r;
}

}  // namespace

Evaluator::Evaluator(const Network& net, EvalOptions options)
    : net_(net), options_(options) {}

EvalResult Evaluator::evaluate_full(const Query& q) const {
  return eval_once(net_, options_, q, nullptr);
}

EvalResult Evaluator::evaluate_linked(const Query& q,
                                      const LinkStore& store) const {
  if (query_text_hash(q) % kRevalidationStride == 0 ||
      !links_cover(net_, options_, q, store)) {
    return eval_once(net_, options_, q, nullptr);
  }
  EvalResult attempt = eval_once(net_, options_, q, &store);
  if (!attempt.usedLinks) return attempt;
  if (attempt.answer.satisfied) return attempt;

  EvalResult full = eval_once(net_, options_, q, nullptr);
  EvalResult r;
  r.answer = full.answer;
  r.nodesSearched = attempt.nodesSearched + full.nodesSearched;
  r.usedLinks = true;
  r.fellBackToFull = true;
  r.leaves = std::move(full.leaves);
  r.attemptLeaves = std::move(attempt.leaves);
  return r;
}

void Evaluator::feedback(LinkStore& store, const EvalResult& result,
                         const Query& q) const {
  const bool originIsLhs = options_.direction == Direction::FORWARDS;

  // Only answers drawn from the full population teach: reinforcing the
  // store's own suggestions would freeze whatever it believed first. Every
  // satisfying pair onto a winning target counts, so all origins that can
  // reach a winner build their paths up in parallel while the store stays
  // focused on targets that actually win queries. Targets tying the bound
  // instance on the answer's selected fields win under a different
  // tie-break, so they teach too.
  if (result.answer.satisfied &&
      (!result.usedLinks || result.fellBackToFull)) {
    for (const LeafReport& rep : result.leaves) {
      auto bl = result.answer.bindings.find(rep.comparison.lhs.type);
      auto br = result.answer.bindings.find(rep.comparison.rhs.type);
      const bool targetBound = originIsLhs ? br != result.answer.bindings.end()
                                           : bl != result.answer.bindings.end();
      if (!targetBound) continue;
      const InstanceId& boundTarget = originIsLhs ? br->second : bl->second;
      const std::string& targetType =
          originIsLhs ? rep.comparison.rhs.type : rep.comparison.lhs.type;
      std::vector<int> selectDims;
      for (const auto& f : q.select) {
        if (f.type == targetType)
          selectDims.push_back(net_.value_index(f.value));
      }
      long boundSum = 0;
      if (!selectDims.empty()) {
        const SourceInstance* b = net_.find_instance(boundTarget);
        for (int v : selectDims) boundSum += b->value_at(static_cast<size_t>(v));
      }
      std::set<InstanceId> winnerOrigins;
      for (const InstancePair& p : rep.pairs) {
        if ((originIsLhs ? p.rhs : p.lhs) == boundTarget)
          winnerOrigins.insert(originIsLhs ? p.lhs : p.rhs);
      }
      for (const InstancePair& p : rep.pairs) {
        const InstanceId& targetId = originIsLhs ? p.rhs : p.lhs;
        const InstanceId& originId = originIsLhs ? p.lhs : p.rhs;
        const SourceInstance* origin = net_.find_instance(originId);
        PathKey key = build_path(rep.comparison, *origin, options_.direction);
        if (targetId != boundTarget) {
          // Ties widen existing paths but never open new ones; an origin
          // that cannot reach the actual winner stays out of the store.
          if (selectDims.empty()) continue;
          if (!winnerOrigins.count(originId) && !store.has_top_refs(key))
            continue;
          const SourceInstance* t = net_.find_instance(targetId);
          long sum = 0;
          for (int v : selectDims) sum += t->value_at(static_cast<size_t>(v));
          if (sum != boundSum) continue;
        }
        store.record_evidence(key, targetId, Polarity::POSITIVE);
      }
    }
  }
}

std::string trace_line(long queryOrdinal, const Query& q,
                       const EvalResult& r) {
  std::ostringstream os;
  os << "q=" << queryOrdinal << " nodes=" << r.nodesSearched
     << " links=" << (r.usedLinks ? 1 : 0)
     << " fallback=" << (r.fellBackToFull ? 1 : 0)
     << " satisfied=" << (r.answer.satisfied ? 1 : 0)
     << " value=" << r.answer.value << " leaves=";
  for (size_t i = 0; i < r.leaves.size(); ++i) {
    if (i) os << ',';
    os << to_string(r.leaves[i].lhsProvenance) << ':'
       << to_string(r.leaves[i].rhsProvenance);
  }
  os << " text=\"" << render_query(q) << '"';
  return os.str();
}

}  // namespace querylink
