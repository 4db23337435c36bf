#include "querylink/generator.hpp"

#include <algorithm>
#include <set>

namespace querylink {

std::vector<SourceTypeId> source_type_names(int count) {
  std::vector<SourceTypeId> names;
  names.reserve(count);
  for (int i = 0; i < count; ++i)
    names.push_back(std::string(1, static_cast<char>('A' + i)));
  return names;
}

std::vector<ValueTypeId> value_type_names(int count) {
  std::vector<ValueTypeId> names;
  names.reserve(count);
  for (int i = 0; i < count; ++i)
    names.push_back("Value" + std::to_string(i + 1));
  return names;
}

namespace {

void validate_bands(const std::vector<Band>& bands,
                    const std::vector<std::string>& catalog,
                    const char* what) {
  if (bands.empty()) throw GenError(std::string(what) + ": no bands");
  int total = 0;
  std::set<std::string> seen;
  for (const auto& b : bands) {
    if (b.probability <= 0 || b.probability > 100)
      throw GenError(std::string(what) + ": band probability out of (0,100]");
    total += b.probability;
    if (b.members.empty())
      throw GenError(std::string(what) + ": empty band");
    for (const auto& m : b.members)
      if (!seen.insert(m).second)
        throw GenError(std::string(what) + ": member " + m +
                       " appears in two bands");
  }
  if (total != 100)
    throw GenError(std::string(what) + ": band probabilities sum to " +
                   std::to_string(total) + ", expected 100");
  std::set<std::string> expected(catalog.begin(), catalog.end());
  if (seen != expected)
    throw GenError(std::string(what) +
                   ": bands must partition the catalog exactly");
}

}  // namespace

void validate_network_config(const NetworkConfig& cfg) {
  if (cfg.sourceTypeCount < 1 || cfg.sourceTypeCount > 26)
    throw GenError("sourceTypeCount must be in [1, 26]");
  if (cfg.instancesPerType < 1)
    throw GenError("instancesPerType must be positive");
  if (cfg.valueTypeCount < 1) throw GenError("valueTypeCount must be positive");
  if (cfg.valueLo < 1 || cfg.valueHi < cfg.valueLo)
    throw GenError("value range must satisfy 1 <= lo <= hi");
  std::vector<std::string> src;
  for (auto& s : source_type_names(cfg.sourceTypeCount)) src.push_back(s);
  std::vector<std::string> val;
  for (auto& s : value_type_names(cfg.valueTypeCount)) val.push_back(s);
  validate_bands(cfg.sourceBands, src, "source bands");
  validate_bands(cfg.valueBands, val, "value bands");
}

void validate_query_config(const QueryConfig& cfg, const NetworkConfig& net) {
  if (cfg.maxSelect < 1) throw GenError("maxSelect must be positive");
  if (cfg.maxFrom < 1) throw GenError("maxFrom must be positive");
  if (cfg.maxWhereLeaves < 1) throw GenError("maxWhereLeaves must be positive");
  if (cfg.operators.empty()) throw GenError("operator set is empty");
  if (cfg.andOrSplit < 0 || cfg.andOrSplit > 100)
    throw GenError("andOrSplit must be in [0, 100]");
  if (!cfg.allowSameTypeComparison && net.sourceTypeCount == 1)
    throw GenError(
        "single source type with same-type comparisons disallowed leaves no "
        "legal comparison");
  if (cfg.allowSameTypeComparison && net.valueTypeCount == 1 &&
      net.sourceTypeCount == 1)
    throw GenError(
        "one type and one value type cannot form a comparison with distinct "
        "sides");
}

std::string pick_banded(const std::vector<Band>& bands, SeededRng& rng) {
  int r = static_cast<int>(rng.below(100));
  int cum = 0;
  for (const auto& b : bands) {
    cum += b.probability;
    if (r < cum) return b.members[rng.below(b.members.size())];
  }
  return bands.back().members[rng.below(bands.back().members.size())];
}

std::string pick_banded_excluding(const std::vector<Band>& bands,
                                  const std::vector<std::string>& taken,
                                  SeededRng& rng) {
  auto isTaken = [&taken](const std::string& m) {
    return std::find(taken.begin(), taken.end(), m) != taken.end();
  };
  struct Eligible {
    const Band* band;
    std::vector<const std::string*> members;
  };
  std::vector<Eligible> eligible;
  int totalWeight = 0;
  for (const auto& b : bands) {
    Eligible e{&b, {}};
    for (const auto& m : b.members)
      if (!isTaken(m)) e.members.push_back(&m);
    if (!e.members.empty()) {
      totalWeight += b.probability;
      eligible.push_back(std::move(e));
    }
  }
  if (eligible.empty())
    throw GenError("pick_banded_excluding: all members taken");
  int r = static_cast<int>(rng.below(static_cast<uint64_t>(totalWeight)));
  int cum = 0;
  for (const auto& e : eligible) {
    cum += e.band->probability;
    if (r < cum) return *e.members[rng.below(e.members.size())];
  }
  return *eligible.back().members[rng.below(eligible.back().members.size())];
}

Network generate_network(const NetworkConfig& cfg, SeededRng& rng) {
  validate_network_config(cfg);
  Network net(source_type_names(cfg.sourceTypeCount),
              value_type_names(cfg.valueTypeCount));
  for (const auto& type : net.source_types()) {
    for (int i = 1; i <= cfg.instancesPerType; ++i) {
      std::vector<int> values(cfg.valueTypeCount);
      for (int v = 0; v < cfg.valueTypeCount; ++v)
        values[v] = rng.range(cfg.valueLo, cfg.valueHi);
      net.add_instance(type, type + std::to_string(i), std::move(values));
    }
  }
  return net;
}

namespace {

constexpr int kLeafRedrawCap = 1000;

Comparison generate_leaf(const std::vector<SourceTypeId>& from,
                         const NetworkConfig& netCfg, const QueryConfig& qCfg,
                         SeededRng& rng) {
  Comparison c;
  c.lhs.type = from[rng.below(from.size())];
  c.lhs.value = pick_banded(netCfg.valueBands, rng);
  c.op = qCfg.operators[rng.below(qCfg.operators.size())];
  for (int attempt = 0; attempt < kLeafRedrawCap; ++attempt) {
    if (qCfg.allowSameTypeComparison) {
      c.rhs.type = from[rng.below(from.size())];
    } else {
      std::vector<SourceTypeId> others;
      for (const auto& t : from)
        if (t != c.lhs.type) others.push_back(t);
      if (others.empty())
        throw GenError("cannot draw a distinct comparison type from a "
                       "single-type from list");
      c.rhs.type = others[rng.below(others.size())];
    }
    c.rhs.value = pick_banded(netCfg.valueBands, rng);
    if (c.rhs != c.lhs) return c;
  }
  throw GenError("leaf redraw cap hit; comparison constraints unsatisfiable");
}

std::unique_ptr<WhereNode> generate_tree(int leafCount,
                                         const std::vector<SourceTypeId>& from,
                                         const NetworkConfig& netCfg,
                                         const QueryConfig& qCfg,
                                         SeededRng& rng) {
  if (leafCount == 1)
    return WhereNode::make_leaf(generate_leaf(from, netCfg, qCfg, rng));
  LogicalOp op = rng.chance_pct(qCfg.andOrSplit) ? LogicalOp::AND : LogicalOp::OR;
  int leftCount = rng.range(1, leafCount - 1);
  auto left = generate_tree(leftCount, from, netCfg, qCfg, rng);
  auto right = generate_tree(leafCount - leftCount, from, netCfg, qCfg, rng);
  return WhereNode::make_node(op, std::move(left), std::move(right));
}

}  // namespace

Query generate_query(const NetworkConfig& netCfg, const QueryConfig& qCfg,
                     SeededRng& rng) {
  Query q;
  int fromSize = rng.range(1, std::min(qCfg.maxFrom, netCfg.sourceTypeCount));
  if (!qCfg.allowSameTypeComparison && fromSize == 1 &&
      netCfg.sourceTypeCount > 1)
    fromSize = 2;
  for (int i = 0; i < fromSize; ++i)
    q.from.push_back(pick_banded_excluding(netCfg.sourceBands, q.from, rng));

  int selectSize = rng.range(1, qCfg.maxSelect);
  for (int i = 0; i < selectSize; ++i) {
    FieldRef f;
    f.type = q.from[rng.below(q.from.size())];
    f.value = pick_banded(netCfg.valueBands, rng);
    q.select.push_back(f);
  }

  int leafCount = rng.range(1, qCfg.maxWhereLeaves);
  q.where = generate_tree(leafCount, q.from, netCfg, qCfg, rng);
  return q;
}

}  // namespace querylink
