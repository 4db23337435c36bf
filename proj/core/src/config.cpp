#include "querylink/config.hpp"

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace querylink {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) fail(where, "unknown key '" + it.key() + "'");
  }
}

const json& require(const json& obj, const std::string& where,
                    const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing key '" + key + "'");
  return *it;
}

int get_int(const json& obj, const std::string& where, const std::string& key,
            int fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) fail(where + "." + key, "expected an integer");
  return it->get<int>();
}

long get_long(const json& obj, const std::string& where,
              const std::string& key, long fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) fail(where + "." + key, "expected an integer");
  return it->get<long>();
}

bool get_bool(const json& obj, const std::string& where,
              const std::string& key, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) fail(where + "." + key, "expected a boolean");
  return it->get<bool>();
}

std::vector<Band> parse_bands(const json& arr, const std::string& where) {
  if (!arr.is_array()) fail(where, "expected an array of bands");
  std::vector<Band> bands;
  int i = 0;
  for (const json& b : arr) {
    std::string at = where + "[" + std::to_string(i++) + "]";
    if (!b.is_object()) fail(at, "expected an object");
    reject_unknown_keys(b, at, {"probability", "members"});
    Band band;
    const json& p = require(b, at, "probability");
    if (!p.is_number_integer()) fail(at + ".probability", "expected an integer");
    band.probability = p.get<int>();
    const json& m = require(b, at, "members");
    if (!m.is_array()) fail(at + ".members", "expected an array of strings");
    for (const json& s : m) {
      if (!s.is_string()) fail(at + ".members", "expected an array of strings");
      band.members.push_back(s.get<std::string>());
    }
    bands.push_back(std::move(band));
  }
  return bands;
}

json bands_to_json(const std::vector<Band>& bands) {
  json arr = json::array();
  for (const Band& b : bands) {
    arr.push_back({{"probability", b.probability}, {"members", b.members}});
  }
  return arr;
}

Direction direction_from_string(const std::string& s,
                                const std::string& where) {
  if (s == "forwards") return Direction::FORWARDS;
  if (s == "backwards") return Direction::BACKWARDS;
  fail(where, "expected 'forwards' or 'backwards', got '" + s + "'");
}

LeafOrder leaf_order_from_string(const std::string& s,
                                 const std::string& where) {
  if (s == "ltr") return LeafOrder::LTR;
  if (s == "rtl") return LeafOrder::RTL;
  fail(where, "expected 'ltr' or 'rtl', got '" + s + "'");
}

json config_json(const ExperimentConfig& cfg, bool withSeed) {
  json net{
      {"source_type_count", cfg.network.sourceTypeCount},
      {"instances_per_type", cfg.network.instancesPerType},
      {"value_type_count", cfg.network.valueTypeCount},
      {"value_range", json::array({cfg.network.valueLo, cfg.network.valueHi})},
      {"source_bands", bands_to_json(cfg.network.sourceBands)},
      {"value_bands", bands_to_json(cfg.network.valueBands)},
  };
  json ops = json::array();
  for (CompareOp op : cfg.query.operators) ops.push_back(to_string(op));
  json query{
      {"max_select", cfg.query.maxSelect},
      {"max_from", cfg.query.maxFrom},
      {"max_where_leaves", cfg.query.maxWhereLeaves},
      {"operators", ops},
      {"and_or_split", cfg.query.andOrSplit},
      {"allow_same_type_comparison", cfg.query.allowSameTypeComparison},
  };
  json experiment{
      {"total_queries", cfg.totalQueries},
      {"interval_size", cfg.intervalSize},
      {"direction", to_string(cfg.direction)},
      {"leaf_order", cfg.leafOrder == LeafOrder::LTR ? "ltr" : "rtl"},
      {"store",
       {{"capacity_per_level", cfg.store.capacityPerLevel},
        {"promotion_threshold", cfg.store.promotionThreshold},
        {"demotion_floor", cfg.store.demotionFloor}}},
  };
  if (withSeed) experiment["seed"] = cfg.seed;
  return json{{"name", cfg.name},
              {"network", net},
              {"query", query},
              {"experiment", experiment}};
}

}  // namespace

ExperimentConfig parse_config(const std::string& jsonText) {
  json root;
  try {
    root = json::parse(jsonText);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) fail("config", "top level must be an object");
  reject_unknown_keys(root, "config", {"name", "network", "query", "experiment"});

  ExperimentConfig cfg;
  const json& nameJ = require(root, "config", "name");
  if (!nameJ.is_string()) fail("config.name", "expected a string");
  cfg.name = nameJ.get<std::string>();

  const json& net = require(root, "config", "network");
  if (!net.is_object()) fail("config.network", "expected an object");
  reject_unknown_keys(net, "config.network",
                      {"source_type_count", "instances_per_type",
                       "value_type_count", "value_range", "source_bands",
                       "value_bands"});
  const std::string nw = "config.network";
  auto require_int = [](const json& obj, const std::string& where,
                        const std::string& key) {
    const json& v = require(obj, where, key);
    if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
    return v.get<int>();
  };
  cfg.network.sourceTypeCount = require_int(net, nw, "source_type_count");
  cfg.network.instancesPerType = require_int(net, nw, "instances_per_type");
  cfg.network.valueTypeCount = require_int(net, nw, "value_type_count");
  if (auto it = net.find("value_range"); it != net.end()) {
    if (!it->is_array() || it->size() != 2 ||
        !(*it)[0].is_number_integer() || !(*it)[1].is_number_integer()) {
      fail(nw + ".value_range", "expected [lo, hi]");
    }
    cfg.network.valueLo = (*it)[0].get<int>();
    cfg.network.valueHi = (*it)[1].get<int>();
  }
  cfg.network.sourceBands =
      parse_bands(require(net, nw, "source_bands"), nw + ".source_bands");
  cfg.network.valueBands =
      parse_bands(require(net, nw, "value_bands"), nw + ".value_bands");

  if (auto it = root.find("query"); it != root.end()) {
    const json& q = *it;
    if (!q.is_object()) fail("config.query", "expected an object");
    reject_unknown_keys(q, "config.query",
                        {"max_select", "max_from", "max_where_leaves",
                         "operators", "and_or_split",
                         "allow_same_type_comparison"});
    const std::string qw = "config.query";
    cfg.query.maxSelect = get_int(q, qw, "max_select", cfg.query.maxSelect);
    cfg.query.maxFrom = get_int(q, qw, "max_from", cfg.query.maxFrom);
    cfg.query.maxWhereLeaves =
        get_int(q, qw, "max_where_leaves", cfg.query.maxWhereLeaves);
    if (auto opsIt = q.find("operators"); opsIt != q.end()) {
      if (!opsIt->is_array()) fail(qw + ".operators", "expected an array");
      cfg.query.operators.clear();
      for (const json& s : *opsIt) {
        if (!s.is_string()) fail(qw + ".operators", "expected strings");
        try {
          cfg.query.operators.push_back(
              compare_op_from_string(s.get<std::string>()));
        } catch (const std::invalid_argument& e) {
          fail(qw + ".operators", e.what());
        }
      }
    }
    cfg.query.andOrSplit =
        get_int(q, qw, "and_or_split", cfg.query.andOrSplit);
    cfg.query.allowSameTypeComparison =
        get_bool(q, qw, "allow_same_type_comparison",
                 cfg.query.allowSameTypeComparison);
  }

  if (auto it = root.find("experiment"); it != root.end()) {
    const json& e = *it;
    if (!e.is_object()) fail("config.experiment", "expected an object");
    reject_unknown_keys(e, "config.experiment",
                        {"total_queries", "interval_size", "direction",
                         "leaf_order", "store", "seed"});
    const std::string ew = "config.experiment";
    cfg.totalQueries = get_long(e, ew, "total_queries", cfg.totalQueries);
    cfg.intervalSize = get_long(e, ew, "interval_size", cfg.intervalSize);
    if (auto dIt = e.find("direction"); dIt != e.end()) {
      if (!dIt->is_string()) fail(ew + ".direction", "expected a string");
      cfg.direction =
          direction_from_string(dIt->get<std::string>(), ew + ".direction");
    }
    if (auto oIt = e.find("leaf_order"); oIt != e.end()) {
      if (!oIt->is_string()) fail(ew + ".leaf_order", "expected a string");
      cfg.leafOrder =
          leaf_order_from_string(oIt->get<std::string>(), ew + ".leaf_order");
    }
    if (auto sIt = e.find("store"); sIt != e.end()) {
      if (!sIt->is_object()) fail(ew + ".store", "expected an object");
      reject_unknown_keys(*sIt, ew + ".store",
                          {"capacity_per_level", "promotion_threshold",
                           "demotion_floor"});
      const std::string sw = ew + ".store";
      cfg.store.capacityPerLevel = get_int(*sIt, sw, "capacity_per_level",
                                           cfg.store.capacityPerLevel);
      cfg.store.promotionThreshold = get_int(
          *sIt, sw, "promotion_threshold", cfg.store.promotionThreshold);
      cfg.store.demotionFloor =
          get_int(*sIt, sw, "demotion_floor", cfg.store.demotionFloor);
    }
    if (auto seedIt = e.find("seed"); seedIt != e.end()) {
      if (!seedIt->is_number_integer() ||
          (seedIt->is_number_integer() && !seedIt->is_number_unsigned() &&
           seedIt->get<long long>() < 0)) {
        fail(ew + ".seed", "expected a non-negative integer");
      }
      cfg.seed = seedIt->get<uint64_t>();
    }
  }

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  return config_json(cfg, true).dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::string canon = config_json(cfg, false).dump();
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.name.empty()) throw ConfigError("config.name: must not be empty");
  try {
    validate_network_config(cfg.network);
    validate_query_config(cfg.query, cfg.network);
  } catch (const GenError& e) {
    throw ConfigError(e.what());
  }
  if (cfg.totalQueries <= 0) {
    throw ConfigError("config.experiment.total_queries: must be positive");
  }
  if (cfg.intervalSize <= 0) {
    throw ConfigError("config.experiment.interval_size: must be positive");
  }
  if (cfg.totalQueries % cfg.intervalSize != 0) {
    throw ConfigError(
        "config.experiment.total_queries: must be a multiple of "
        "interval_size");
  }
  if (cfg.store.capacityPerLevel < 1) {
    throw ConfigError("config.experiment.store.capacity_per_level: must be >= 1");
  }
  if (cfg.store.demotionFloor < 0) {
    throw ConfigError("config.experiment.store.demotion_floor: must be >= 0");
  }
  if (cfg.store.promotionThreshold <= cfg.store.demotionFloor) {
    throw ConfigError(
        "config.experiment.store.promotion_threshold: must exceed "
        "demotion_floor");
  }
}

}  // namespace querylink
