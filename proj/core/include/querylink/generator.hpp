#pragma once

// Seeded generation of networks and query streams.
//
// Both source types and value types are chosen through probability bands: a
// band is picked by its percentage weight, then a member uniformly inside
// it. Band weights skew how often the same few types recur across queries,
// which is what gives the link store something to learn.

#include <stdexcept>
#include <string>
#include <vector>

#include "querylink/rng.hpp"
#include "querylink/types.hpp"

namespace querylink {

class GenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Band {
  int probability = 0;  // percentage weight, (0, 100]
  std::vector<std::string> members;
};

struct NetworkConfig {
  int sourceTypeCount = 0;
  int instancesPerType = 0;
  int valueTypeCount = 0;
  int valueLo = 1;
  int valueHi = 10;
  std::vector<Band> sourceBands;  // partition of the source type names
  std::vector<Band> valueBands;   // partition of the value type names
};

struct QueryConfig {
  int maxSelect = 2;
  int maxFrom = 3;
  int maxWhereLeaves = 3;
  std::vector<CompareOp> operators{CompareOp::EQ};
  int andOrSplit = 50;  // percentage of logical nodes that are And
  bool allowSameTypeComparison = true;
};

// Source type names are single letters A.., value type names Value1..;
// both derive from the counts in NetworkConfig.
std::vector<SourceTypeId> source_type_names(int count);
std::vector<ValueTypeId> value_type_names(int count);

// Validates band partitions, weights summing to 100, counts and ranges.
// Throws GenError on violations.
void validate_network_config(const NetworkConfig& cfg);
void validate_query_config(const QueryConfig& cfg, const NetworkConfig& net);

// Weighted band pick, then uniform member pick.
std::string pick_banded(const std::vector<Band>& bands, SeededRng& rng);

// Same, skipping members already taken. Bands whose members are exhausted
// drop out and the remaining weights renormalise. Throws GenError when
// everything is taken.
std::string pick_banded_excluding(const std::vector<Band>& bands,
                                  const std::vector<std::string>& taken,
                                  SeededRng& rng);

// Fills every instance value uniformly from [valueLo, valueHi]. Instance
// ids are "<type><ordinal>" starting at 1 (A1..A30, B1..).
Network generate_network(const NetworkConfig& cfg, SeededRng& rng);

// Draw order: From size, From members (banded, without replacement), select
// size, select entries (uniform From type + banded value type), leaf count,
// tree shape (logical op then left/right split), then each leaf's fields.
// Identical (type, value) pairs on both sides of a leaf are redrawn.
Query generate_query(const NetworkConfig& netCfg, const QueryConfig& qCfg,
                     SeededRng& rng);

}  // namespace querylink
