#pragma once

// Domain model for banded-value information networks and select-from-where
// queries over them.
//
// A Network is a catalog of source types, each holding a fixed population of
// instances. Every instance carries one integer per value type; the value
// type catalog is shared across the whole network. Queries select (type,
// value) fields from a From list and constrain them with a binary tree of
// pairwise comparisons.

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace querylink {

using SourceTypeId = std::string;
using ValueTypeId = std::string;
using InstanceId = std::string;

enum class CompareOp { EQ, GT, LT };

const char* to_string(CompareOp op);
CompareOp compare_op_from_string(const std::string& s);
bool compare_values(CompareOp op, int lhs, int rhs);

// One (source type, value type) field, as used in Select lists and on either
// side of a comparison.
struct FieldRef {
  SourceTypeId type;
  ValueTypeId value;

  bool operator==(const FieldRef&) const = default;
  auto operator<=>(const FieldRef&) const = default;
};

struct Comparison {
  FieldRef lhs;
  FieldRef rhs;
  CompareOp op = CompareOp::EQ;

  bool operator==(const Comparison&) const = default;
};

enum class LogicalOp { AND, OR };

// Binary where-tree. Leaves are comparisons; inner nodes carry And/Or.
struct WhereNode {
  // Exactly one of `leaf` or (`logical`, `left`, `right`) is active.
  bool is_leaf = true;
  Comparison leaf;
  LogicalOp logical = LogicalOp::AND;
  std::unique_ptr<WhereNode> left;
  std::unique_ptr<WhereNode> right;

  static std::unique_ptr<WhereNode> make_leaf(Comparison c);
  static std::unique_ptr<WhereNode> make_node(LogicalOp op,
                                              std::unique_ptr<WhereNode> l,
                                              std::unique_ptr<WhereNode> r);
  std::unique_ptr<WhereNode> clone() const;
  bool equals(const WhereNode& other) const;
  int leaf_count() const;
};

struct Query {
  std::vector<FieldRef> select;
  std::vector<SourceTypeId> from;
  std::unique_ptr<WhereNode> where;

  Query() = default;
  Query(const Query& other);
  Query& operator=(const Query& other);
  Query(Query&&) = default;
  Query& operator=(Query&&) = default;

  bool operator==(const Query& other) const;
};

struct SourceInstance {
  InstanceId id;
  SourceTypeId type;
  std::vector<int> values;  // indexed like Network::valueTypes

  int value_at(size_t valueIdx) const { return values.at(valueIdx); }
};

class Network {
 public:
  Network(std::vector<SourceTypeId> sourceTypes,
          std::vector<ValueTypeId> valueTypes);

  // Instances must be appended type by type; values.size() must match the
  // value type catalog.
  void add_instance(const SourceTypeId& type, InstanceId id,
                    std::vector<int> values);

  const std::vector<SourceTypeId>& source_types() const { return sourceTypes_; }
  const std::vector<ValueTypeId>& value_types() const { return valueTypes_; }

  int type_index(const SourceTypeId& t) const;       // -1 when unknown
  int value_index(const ValueTypeId& v) const;       // -1 when unknown
  const std::vector<SourceInstance>& instances_of(int typeIdx) const;
  const SourceInstance& instance(int typeIdx, int instIdx) const;
  const SourceInstance* find_instance(const InstanceId& id) const;
  // (typeIdx, instIdx) for an instance id; {-1, -1} when unknown.
  std::pair<int, int> instance_ref(const InstanceId& id) const;
  size_t total_instances() const;

 private:
  std::vector<SourceTypeId> sourceTypes_;
  std::vector<ValueTypeId> valueTypes_;
  std::vector<std::vector<SourceInstance>> instances_;  // [typeIdx]
  std::map<SourceTypeId, int> typeIndex_;
  std::map<ValueTypeId, int> valueIndex_;
  std::map<InstanceId, std::pair<int, int>> instanceIndex_;
};

// Result of evaluating a query. `bindings` holds one instance per source
// type that survived a satisfied branch of the where-tree; `value` is the
// sum of the selected values over bound select types (0 when unsatisfied).
struct Answer {
  std::map<SourceTypeId, InstanceId> bindings;
  int value = 0;
  bool satisfied = false;

  bool operator==(const Answer&) const = default;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

// Structural validation: non-empty select/from, select types within From,
// leaf fields scoped to From, no leaf comparing a field with itself.
// Duplicate select entries are legal but reported as warnings.
ValidationReport validate_query(const Query& q);

// Same checks plus name resolution against a network catalog.
ValidationReport validate_query(const Query& q, const Network& net);

// Sum of the selected values under the given bindings. Throws
// std::invalid_argument when a select type is unbound or a name does not
// resolve against the network.
int answer_value(const std::map<SourceTypeId, InstanceId>& bindings,
                 const Query& q, const Network& net);

}  // namespace querylink
