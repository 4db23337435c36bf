#include "querylink/types.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace querylink {

const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::EQ: return "EQ";
    case CompareOp::GT: return "GT";
    case CompareOp::LT: return "LT";
  }
  return "?";
}

CompareOp compare_op_from_string(const std::string& s) {
  if (s == "EQ") return CompareOp::EQ;
  if (s == "GT") return CompareOp::GT;
  if (s == "LT") return CompareOp::LT;
  throw std::invalid_argument("unknown comparison operator: " + s);
}

bool compare_values(CompareOp op, int lhs, int rhs) {
  switch (op) {
    case CompareOp::EQ: return lhs == rhs;
    case CompareOp::GT: return lhs > rhs;
    case CompareOp::LT: return lhs < rhs;
  }
  return false;
}

std::unique_ptr<WhereNode> WhereNode::make_leaf(Comparison c) {
  auto n = std::make_unique<WhereNode>();
  n->is_leaf = true;
  n->leaf = std::move(c);
  return n;
}

std::unique_ptr<WhereNode> WhereNode::make_node(LogicalOp op,
                                                std::unique_ptr<WhereNode> l,
                                                std::unique_ptr<WhereNode> r) {
  auto n = std::make_unique<WhereNode>();
  n->is_leaf = false;
  n->logical = op;
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}

std::unique_ptr<WhereNode> WhereNode::clone() const {
  if (is_leaf) return make_leaf(leaf);
  return make_node(logical, left->clone(), right->clone());
}

bool WhereNode::equals(const WhereNode& other) const {
  if (is_leaf != other.is_leaf) return false;
  if (is_leaf) return leaf == other.leaf;
  return logical == other.logical && left->equals(*other.left) &&
         right->equals(*other.right);
}

int WhereNode::leaf_count() const {
  if (is_leaf) return 1;
  return left->leaf_count() + right->leaf_count();
}

Query::Query(const Query& other)
    : select(other.select),
      from(other.from),
      where(other.where ? other.where->clone() : nullptr) {}

Query& Query::operator=(const Query& other) {
  if (this != &other) {
    select = other.select;
    from = other.from;
    where = other.where ? other.where->clone() : nullptr;
  }
  return *this;
}

bool Query::operator==(const Query& other) const {
  if (select != other.select || from != other.from) return false;
  if (!where || !other.where) return where == other.where;
  return where->equals(*other.where);
}

Network::Network(std::vector<SourceTypeId> sourceTypes,
                 std::vector<ValueTypeId> valueTypes)
    : sourceTypes_(std::move(sourceTypes)), valueTypes_(std::move(valueTypes)) {
  instances_.resize(sourceTypes_.size());
  for (size_t i = 0; i < sourceTypes_.size(); ++i) {
    if (!typeIndex_.emplace(sourceTypes_[i], static_cast<int>(i)).second)
      throw std::invalid_argument("duplicate source type: " + sourceTypes_[i]);
  }
  for (size_t i = 0; i < valueTypes_.size(); ++i) {
    if (!valueIndex_.emplace(valueTypes_[i], static_cast<int>(i)).second)
      throw std::invalid_argument("duplicate value type: " + valueTypes_[i]);
  }
}

void Network::add_instance(const SourceTypeId& type, InstanceId id,
                           std::vector<int> values) {
  int t = type_index(type);
  if (t < 0) throw std::invalid_argument("unknown source type: " + type);
  if (values.size() != valueTypes_.size())
    throw std::invalid_argument("instance " + id + " carries " +
                                std::to_string(values.size()) +
                                " values, catalog has " +
                                std::to_string(valueTypes_.size()));
  int instIdx = static_cast<int>(instances_[t].size());
  if (!instanceIndex_.emplace(id, std::make_pair(t, instIdx)).second)
    throw std::invalid_argument("duplicate instance id: " + id);
  instances_[t].push_back(SourceInstance{std::move(id), type, std::move(values)});
}

int Network::type_index(const SourceTypeId& t) const {
  auto it = typeIndex_.find(t);
  return it == typeIndex_.end() ? -1 : it->second;
}

int Network::value_index(const ValueTypeId& v) const {
  auto it = valueIndex_.find(v);
  return it == valueIndex_.end() ? -1 : it->second;
}

const std::vector<SourceInstance>& Network::instances_of(int typeIdx) const {
  return instances_.at(typeIdx);
}

const SourceInstance& Network::instance(int typeIdx, int instIdx) const {
  return instances_.at(typeIdx).at(instIdx);
}

const SourceInstance* Network::find_instance(const InstanceId& id) const {
  auto it = instanceIndex_.find(id);
  if (it == instanceIndex_.end()) return nullptr;
  return &instances_[it->second.first][it->second.second];
}

std::pair<int, int> Network::instance_ref(const InstanceId& id) const {
  auto it = instanceIndex_.find(id);
  if (it == instanceIndex_.end()) return {-1, -1};
  return it->second;
}

size_t Network::total_instances() const {
  size_t n = 0;
  for (const auto& v : instances_) n += v.size();
  return n;
}

namespace {

void check_structure(const Query& q, ValidationReport& report) {
  if (q.select.empty()) report.errors.push_back("empty select list");
  if (q.from.empty()) report.errors.push_back("empty from list");
  if (!q.where) {
    report.errors.push_back("missing where clause");
    return;
  }

  std::set<SourceTypeId> fromSet(q.from.begin(), q.from.end());
  if (fromSet.size() != q.from.size())
    report.errors.push_back("duplicate type in from list");

  std::set<std::pair<SourceTypeId, ValueTypeId>> seen;
  for (const auto& f : q.select) {
    if (!fromSet.count(f.type))
      report.errors.push_back("select type " + f.type + " not in from list");
    if (!seen.insert({f.type, f.value}).second)
      report.warnings.push_back("duplicate select entry " + f.type + "." +
                                f.value + "; its value is summed twice");
  }

  std::function<void(const WhereNode&)> walk = [&](const WhereNode& n) {
    if (!n.is_leaf) {
      walk(*n.left);
      walk(*n.right);
      return;
    }
    const Comparison& c = n.leaf;
    for (const FieldRef* f : {&c.lhs, &c.rhs}) {
      if (!fromSet.count(f->type))
        report.errors.push_back("comparison type " + f->type +
                                " not in from list");
    }
    if (c.lhs == c.rhs)
      report.errors.push_back("comparison relates " + c.lhs.type + "." +
                              c.lhs.value + " to itself");
  };
  walk(*q.where);
}

}  // namespace

ValidationReport validate_query(const Query& q) {
  ValidationReport report;
  check_structure(q, report);
  return report;
}

ValidationReport validate_query(const Query& q, const Network& net) {
  ValidationReport report;
  check_structure(q, report);
  for (const auto& t : q.from)
    if (net.type_index(t) < 0)
      report.errors.push_back("unknown source type: " + t);
  std::function<void(const FieldRef&)> checkField = [&](const FieldRef& f) {
    if (net.value_index(f.value) < 0)
      report.errors.push_back("unknown value type: " + f.value);
  };
  for (const auto& f : q.select) checkField(f);
  if (q.where) {
    std::function<void(const WhereNode&)> walk = [&](const WhereNode& n) {
      if (!n.is_leaf) {
        walk(*n.left);
        walk(*n.right);
        return;
      }
      checkField(n.leaf.lhs);
      checkField(n.leaf.rhs);
    };
    walk(*q.where);
  }
  return report;
}

int answer_value(const std::map<SourceTypeId, InstanceId>& bindings,
                 const Query& q, const Network& net) {
  int total = 0;
  for (const auto& f : q.select) {
    auto it = bindings.find(f.type);
    if (it == bindings.end())
      throw std::invalid_argument("select type " + f.type + " is unbound");
    const SourceInstance* inst = net.find_instance(it->second);
    if (!inst)
      throw std::invalid_argument("unknown instance: " + it->second);
    if (inst->type != f.type)
      throw std::invalid_argument("instance " + it->second +
                                  " is not of type " + f.type);
    int v = net.value_index(f.value);
    if (v < 0) throw std::invalid_argument("unknown value type: " + f.value);
    total += inst->value_at(static_cast<size_t>(v));
  }
  return total;
}

}  // namespace querylink
