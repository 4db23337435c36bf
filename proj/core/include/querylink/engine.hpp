#pragma once

// Query evaluation: an exhaustive full-search path and a link-assisted path
// that share one cascade, so the two agree exactly whenever the store is
// empty or disabled.
//
// The cascade walks the where-tree leaf by leaf (left-to-right by default).
// Each leaf pulls candidate instances per side with strict precedence:
//   1. survivors of earlier evaluation for that source type (previous-eval)
//   2. top-level link targets, target side only: for each origin instance
//      still in play, lookup(path) — origins with no links drop out of the
//      pairing, and only touched instances count as fetches
//   3. the full population of the type
// Satisfying pairs never relate an instance to itself. And-nodes intersect
// survivor sets per type and filter later leaves; Or-children evaluate
// against the same incoming context and union their survivors.
//
// The answer binds, per surviving select type, the instance maximising its
// summed select values; remaining compared types bind the instance that
// supports the most leaves alongside already-bound partners. A linked
// evaluation that ends unsatisfied after using links anywhere re-runs as a
// full search and carries both node counts. Before the attempt, a coverage
// probe declines queries whose leaves lack trusted links for the origins in
// play, and a fixed fraction of covered queries is re-answered from the full
// population anyway so the store keeps being retrained.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "querylink/linkstore.hpp"
#include "querylink/types.hpp"

namespace querylink {

enum class Provenance { PREVIOUS_EVAL, LINKS, FULL_SEARCH };

const char* to_string(Provenance p);

enum class LeafOrder { LTR, RTL };

// One satisfying (lhs, rhs) instance pair of a comparison leaf.
struct InstancePair {
  InstanceId lhs;
  InstanceId rhs;

  bool operator==(const InstancePair&) const = default;
};

// A link edge (origin -> target) consulted while sourcing a leaf.
struct LinkEdge {
  InstanceId origin;
  InstanceId target;
};

struct LeafReport {
  Comparison comparison;
  Provenance lhsProvenance = Provenance::FULL_SEARCH;
  Provenance rhsProvenance = Provenance::FULL_SEARCH;
  std::vector<InstancePair> pairs;    // satisfying pairs, lhs-major order
  std::vector<LinkEdge> linkEdges;    // present when links sourced the leaf
  // Index mirrors of `pairs` into the network populations.
  int lhsTypeIndex = -1;
  int rhsTypeIndex = -1;
  std::vector<std::pair<int, int>> pairIndices;
};

struct EvalResult {
  Answer answer;
  long nodesSearched = 0;
  bool usedLinks = false;
  bool fellBackToFull = false;
  // Reports for the evaluation that produced `answer`, in where-tree text
  // order (left to right).
  std::vector<LeafReport> leaves;
  // When a fallback re-run produced the answer, the attempt's reports are
  // kept here for feedback; otherwise empty.
  std::vector<LeafReport> attemptLeaves;

  const std::vector<LeafReport>& attempt_reports() const {
    return fellBackToFull ? attemptLeaves : leaves;
  }
};

struct EvalOptions {
  Direction direction = Direction::FORWARDS;
  LeafOrder leafOrder = LeafOrder::LTR;
};

class Evaluator {
 public:
  Evaluator(const Network& net, EvalOptions options = {});

  // Store-free exhaustive evaluation; the optimal answer.
  EvalResult evaluate_full(const Query& q) const;

  // Link-assisted evaluation with fallback. The store is only read.
  EvalResult evaluate_linked(const Query& q, const LinkStore& store) const;

  // Applies evidence from a finished evaluation. Satisfied answers computed
  // from the full population teach the store: per leaf, a positive for every
  // satisfying pair onto the answer's bound target, plus pairs onto targets
  // that tie the bound one on the query's selected values (through origins
  // that also reach the bound target, or origins already holding trusted
  // refs). Linked answers teach nothing, so the store never reinforces its
  // own suggestions.
  void feedback(LinkStore& store, const EvalResult& result,
                const Query& q) const;

  const EvalOptions& options() const { return options_; }

 private:
  const Network& net_;
  EvalOptions options_;
};

// One line per query: text, per-leaf provenance, node count, flags.
std::string trace_line(long queryOrdinal, const Query& q,
                       const EvalResult& r);

}  // namespace querylink
