#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "pgmerge/pgraph.hpp"

namespace pgmerge {

struct MergeParams {
  std::uint32_t k_plus = 20;  // neighbor expansion size
  std::uint32_t k = 5;        // reverse-neighbor size, k <= k_plus
  std::uint32_t k_cross = 10; // cross-index neighbors requested per node
  std::uint32_t ef_merge = 64;
  // Beam width for follower (sliding) searches. Followers start next to
  // their answer region, so they need only enough beam to surface k_cross
  // results; 0 selects max(k_cross + 6, 16).
  std::uint32_t ef_follower = 0;
  unsigned workers = 1;
  std::uint64_t seed = 42;

  std::uint32_t follower_ef() const {
    return ef_follower ? ef_follower : std::max(k_cross + 6, 16u);
  }
};

/// Reverse k-NN structure over a source graph's expanded neighborhoods:
/// rnn[x] = { y : x in knn[y] }.
struct ReverseIndex {
  std::uint32_t k = 0;
  std::vector<std::vector<NodeId>> knn;
  std::vector<std::vector<NodeId>> rnn;

  std::size_t rnn_count(NodeId x) const { return rnn[x].size(); }
};

constexpr NodeId kNoPivot = std::numeric_limits<NodeId>::max();

/// Greedy cover of the source nodes: pivots search naively, followers
/// slide from their assigned pivot.
struct PivotPlan {
  std::vector<NodeId> pivots;       // selection order
  std::vector<NodeId> assignment;   // follower -> pivot; kNoPivot for pivots
  std::vector<std::uint8_t> covered;

  std::size_t follower_count() const {
    std::size_t c = 0;
    for (NodeId p : assignment) {
      c += p != kNoPivot;
    }
    return c;
  }
};

struct SlideSample {
  double pivot_dist = 0; // true distance follower -> pivot
  std::uint64_t ndc = 0; // cost of the follower's sliding search
};

struct MergeReport {
  std::size_t pivots = 0;
  std::size_t followers = 0;
  double sliding_ratio = 0; // followers / (pivots + followers)
  std::uint64_t total_ndc = 0;
  double phase1_ms = 0;
  double phase2_ms = 0;
  double phase3_ms = 0;
  double wall_ms = 0;
  unsigned workers = 1;
  std::vector<SlideSample> samples; // one per follower, in follower order
};

/// Per-node k_plus nearest ids within the graph's own set, each list
/// ascending by distance. Gathers candidates from the node's hop-bounded
/// neighborhood (two hops, widened until k_plus are found), treating the
/// pruned graph as a compressed kNN graph; costs O(k_plus) evaluations
/// per node instead of a full beam search.
std::vector<std::vector<NodeId>> expand_neighbors(const ProximityGraph& graph,
                                                  std::uint32_t k_plus,
                                                  unsigned workers = 1,
                                                  std::uint64_t* ndc = nullptr);

ReverseIndex build_reverse_index(const std::vector<std::vector<NodeId>>& expanded,
                                 std::uint32_t k);

/// Hub-first greedy: nodes in descending |rnn| (ties: lower id); an
/// uncovered node becomes a pivot and adopts its uncovered reverse
/// neighbors.
PivotPlan select_pivots(const ReverseIndex& rindex);

/// Same greedy cover with a caller-supplied processing order (comparison
/// variants in eval).
PivotPlan select_pivots_with_order(const ReverseIndex& rindex,
                                   std::span<const NodeId> order);

/// Dominating-pivot-selection objective: gamma * |pivots| + sum of true
/// follower->pivot distances. Diagnostic only.
double dps_cost(const PivotPlan& plan, const VectorSet& set, double gamma);

/// Mean NDC of naive searches into `target` for sampled probe vectors;
/// the measured naive-search constant used by dps_cost diagnostics.
double measure_gamma(const ProximityGraph& target, const VectorSet& probes,
                     std::uint32_t ef, std::uint32_t k_cross, std::uint64_t seed,
                     std::size_t sample_count = 100);

/// Re-selects `node`'s adjacency from current neighbors plus cross-index
/// results (sorted ascending, squared distances), then attempts reverse
/// edges for surviving cross links. Distance evaluations tally into *ndc.
void update_graph(ProximityGraph& merged, NodeId node,
                  std::span<const Candidate> cross_results,
                  std::uint64_t* ndc = nullptr);

/// Baseline pairwise merge: every source node performs a naive search in
/// the target index. Requires disjoint global ids and equal dims.
std::pair<ProximityGraph, MergeReport> naive_merge(const ProximityGraph& source,
                                                   const ProximityGraph& target,
                                                   const MergeParams& params);

/// Reverse Neighbor Sliding Merge: expansion, reverse-index inversion,
/// hub-first pivot selection, then parallel per-pivot-group merging where
/// followers seed their searches with the pivot's results. Requires
/// source.count() <= target.count().
std::pair<ProximityGraph, MergeReport> rnsm_merge(const ProximityGraph& source,
                                                  const ProximityGraph& target,
                                                  const MergeParams& params);

enum class MergeStrategy { naive, rnsm };

/// Dispatch wrapper; swaps the pair when source is the larger side.
std::pair<ProximityGraph, MergeReport> merge_pair(const ProximityGraph& source,
                                                  const ProximityGraph& target,
                                                  const MergeParams& params,
                                                  MergeStrategy strategy);

namespace detail {

/// Merged container: target nodes keep ids [0, t), source nodes follow at
/// [t, t+s). Validates dim equality and global-id disjointness.
ProximityGraph make_union_graph(const ProximityGraph& source,
                                const ProximityGraph& target);

/// Cross-links `source` nodes into `target` with updates applied to
/// `unified`, where source node i lives at src_offset + i and target node
/// j at tgt_offset + j. All searches run on the immutable `target` graph.
/// Shared engine behind naive_merge, rnsm_merge and multi_merge.
MergeReport cross_link(const ProximityGraph& source, const ProximityGraph& target,
                       ProximityGraph& unified, NodeId src_offset,
                       NodeId tgt_offset, const MergeParams& params,
                       MergeStrategy strategy);

} // namespace detail

} // namespace pgmerge
