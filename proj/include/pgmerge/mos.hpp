#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "pgmerge/pgraph.hpp"
#include "pgmerge/rnsm.hpp"

namespace pgmerge {

enum class CostKind { random_unit, centroid_distance };

/// Symmetric partition-level merge cost matrix with zero diagonal.
struct CostMatrix {
  std::size_t m = 0;
  std::vector<double> costs; // m*m row-major
  CostKind kind = CostKind::random_unit;

  double at(std::size_t i, std::size_t j) const { return costs[i * m + j]; }
  double& at(std::size_t i, std::size_t j) { return costs[i * m + j]; }
};

/// Partition-level merge schedule: vertices are partitions, each edge is
/// one pairwise merge. hops holds all-pairs shortest path hop counts
/// (kUnreachable when disconnected).
struct MergeOrderGraph {
  std::size_t m = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges; // i < j
  std::uint32_t degree_bound = 4;
  std::uint32_t diameter_bound = 2;
  std::vector<int> hops; // m*m

  // Connectivity-repair diagnostics.
  std::size_t repair_edge_count = 0;
  std::size_t degree_violations = 0;

  int hop(std::size_t i, std::size_t j) const { return hops[i * m + j]; }
  std::vector<std::uint32_t> degrees() const;
  bool connected() const;
  int diameter() const; // kUnreachable when disconnected
  double total_cost(const CostMatrix& costs) const;
};

constexpr int kUnreachable = 1 << 29;

CostMatrix build_cost_matrix(std::span<const VectorSet> partitions, CostKind kind);
CostMatrix build_cost_matrix_from_centroids(const VectorSet& centroids, CostKind kind);

/// Greedy merge-order construction: processes vertices by ascending mean
/// cost to their R nearest peers, connects each to its cheapest vertex
/// more than delta hops away, relaying through a saturated endpoint's
/// cheapest unsaturated neighbor when needed. A final repair pass joins
/// any remaining components by minimum-cost edges regardless of R.
MergeOrderGraph mos_plan(const CostMatrix& costs, std::uint32_t R,
                         std::uint32_t delta = 2);

/// Complete graph baseline (every pair merges).
MergeOrderGraph pairwise_plan(std::size_t m);

// plan.json: {"m":int,"edges":[[i,j],...],"R":int,"delta":int}
void save_plan(const MergeOrderGraph& plan, const std::filesystem::path& path);
MergeOrderGraph load_plan(const std::filesystem::path& path);

struct MultiMergeReport {
  std::vector<MergeReport> per_edge;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_order;
  std::uint64_t total_ndc = 0;
  double wall_ms = 0;
};

/// Merges all partition indexes into one graph along the plan's edges:
/// spanning edges first (cheapest-first, always touching the grown
/// component), then chords. Each edge runs an RNSM cross-link between the
/// two partitions inside the unified graph, smaller side as source.
std::pair<ProximityGraph, MultiMergeReport> multi_merge(
    std::span<const ProximityGraph> indexes, const MergeOrderGraph& plan,
    const CostMatrix& costs, const MergeParams& params,
    MergeStrategy strategy = MergeStrategy::rnsm);

struct GlobalCandidate {
  std::uint64_t id = 0; // global id
  double dist = 0;
};

/// Fans the query out to every partition index and merges the per-index
/// top-k lists into a global top-k. The degraded multi-index baseline.
std::pair<std::vector<GlobalCandidate>, SearchStats> separated_search(
    std::span<const ProximityGraph> indexes, std::span<const float> query,
    std::uint32_t ef, std::uint32_t k);

/// Recomputes the hop matrix by BFS from scratch (plan-file loading and
/// the incremental-update cross-check).
std::vector<int> hops_by_bfs(std::size_t m,
                             std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

} // namespace pgmerge
