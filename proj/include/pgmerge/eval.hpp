#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgmerge/mos.hpp"
#include "pgmerge/pgraph.hpp"
#include "pgmerge/rnsm.hpp"

namespace pgmerge {

struct BenchResult {
  std::string strategy;
  std::uint32_t ef = 0;
  double recall_at_k = 0;
  double qps = 0;
  double mean_ndc = 0;
  double build_or_merge_ms = 0;
};

/// Exact top-k by exhaustive scan; ties by lower global id. The oracle
/// behind every recall figure.
GroundTruth brute_force_knn(const VectorSet& base, const VectorSet& queries,
                            std::uint32_t k, unsigned workers = 1);

/// |first-k of results ∩ truth row| / k.
double recall_at_k(std::span<const std::uint64_t> result_ids,
                   std::span<const std::uint32_t> truth_row, std::size_t k);

/// Single-threaded query sweep over ef values; one row per ef. When
/// dump_dir is set, writes result ids per sweep point as
/// results_<label>_ef<EF>.ivecs so every recall number can be recomputed.
std::vector<BenchResult> bench_search(const ProximityGraph& graph,
                                      const VectorSet& queries,
                                      const GroundTruth& truth,
                                      std::span<const std::uint32_t> ef_sweep,
                                      std::uint32_t k, const std::string& label,
                                      const std::filesystem::path* dump_dir = nullptr);

/// Same sweep through separated_search across all partition indexes.
std::vector<BenchResult> bench_separated(std::span<const ProximityGraph> indexes,
                                         const VectorSet& queries,
                                         const GroundTruth& truth,
                                         std::span<const std::uint32_t> ef_sweep,
                                         std::uint32_t k, const std::string& label);

/// Smallest candidate ef whose mean separated recall@k exceeds target;
/// the merge-search beam width convention. Falls back to the largest
/// candidate when none qualifies.
std::uint32_t choose_ef_separated(std::span<const ProximityGraph> indexes,
                                  const VectorSet& queries, const GroundTruth& truth,
                                  std::uint32_t k, double target_recall,
                                  std::span<const std::uint32_t> candidates);

/// Piecewise-linear recall as a function of QPS over a sweep; empty when
/// qps lies outside the sweep's range.
std::optional<double> interp_recall_at_qps(std::span<const BenchResult> sweep,
                                           double qps);

enum class CompareStrategy {
  naive,
  rnsm,
  rnsm_mos_random,
  rnsm_mos_centroid,
  rebuild,
  separated,
};

struct StrategyReport {
  std::string label;
  std::uint64_t merge_ndc = 0;
  double merge_wall_ms = 0;
  std::size_t merge_edges = 0;
  std::vector<BenchResult> sweep;
};

/// Runs each strategy end-to-end on identical partitions, indexes, queries
/// and seeds. Pairwise strategies use the complete merge-order graph; MOS
/// strategies plan with the given R and delta.
std::vector<StrategyReport> compare_merge_strategies(
    std::span<const VectorSet> partitions, std::span<const CompareStrategy> strategies,
    const BuildParams& bparams, const MergeParams& mparams, const VectorSet& queries,
    std::uint32_t k, std::span<const std::uint32_t> ef_sweep, std::uint32_t R,
    std::uint32_t delta);

enum class Topology { path, star, mst, mos, random_regular };

struct TopologyReport {
  std::string label;
  std::size_t edge_count = 0;
  std::uint64_t merge_ndc = 0;
  double merge_wall_ms = 0;
  std::vector<BenchResult> sweep;
};

/// Multi-merges identical cluster-partition indexes along each topology
/// and benches the results. MST comes from a standard Prim construction
/// over the cost matrix; random_regular matches MOS's edge count.
std::vector<TopologyReport> compare_merge_orders(
    std::span<const ProximityGraph> indexes, const CostMatrix& costs,
    std::span<const Topology> topologies, const MergeParams& mparams,
    const VectorSet& queries, const GroundTruth& truth,
    std::span<const std::uint32_t> ef_sweep, std::uint32_t k, std::uint32_t R,
    std::uint32_t delta, std::uint64_t seed);

/// Builds the named topology as a merge-order graph.
MergeOrderGraph make_topology(Topology topology, const CostMatrix& costs,
                              std::uint32_t R, std::uint32_t delta,
                              std::uint64_t seed);

struct PivotVariantRow {
  std::string variant;
  std::uint32_t k = 0;
  double sliding_ratio = 0;
};

/// Local-sliding ratio per variant per k: hub-first rnsm, random-order
/// pivot cover, and the iterative chain-sliding comparator.
std::vector<PivotVariantRow> pivot_variant_study(const ProximityGraph& source,
                                                 std::span<const std::uint32_t> ks,
                                                 std::uint32_t k_plus,
                                                 std::uint64_t seed);

// CSV emission; every file starts with "# pgmerge-report v1" and a
// config-echo comment line.
void write_bench_csv(std::span<const BenchResult> rows,
                     const std::filesystem::path& path, const std::string& config);
void write_strategy_csv(std::span<const StrategyReport> reports,
                        const std::filesystem::path& path, const std::string& config);
void write_topology_csv(std::span<const TopologyReport> reports,
                        const std::filesystem::path& path, const std::string& config);
void write_pivot_csv(std::span<const PivotVariantRow> rows,
                     const std::filesystem::path& path, const std::string& config);
void write_merge_report_csv(const MergeReport& report,
                            const std::filesystem::path& path,
                            const std::string& config);
void write_slide_samples_csv(std::span<const SlideSample> samples,
                             const std::filesystem::path& path,
                             const std::string& config);

} // namespace pgmerge
