#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "pgmerge/vecstore.hpp"

namespace pgmerge {

using NodeId = std::uint32_t;

/// Per-search cost counters. ndc counts every distance evaluation the
/// search performed, entry seeding included.
struct SearchStats {
  std::uint64_t ndc = 0;
  std::uint64_t hops = 0;
  double elapsed_ms = 0.0;

  SearchStats& operator+=(const SearchStats& o) {
    ndc += o.ndc;
    hops += o.hops;
    elapsed_ms += o.elapsed_ms;
    return *this;
  }
};

struct Candidate {
  NodeId id = 0;
  double dist = 0.0;
};

/// Flat single-layer proximity graph over an owned vector set. Adjacency
/// lists hold node indexes into `vectors`; global identity lives in
/// vectors.ids. Entry point is the first inserted node and never moves.
struct ProximityGraph {
  VectorSet vectors;
  std::vector<std::vector<NodeId>> adjacency;
  std::uint32_t max_degree = 16;
  NodeId entry_point = 0;
  std::uint32_t ef_construction = 100;

  std::size_t count() const { return adjacency.size(); }
};

struct BuildParams {
  std::uint32_t max_degree = 16;
  std::uint32_t ef_construction = 100;
  std::uint64_t seed = 42; // recorded in reports; construction itself is
                           // deterministic in data order
};

/// Best-first beam search. Keeps the ef closest evaluated nodes, expands
/// the nearest unexpanded member until the beam settles, returns the k
/// nearest ascending with true (non-squared) distances. Equal distances
/// order by lower node id.
std::pair<std::vector<Candidate>, SearchStats> beam_search(
    const ProximityGraph& graph, std::span<const float> query, std::uint32_t ef,
    std::uint32_t k, std::span<const NodeId> entries);

/// RNG occlusion rule over candidates sorted ascending by distance to
/// query_id's vector (squared-distance domain). Keeps the nearest
/// unconditionally; keeps c only when it is closer to the query than to
/// every already-kept neighbor. Returns at most max_degree ids. Distance
/// evaluations performed here are tallied into *ndc when given.
std::vector<NodeId> prune_rng(const VectorSet& vectors, NodeId query_id,
                              std::span<const Candidate> candidates,
                              std::uint32_t max_degree,
                              std::uint64_t* ndc = nullptr);

/// Incremental construction: nodes are inserted in data order, each via a
/// beam search over the graph built so far, RNG pruning of the visited
/// pool, and reverse-edge insertion with overflow re-pruning.
ProximityGraph build_index(VectorSet set, const BuildParams& params,
                           std::uint64_t* ndc = nullptr);

/// Inserts one vector using the same procedure as build_index. Returns the
/// new node id. global_id defaults to the next identity id.
NodeId insert_node(ProximityGraph& graph, std::span<const float> vec,
                   std::uint64_t* ndc = nullptr);

// Index file: "PGMG" magic, u32 version, u32 dim, u64 count, u32 max_degree,
// u64 entry, per node [u32 degree + u64 neighbors], u64 ids[count],
// f32 data[count*dim]; little-endian throughout.
void save_index(const ProximityGraph& graph, const std::filesystem::path& path);
ProximityGraph load_index(const std::filesystem::path& path);

/// Tree-grow repair: any node unreachable from the entry point gains an
/// in-edge from its nearest reachable neighbor, evicting that neighbor's
/// farthest edge when saturated. Runs at the end of build_index; exposed
/// for callers that bulk-insert. Returns the number of edges added.
std::size_t repair_connectivity(ProximityGraph& graph, std::uint64_t* ndc = nullptr);

/// Full structural check: in-range neighbor ids, no self loops, no
/// duplicates, degree cap, valid entry point. Throws UsageError.
void validate_graph(const ProximityGraph& graph);

/// True when every node is reachable from entry_point along directed edges.
bool connected_from_entry(const ProximityGraph& graph);

namespace detail {

/// Beam search core in the squared-distance domain. `evaluated_pool`, when
/// given, receives every evaluated (id, dist_sq) pair sorted ascending —
/// the construction candidate pool convention.
std::vector<Candidate> beam(const ProximityGraph& graph, const float* query,
                            std::uint32_t ef, std::span<const NodeId> entries,
                            SearchStats& stats,
                            std::vector<Candidate>* evaluated_pool = nullptr);

/// Adds edge u -> v, re-pruning u's list when it would overflow max_degree.
void add_reverse_edge(ProximityGraph& g, NodeId u, NodeId v, std::uint64_t* ndc);

} // namespace detail

} // namespace pgmerge
