#include "pgmerge/rnsm.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <unordered_set>

#include "pgmerge/distance.hpp"
#include "pgmerge/errors.hpp"
#include "pgmerge/parallel.hpp"

namespace pgmerge {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool cand_less(const Candidate& a, const Candidate& b) {
  if (a.dist != b.dist) return a.dist < b.dist;
  return a.id < b.id;
}

// Epoch-tagged visited marks for the expansion ring walk.
struct RingVisited {
  std::vector<std::uint32_t> tag;
  std::uint32_t epoch = 0;
  void begin(std::size_t n) {
    if (tag.size() < n) tag.resize(n, 0);
    if (++epoch == 0) {
      std::fill(tag.begin(), tag.end(), 0u);
      epoch = 1;
    }
  }
  bool seen(NodeId v) const { return tag[v] == epoch; }
  void mark(NodeId v) { tag[v] = epoch; }
};

thread_local RingVisited tls_ring;

} // namespace

std::vector<std::vector<NodeId>> expand_neighbors(const ProximityGraph& graph,
                                                  std::uint32_t k_plus,
                                                  unsigned workers,
                                                  std::uint64_t* ndc) {
  const std::size_t n = graph.count();
  if (k_plus == 0 || k_plus >= n) {
    throw UsageError("expand_neighbors: k_plus must be in [1, count)");
  }
  std::vector<std::vector<NodeId>> expanded(n);
  std::atomic<std::uint64_t> total{0};
  parallel_for(n, workers, [&](std::size_t i) {
    std::uint64_t evals = 0;
    RingVisited& visited = tls_ring;
    visited.begin(n);
    NodeId self = static_cast<NodeId>(i);
    visited.mark(self);
    std::vector<Candidate> cands;
    std::vector<NodeId> ring{self};
    std::vector<NodeId> next;
    // Two hops always; widen further only while k_plus is not reached.
    for (int hop = 0; !ring.empty(); ++hop) {
      if (hop >= 2 && cands.size() >= k_plus) {
        break;
      }
      next.clear();
      for (NodeId u : ring) {
        for (NodeId w : graph.adjacency[u]) {
          if (visited.seen(w)) {
            continue;
          }
          visited.mark(w);
          cands.push_back(
              {w, l2_sqr(graph.vectors.vec(i), graph.vectors.vec(w), graph.vectors.dim)});
          ++evals;
          next.push_back(w);
        }
      }
      ring.swap(next);
    }
    std::sort(cands.begin(), cands.end(), cand_less);
    if (cands.size() > k_plus) {
      cands.resize(k_plus);
    }
    auto& out = expanded[i];
    out.reserve(cands.size());
    for (const auto& c : cands) {
      out.push_back(c.id);
    }
    total.fetch_add(evals, std::memory_order_relaxed);
  });
  if (ndc) {
    *ndc += total.load();
  }
  return expanded;
}

ReverseIndex build_reverse_index(const std::vector<std::vector<NodeId>>& expanded,
                                 std::uint32_t k) {
  ReverseIndex rindex;
  rindex.k = k;
  const std::size_t n = expanded.size();
  rindex.knn.resize(n);
  rindex.rnn.resize(n);
  for (std::size_t y = 0; y < n; ++y) {
    const auto& ex = expanded[y];
    auto& lst = rindex.knn[y];
    lst.assign(ex.begin(), ex.begin() + std::min<std::size_t>(k, ex.size()));
  }
  for (std::size_t y = 0; y < n; ++y) {
    for (NodeId x : rindex.knn[y]) {
      rindex.rnn[x].push_back(static_cast<NodeId>(y));
    }
  }
  for (auto& lst : rindex.rnn) {
    std::sort(lst.begin(), lst.end());
  }
  return rindex;
}

PivotPlan select_pivots_with_order(const ReverseIndex& rindex,
                                   std::span<const NodeId> order) {
  const std::size_t n = rindex.rnn.size();
  PivotPlan plan;
  plan.assignment.assign(n, kNoPivot);
  plan.covered.assign(n, 0);
  for (NodeId x : order) {
    if (plan.covered[x]) {
      continue;
    }
    plan.pivots.push_back(x);
    plan.covered[x] = 1;
    for (NodeId y : rindex.rnn[x]) {
      if (!plan.covered[y]) {
        plan.covered[y] = 1;
        plan.assignment[y] = x;
      }
    }
  }
  return plan;
}

PivotPlan select_pivots(const ReverseIndex& rindex) {
  const std::size_t n = rindex.rnn.size();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (rindex.rnn[a].size() != rindex.rnn[b].size()) {
      return rindex.rnn[a].size() > rindex.rnn[b].size();
    }
    return a < b;
  });
  return select_pivots_with_order(rindex, order);
}

double dps_cost(const PivotPlan& plan, const VectorSet& set, double gamma) {
  const std::size_t n = plan.assignment.size();
  double slide = 0;
  for (std::size_t y = 0; y < n; ++y) {
    if (!plan.covered[y]) {
      throw UsageError("dps_cost: plan leaves node uncovered");
    }
    NodeId p = plan.assignment[y];
    if (p == kNoPivot) {
      continue;
    }
    slide += std::sqrt(l2_sqr(set.vec(y), set.vec(p), set.dim));
  }
  return gamma * static_cast<double>(plan.pivots.size()) + slide;
}

double measure_gamma(const ProximityGraph& target, const VectorSet& probes,
                     std::uint32_t ef, std::uint32_t k_cross, std::uint64_t seed,
                     std::size_t sample_count) {
  (void)k_cross;
  if (target.count() == 0 || probes.count() == 0) {
    return 0;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, probes.count() - 1);
  std::size_t samples = std::min(sample_count, probes.count());
  std::uint64_t total = 0;
  NodeId entry = target.entry_point;
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t i = probes.count() <= sample_count ? s : pick(rng);
    SearchStats stats;
    detail::beam(target, probes.vec(i), ef, {&entry, 1}, stats);
    total += stats.ndc;
  }
  return static_cast<double>(total) / static_cast<double>(samples);
}

namespace {

// Shared body of update_graph; `locks` is null in single-threaded mode.
void update_node(ProximityGraph& merged, NodeId node,
                 std::span<const Candidate> cross_results,
                 std::vector<std::mutex>* locks, std::uint64_t* ndc) {
  if (cross_results.empty()) {
    return;
  }
  std::vector<Candidate> cands;
  const float* nvec = merged.vectors.vec(node);
  std::vector<NodeId> new_adj;
  {
    std::unique_lock<std::mutex> guard;
    if (locks) {
      guard = std::unique_lock<std::mutex>((*locks)[node]);
    }
    const auto& current = merged.adjacency[node];
    cands.reserve(current.size() + cross_results.size());
    for (NodeId w : current) {
      cands.push_back({w, l2_sqr(nvec, merged.vectors.vec(w), merged.vectors.dim)});
      if (ndc) {
        ++*ndc;
      }
    }
    for (const auto& c : cross_results) {
      cands.push_back(c);
    }
    std::sort(cands.begin(), cands.end(), cand_less);
    cands.erase(std::unique(cands.begin(), cands.end(),
                            [](const Candidate& a, const Candidate& b) {
                              return a.id == b.id;
                            }),
                cands.end());
    new_adj = prune_rng(merged.vectors, node, cands, merged.max_degree, ndc);
    merged.adjacency[node] = new_adj;
  }
  for (NodeId c : new_adj) {
    bool is_cross = std::any_of(cross_results.begin(), cross_results.end(),
                                [c](const Candidate& r) { return r.id == c; });
    if (!is_cross) {
      continue;
    }
    std::unique_lock<std::mutex> guard;
    if (locks) {
      guard = std::unique_lock<std::mutex>((*locks)[c]);
    }
    detail::add_reverse_edge(merged, c, node, ndc);
  }
}

} // namespace

void update_graph(ProximityGraph& merged, NodeId node,
                  std::span<const Candidate> cross_results, std::uint64_t* ndc) {
  update_node(merged, node, cross_results, nullptr, ndc);
}

namespace detail {

ProximityGraph make_union_graph(const ProximityGraph& source,
                                const ProximityGraph& target) {
  if (source.vectors.dim != target.vectors.dim) {
    throw UsageError("merge: dimension mismatch");
  }
  const std::size_t t = target.count();
  const std::size_t s = source.count();
  ProximityGraph merged;
  merged.max_degree = std::max(source.max_degree, target.max_degree);
  merged.ef_construction = target.ef_construction;
  merged.entry_point = target.entry_point;
  merged.vectors.dim = target.vectors.dim;
  merged.vectors.data = target.vectors.data;
  merged.vectors.data.insert(merged.vectors.data.end(), source.vectors.data.begin(),
                             source.vectors.data.end());
  merged.vectors.ids.resize(t + s);
  for (std::size_t i = 0; i < t; ++i) {
    merged.vectors.ids[i] = target.vectors.id_of(i);
  }
  for (std::size_t i = 0; i < s; ++i) {
    merged.vectors.ids[t + i] = source.vectors.id_of(i);
  }
  {
    std::unordered_set<std::uint64_t> seen(merged.vectors.ids.begin(),
                                           merged.vectors.ids.end());
    if (seen.size() != merged.vectors.ids.size()) {
      throw UsageError("merge: global ids of source and target are not disjoint");
    }
  }
  merged.adjacency.resize(t + s);
  for (std::size_t i = 0; i < t; ++i) {
    merged.adjacency[i] = target.adjacency[i];
  }
  for (std::size_t i = 0; i < s; ++i) {
    auto& lst = merged.adjacency[t + i];
    lst.reserve(source.adjacency[i].size());
    for (NodeId v : source.adjacency[i]) {
      lst.push_back(static_cast<NodeId>(t + v));
    }
  }
  return merged;
}

MergeReport cross_link(const ProximityGraph& source, const ProximityGraph& target,
                       ProximityGraph& unified, NodeId src_offset,
                       NodeId tgt_offset, const MergeParams& params,
                       MergeStrategy strategy) {
  auto wall0 = Clock::now();
  const std::size_t s = source.count();
  MergeReport report;
  report.workers = params.workers;

  std::vector<std::mutex> locks(params.workers > 1 ? unified.count() : 0);
  std::vector<std::mutex>* lockp = params.workers > 1 ? &locks : nullptr;
  std::atomic<std::uint64_t> total{0};
  NodeId entry = target.entry_point;

  auto to_unified = [tgt_offset](std::vector<Candidate>& res) {
    for (auto& c : res) {
      c.id += tgt_offset;
    }
  };

  if (strategy == MergeStrategy::naive) {
    report.pivots = s;
    report.followers = 0;
    report.sliding_ratio = 0;
    auto t3 = Clock::now();
    parallel_for(s, params.workers, [&](std::size_t i) {
      std::uint64_t local = 0;
      SearchStats stats;
      auto res = detail::beam(target, source.vectors.vec(i), params.ef_merge,
                              {&entry, 1}, stats);
      local += stats.ndc;
      if (res.size() > params.k_cross) {
        res.resize(params.k_cross);
      }
      to_unified(res);
      update_node(unified, static_cast<NodeId>(src_offset + i), res, lockp, &local);
      total.fetch_add(local, std::memory_order_relaxed);
    });
    report.phase3_ms = ms_since(t3);
    report.total_ndc = total.load();
    report.wall_ms = ms_since(wall0);
    return report;
  }

  // Phase 1: densify the source graph.
  auto t1 = Clock::now();
  std::uint64_t expansion_ndc = 0;
  std::uint32_t k_plus = std::min<std::uint32_t>(
      params.k_plus, s > 1 ? static_cast<std::uint32_t>(s - 1) : 0);
  std::vector<std::vector<NodeId>> expanded(s);
  if (k_plus > 0) {
    expanded = expand_neighbors(source, k_plus, params.workers, &expansion_ndc);
  }
  total.fetch_add(expansion_ndc, std::memory_order_relaxed);
  report.phase1_ms = ms_since(t1);

  // Phase 2: reverse inversion and hub-first pivot selection.
  auto t2 = Clock::now();
  ReverseIndex rindex = build_reverse_index(expanded, std::min(params.k, k_plus));
  PivotPlan plan = select_pivots(rindex);
  report.phase2_ms = ms_since(t2);

  const std::size_t n_pivots = plan.pivots.size();
  std::vector<std::vector<NodeId>> followers(n_pivots);
  {
    std::vector<std::uint32_t> pivot_slot(s, 0);
    for (std::size_t g = 0; g < n_pivots; ++g) {
      pivot_slot[plan.pivots[g]] = static_cast<std::uint32_t>(g);
    }
    for (std::size_t y = 0; y < s; ++y) {
      if (plan.assignment[y] != kNoPivot) {
        followers[pivot_slot[plan.assignment[y]]].push_back(static_cast<NodeId>(y));
      }
    }
  }
  report.pivots = n_pivots;
  report.followers = s - n_pivots;
  report.sliding_ratio =
      s == 0 ? 0 : static_cast<double>(report.followers) / static_cast<double>(s);

  // Sample slots per follower, stable across worker counts.
  std::vector<std::size_t> sample_base(n_pivots, 0);
  {
    std::size_t off = 0;
    for (std::size_t g = 0; g < n_pivots; ++g) {
      sample_base[g] = off;
      off += followers[g].size();
    }
    report.samples.resize(off);
  }

  // Phase 3: pivots search naively, followers slide from pivot results.
  auto t3 = Clock::now();
  const std::size_t dim = source.vectors.dim;
  parallel_for(n_pivots, params.workers, [&](std::size_t g) {
    std::uint64_t local = 0;
    NodeId p = plan.pivots[g];
    SearchStats stats_p;
    auto res_p = detail::beam(target, source.vectors.vec(p), params.ef_merge,
                              {&entry, 1}, stats_p);
    local += stats_p.ndc;
    if (res_p.size() > params.k_cross) {
      res_p.resize(params.k_cross);
    }
    std::vector<NodeId> seeds(res_p.size());
    for (std::size_t j = 0; j < res_p.size(); ++j) {
      seeds[j] = res_p[j].id;
    }
    to_unified(res_p);
    update_node(unified, static_cast<NodeId>(src_offset + p), res_p, lockp, &local);

    const std::uint32_t ef_slide = std::max(params.follower_ef(), params.k_cross);
    const auto& group = followers[g];
    for (std::size_t fi = 0; fi < group.size(); ++fi) {
      NodeId y = group[fi];
      SearchStats stats_y;
      std::span<const NodeId> entry_span =
          seeds.empty() ? std::span<const NodeId>{&entry, 1}
                        : std::span<const NodeId>{seeds};
      auto res_y = detail::beam(target, source.vectors.vec(y), ef_slide,
                                entry_span, stats_y);
      local += stats_y.ndc;
      if (res_y.size() > params.k_cross) {
        res_y.resize(params.k_cross);
      }
      to_unified(res_y);
      update_node(unified, static_cast<NodeId>(src_offset + y), res_y, lockp, &local);
      double delta =
          std::sqrt(l2_sqr(source.vectors.vec(p), source.vectors.vec(y), dim));
      ++local;
      report.samples[sample_base[g] + fi] = {delta, stats_y.ndc};
    }
    total.fetch_add(local, std::memory_order_relaxed);
  });
  report.phase3_ms = ms_since(t3);
  report.total_ndc = total.load();
  report.wall_ms = ms_since(wall0);
  return report;
}

} // namespace detail

std::pair<ProximityGraph, MergeReport> naive_merge(const ProximityGraph& source,
                                                   const ProximityGraph& target,
                                                   const MergeParams& params) {
  ProximityGraph merged = detail::make_union_graph(source, target);
  MergeReport report =
      detail::cross_link(source, target, merged, static_cast<NodeId>(target.count()),
                         0, params, MergeStrategy::naive);
  return {std::move(merged), std::move(report)};
}

std::pair<ProximityGraph, MergeReport> rnsm_merge(const ProximityGraph& source,
                                                  const ProximityGraph& target,
                                                  const MergeParams& params) {
  if (source.count() > target.count()) {
    throw UsageError("rnsm_merge: source must not be larger than target");
  }
  if (source.count() == 0) {
    throw UsageError("rnsm_merge: empty source");
  }
  ProximityGraph merged = detail::make_union_graph(source, target);
  MergeReport report =
      detail::cross_link(source, target, merged, static_cast<NodeId>(target.count()),
                         0, params, MergeStrategy::rnsm);
  return {std::move(merged), std::move(report)};
}

std::pair<ProximityGraph, MergeReport> merge_pair(const ProximityGraph& source,
                                                  const ProximityGraph& target,
                                                  const MergeParams& params,
                                                  MergeStrategy strategy) {
  const ProximityGraph* src = &source;
  const ProximityGraph* tgt = &target;
  if (src->count() > tgt->count()) {
    std::swap(src, tgt);
  }
  switch (strategy) {
    case MergeStrategy::naive:
      return naive_merge(*src, *tgt, params);
    case MergeStrategy::rnsm:
      return rnsm_merge(*src, *tgt, params);
  }
  throw UsageError("merge_pair: unknown strategy");
}

} // namespace pgmerge
