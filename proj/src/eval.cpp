#include "pgmerge/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "pgmerge/distance.hpp"
#include "pgmerge/errors.hpp"
#include "pgmerge/parallel.hpp"
#include "pgmerge/partition.hpp"

namespace pgmerge {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

} // namespace

GroundTruth brute_force_knn(const VectorSet& base, const VectorSet& queries,
                            std::uint32_t k, unsigned workers) {
  if (queries.count() > 0 && base.dim != queries.dim) {
    throw UsageError("brute_force_knn: dimension mismatch");
  }
  if (k == 0 || k > base.count()) {
    throw UsageError("brute_force_knn: k must be in [1, base count]");
  }
  GroundTruth gt;
  gt.k = k;
  gt.neighbors.resize(queries.count());
  parallel_for(queries.count(), workers, [&](std::size_t q) {
    struct Hit {
      double dist;
      std::uint64_t id;
    };
    std::vector<Hit> hits(base.count());
    const float* qv = queries.vec(q);
    for (std::size_t i = 0; i < base.count(); ++i) {
      hits[i] = {l2_sqr(qv, base.vec(i), base.dim), base.id_of(i)};
    }
    std::partial_sort(hits.begin(), hits.begin() + k, hits.end(),
                      [](const Hit& a, const Hit& b) {
                        if (a.dist != b.dist) return a.dist < b.dist;
                        return a.id < b.id;
                      });
    auto& row = gt.neighbors[q];
    row.resize(k);
    for (std::uint32_t i = 0; i < k; ++i) {
      if (hits[i].id > 0xffffffffull) {
        throw UsageError("brute_force_knn: global id exceeds 32 bits");
      }
      row[i] = static_cast<std::uint32_t>(hits[i].id);
    }
  });
  return gt;
}

double recall_at_k(std::span<const std::uint64_t> result_ids,
                   std::span<const std::uint32_t> truth_row, std::size_t k) {
  if (k == 0) {
    return 0;
  }
  std::unordered_set<std::uint64_t> truth;
  for (std::size_t i = 0; i < std::min(k, truth_row.size()); ++i) {
    truth.insert(truth_row[i]);
  }
  std::size_t hit = 0;
  for (std::size_t i = 0; i < std::min(k, result_ids.size()); ++i) {
    hit += truth.count(result_ids[i]);
  }
  return static_cast<double>(hit) / static_cast<double>(k);
}

std::vector<BenchResult> bench_search(const ProximityGraph& graph,
                                      const VectorSet& queries,
                                      const GroundTruth& truth,
                                      std::span<const std::uint32_t> ef_sweep,
                                      std::uint32_t k, const std::string& label,
                                      const std::filesystem::path* dump_dir) {
  if (truth.query_count() < queries.count() || truth.k < k) {
    throw UsageError("bench_search: ground truth does not cover the queries");
  }
  std::vector<BenchResult> results;
  NodeId entry = graph.entry_point;
  for (std::uint32_t ef : ef_sweep) {
    std::uint32_t use_ef = std::max(ef, k);
    double recall_sum = 0;
    std::uint64_t ndc_sum = 0;
    std::vector<std::vector<std::uint32_t>> dump_rows;
    auto t0 = Clock::now();
    for (std::size_t q = 0; q < queries.count(); ++q) {
      SearchStats stats;
      auto res = detail::beam(graph, queries.vec(q), use_ef, {&entry, 1}, stats);
      if (res.size() > k) {
        res.resize(k);
      }
      ndc_sum += stats.ndc;
      std::vector<std::uint64_t> ids(res.size());
      for (std::size_t i = 0; i < res.size(); ++i) {
        ids[i] = graph.vectors.id_of(res[i].id);
      }
      recall_sum += recall_at_k(ids, truth.neighbors[q], k);
      if (dump_dir) {
        std::vector<std::uint32_t> row(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
          row[i] = static_cast<std::uint32_t>(ids[i]);
        }
        dump_rows.push_back(std::move(row));
      }
    }
    double elapsed_s = ms_since(t0) / 1000.0;
    BenchResult r;
    r.strategy = label;
    r.ef = ef;
    r.recall_at_k = queries.count() ? recall_sum / double(queries.count()) : 0;
    r.qps = elapsed_s > 0 ? double(queries.count()) / elapsed_s : 0;
    r.mean_ndc = queries.count() ? double(ndc_sum) / double(queries.count()) : 0;
    results.push_back(std::move(r));
    if (dump_dir) {
      save_ivecs(dump_rows,
                 *dump_dir / ("results_" + label + "_ef" + std::to_string(ef) + ".ivecs"));
    }
  }
  return results;
}

std::vector<BenchResult> bench_separated(std::span<const ProximityGraph> indexes,
                                         const VectorSet& queries,
                                         const GroundTruth& truth,
                                         std::span<const std::uint32_t> ef_sweep,
                                         std::uint32_t k, const std::string& label) {
  if (truth.query_count() < queries.count() || truth.k < k) {
    throw UsageError("bench_separated: ground truth does not cover the queries");
  }
  std::vector<BenchResult> results;
  for (std::uint32_t ef : ef_sweep) {
    std::uint32_t use_ef = std::max(ef, k);
    double recall_sum = 0;
    std::uint64_t ndc_sum = 0;
    auto t0 = Clock::now();
    for (std::size_t q = 0; q < queries.count(); ++q) {
      auto [res, stats] = separated_search(indexes, queries.row(q), use_ef, k);
      ndc_sum += stats.ndc;
      std::vector<std::uint64_t> ids(res.size());
      for (std::size_t i = 0; i < res.size(); ++i) {
        ids[i] = res[i].id;
      }
      recall_sum += recall_at_k(ids, truth.neighbors[q], k);
    }
    double elapsed_s = ms_since(t0) / 1000.0;
    BenchResult r;
    r.strategy = label;
    r.ef = ef;
    r.recall_at_k = queries.count() ? recall_sum / double(queries.count()) : 0;
    r.qps = elapsed_s > 0 ? double(queries.count()) / elapsed_s : 0;
    r.mean_ndc = queries.count() ? double(ndc_sum) / double(queries.count()) : 0;
    results.push_back(std::move(r));
  }
  return results;
}

std::uint32_t choose_ef_separated(std::span<const ProximityGraph> indexes,
                                  const VectorSet& queries, const GroundTruth& truth,
                                  std::uint32_t k, double target_recall,
                                  std::span<const std::uint32_t> candidates) {
  for (std::uint32_t ef : candidates) {
    auto rows = bench_separated(indexes, queries, truth, {&ef, 1}, k, "probe");
    if (!rows.empty() && rows.front().recall_at_k > target_recall) {
      return ef;
    }
  }
  return candidates.empty() ? k : candidates.back();
}

std::optional<double> interp_recall_at_qps(std::span<const BenchResult> sweep,
                                           double qps) {
  std::vector<std::pair<double, double>> pts; // (qps, recall)
  for (const auto& r : sweep) {
    pts.emplace_back(r.qps, r.recall_at_k);
  }
  std::sort(pts.begin(), pts.end());
  if (pts.empty() || qps < pts.front().first || qps > pts.back().first) {
    return std::nullopt;
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (qps <= pts[i].first) {
      double x0 = pts[i - 1].first, x1 = pts[i].first;
      double y0 = pts[i - 1].second, y1 = pts[i].second;
      if (x1 == x0) {
        return std::max(y0, y1);
      }
      double t = (qps - x0) / (x1 - x0);
      return y0 + t * (y1 - y0);
    }
  }
  return pts.back().second;
}

namespace {

std::string strategy_label(CompareStrategy s) {
  switch (s) {
    case CompareStrategy::naive: return "naive";
    case CompareStrategy::rnsm: return "rnsm";
    case CompareStrategy::rnsm_mos_random: return "rnsm+mos-random";
    case CompareStrategy::rnsm_mos_centroid: return "rnsm+mos-centroid";
    case CompareStrategy::rebuild: return "rebuild";
    case CompareStrategy::separated: return "separated";
  }
  return "?";
}

VectorSet concat_partitions(std::span<const VectorSet> partitions) {
  VectorSet all;
  all.dim = partitions.front().dim;
  for (const auto& p : partitions) {
    all.data.insert(all.data.end(), p.data.begin(), p.data.end());
    for (std::size_t i = 0; i < p.count(); ++i) {
      all.ids.push_back(p.id_of(i));
    }
  }
  return all;
}

} // namespace

std::vector<StrategyReport> compare_merge_strategies(
    std::span<const VectorSet> partitions, std::span<const CompareStrategy> strategies,
    const BuildParams& bparams, const MergeParams& mparams, const VectorSet& queries,
    std::uint32_t k, std::span<const std::uint32_t> ef_sweep, std::uint32_t R,
    std::uint32_t delta) {
  if (partitions.size() < 2) {
    throw UsageError("compare_merge_strategies: need at least two partitions");
  }
  const std::size_t m = partitions.size();

  std::vector<ProximityGraph> indexes;
  indexes.reserve(m);
  for (const auto& p : partitions) {
    indexes.push_back(build_index(p, bparams));
  }
  VectorSet all = concat_partitions(partitions);
  GroundTruth gt = brute_force_knn(all, queries, k, mparams.workers);

  CostMatrix unit = build_cost_matrix(partitions, CostKind::random_unit);
  CostMatrix centroid = build_cost_matrix(partitions, CostKind::centroid_distance);
  MergeOrderGraph complete = pairwise_plan(m);

  std::vector<StrategyReport> reports;
  for (CompareStrategy s : strategies) {
    StrategyReport rep;
    rep.label = strategy_label(s);
    switch (s) {
      case CompareStrategy::naive:
      case CompareStrategy::rnsm: {
        auto strat = s == CompareStrategy::naive ? MergeStrategy::naive
                                                 : MergeStrategy::rnsm;
        auto [merged, mr] = multi_merge(indexes, complete, unit, mparams, strat);
        rep.merge_ndc = mr.total_ndc;
        rep.merge_wall_ms = mr.wall_ms;
        rep.merge_edges = complete.edges.size();
        rep.sweep = bench_search(merged, queries, gt, ef_sweep, k, rep.label);
        break;
      }
      case CompareStrategy::rnsm_mos_random:
      case CompareStrategy::rnsm_mos_centroid: {
        const CostMatrix& costs =
            s == CompareStrategy::rnsm_mos_random ? unit : centroid;
        MergeOrderGraph plan = mos_plan(costs, R, delta);
        auto [merged, mr] =
            multi_merge(indexes, plan, costs, mparams, MergeStrategy::rnsm);
        rep.merge_ndc = mr.total_ndc;
        rep.merge_wall_ms = mr.wall_ms;
        rep.merge_edges = plan.edges.size();
        rep.sweep = bench_search(merged, queries, gt, ef_sweep, k, rep.label);
        break;
      }
      case CompareStrategy::rebuild: {
        std::uint64_t ndc = 0;
        auto t0 = Clock::now();
        ProximityGraph rebuilt = build_index(all, bparams, &ndc);
        rep.merge_wall_ms = ms_since(t0);
        rep.merge_ndc = ndc;
        rep.merge_edges = 0;
        rep.sweep = bench_search(rebuilt, queries, gt, ef_sweep, k, rep.label);
        break;
      }
      case CompareStrategy::separated: {
        rep.merge_ndc = 0;
        rep.merge_wall_ms = 0;
        rep.merge_edges = 0;
        rep.sweep = bench_separated(indexes, queries, gt, ef_sweep, k, rep.label);
        break;
      }
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

MergeOrderGraph make_topology(Topology topology, const CostMatrix& costs,
                              std::uint32_t R, std::uint32_t delta,
                              std::uint64_t seed) {
  const std::size_t m = costs.m;
  MergeOrderGraph plan;
  plan.m = m;
  plan.degree_bound = R;
  plan.diameter_bound = delta;
  switch (topology) {
    case Topology::path: {
      for (std::uint32_t i = 0; i + 1 < m; ++i) {
        plan.edges.emplace_back(i, i + 1);
      }
      break;
    }
    case Topology::star: {
      std::size_t center = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        double sum = 0;
        for (std::size_t j = 0; j < m; ++j) {
          sum += costs.at(i, j);
        }
        if (sum < best) {
          best = sum;
          center = i;
        }
      }
      for (std::uint32_t j = 0; j < m; ++j) {
        if (j != center) {
          plan.edges.emplace_back(std::min<std::uint32_t>(center, j),
                                  std::max<std::uint32_t>(center, j));
        }
      }
      break;
    }
    case Topology::mst: {
      // Prim's algorithm over the cost matrix.
      std::vector<char> in(m, 0);
      std::vector<double> best(m, std::numeric_limits<double>::infinity());
      std::vector<std::uint32_t> from(m, 0);
      in[0] = 1;
      for (std::size_t j = 1; j < m; ++j) {
        best[j] = costs.at(0, j);
      }
      for (std::size_t step = 1; step < m; ++step) {
        std::size_t pick = m;
        double pick_cost = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
          if (!in[j] && best[j] < pick_cost) {
            pick_cost = best[j];
            pick = j;
          }
        }
        in[pick] = 1;
        plan.edges.emplace_back(std::min<std::uint32_t>(from[pick], pick),
                                std::max<std::uint32_t>(from[pick], pick));
        for (std::size_t j = 0; j < m; ++j) {
          if (!in[j] && costs.at(pick, j) < best[j]) {
            best[j] = costs.at(pick, j);
            from[j] = static_cast<std::uint32_t>(pick);
          }
        }
      }
      break;
    }
    case Topology::mos: {
      return mos_plan(costs, R, delta);
    }
    case Topology::random_regular: {
      // Pairing-model graph matching MOS's edge count (same average
      // degree); falls back to tree-plus-chords when pairing keeps
      // colliding.
      std::size_t target_edges = mos_plan(costs, R, delta).edges.size();
      std::mt19937_64 rng(seed);
      auto try_pairing = [&]() -> std::optional<
                              std::vector<std::pair<std::uint32_t, std::uint32_t>>> {
        std::vector<std::uint32_t> stubs;
        std::size_t total = 2 * target_edges;
        std::size_t base = total / m;
        std::size_t extra = total % m;
        for (std::uint32_t v = 0; v < m; ++v) {
          std::size_t quota = base + (v < extra ? 1 : 0);
          for (std::size_t i = 0; i < quota; ++i) {
            stubs.push_back(v);
          }
        }
        std::shuffle(stubs.begin(), stubs.end(), rng);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        std::unordered_set<std::uint64_t> seen;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
          std::uint32_t a = stubs[i], b = stubs[i + 1];
          if (a == b) {
            return std::nullopt;
          }
          std::uint64_t key = (std::uint64_t(std::min(a, b)) << 32) | std::max(a, b);
          if (!seen.insert(key).second) {
            return std::nullopt;
          }
          edges.emplace_back(std::min(a, b), std::max(a, b));
        }
        auto hops = hops_by_bfs(m, edges);
        for (int h : hops) {
          if (h >= kUnreachable) {
            return std::nullopt;
          }
        }
        return edges;
      };
      bool done = false;
      for (int attempt = 0; attempt < 200 && !done; ++attempt) {
        if (auto edges = try_pairing()) {
          plan.edges = std::move(*edges);
          done = true;
        }
      }
      if (!done) {
        std::vector<std::uint32_t> perm(m);
        std::iota(perm.begin(), perm.end(), 0u);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::unordered_set<std::uint64_t> seen;
        for (std::size_t i = 0; i + 1 < m; ++i) {
          std::uint32_t a = std::min(perm[i], perm[i + 1]);
          std::uint32_t b = std::max(perm[i], perm[i + 1]);
          plan.edges.emplace_back(a, b);
          seen.insert((std::uint64_t(a) << 32) | b);
        }
        std::uniform_int_distribution<std::uint32_t> pick(0, std::uint32_t(m - 1));
        while (plan.edges.size() < target_edges) {
          std::uint32_t a = pick(rng), b = pick(rng);
          if (a == b) {
            continue;
          }
          std::uint32_t lo = std::min(a, b), hi = std::max(a, b);
          if (seen.insert((std::uint64_t(lo) << 32) | hi).second) {
            plan.edges.emplace_back(lo, hi);
          }
        }
      }
      break;
    }
  }
  plan.hops = hops_by_bfs(m, plan.edges);
  return plan;
}

namespace {

std::string topology_label(Topology t) {
  switch (t) {
    case Topology::path: return "path";
    case Topology::star: return "star";
    case Topology::mst: return "mst";
    case Topology::mos: return "mos";
    case Topology::random_regular: return "random-regular";
  }
  return "?";
}

} // namespace

std::vector<TopologyReport> compare_merge_orders(
    std::span<const ProximityGraph> indexes, const CostMatrix& costs,
    std::span<const Topology> topologies, const MergeParams& mparams,
    const VectorSet& queries, const GroundTruth& truth,
    std::span<const std::uint32_t> ef_sweep, std::uint32_t k, std::uint32_t R,
    std::uint32_t delta, std::uint64_t seed) {
  if (indexes.size() < 4) {
    throw UsageError("compare_merge_orders: need at least four partitions");
  }
  std::vector<TopologyReport> reports;
  for (Topology t : topologies) {
    MergeOrderGraph plan = make_topology(t, costs, R, delta, seed);
    auto [merged, mr] = multi_merge(indexes, plan, costs, mparams, MergeStrategy::rnsm);
    TopologyReport rep;
    rep.label = topology_label(t);
    rep.edge_count = plan.edges.size();
    rep.merge_ndc = mr.total_ndc;
    rep.merge_wall_ms = mr.wall_ms;
    rep.sweep = bench_search(merged, queries, truth, ef_sweep, k, rep.label);
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::vector<PivotVariantRow> pivot_variant_study(const ProximityGraph& source,
                                                 std::span<const std::uint32_t> ks,
                                                 std::uint32_t k_plus,
                                                 std::uint64_t seed) {
  const std::size_t n = source.count();
  if (n < 2) {
    throw UsageError("pivot_variant_study: source too small");
  }
  std::uint32_t eff_k_plus =
      std::min<std::uint32_t>(k_plus, static_cast<std::uint32_t>(n - 1));
  auto expanded = expand_neighbors(source, eff_k_plus);
  std::vector<PivotVariantRow> rows;
  for (std::uint32_t k : ks) {
    ReverseIndex rindex = build_reverse_index(expanded, std::min(k, eff_k_plus));

    std::vector<NodeId> shuffled(n);
    std::iota(shuffled.begin(), shuffled.end(), 0u);
    std::mt19937_64 rng(seed + k);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    // Iterative chain sliding: a slid node keeps propagating to its own
    // kNNs, so coverage runs along forward-kNN chains.
    {
      std::vector<std::uint8_t> covered(n, 0);
      std::size_t slid = 0;
      std::vector<NodeId> queue;
      for (NodeId s : shuffled) {
        if (covered[s]) {
          continue;
        }
        covered[s] = 1; // naive search
        queue.assign(1, s);
        while (!queue.empty()) {
          NodeId u = queue.back();
          queue.pop_back();
          for (NodeId w : rindex.knn[u]) {
            if (!covered[w]) {
              covered[w] = 1;
              ++slid;
              queue.push_back(w);
            }
          }
        }
      }
      rows.push_back({"nsm-iterative", k, double(slid) / double(n)});
    }

    {
      PivotPlan plan = select_pivots_with_order(rindex, shuffled);
      rows.push_back({"rnsm-random-pivots", k,
                      double(plan.follower_count()) / double(n)});
    }

    {
      PivotPlan plan = select_pivots(rindex);
      rows.push_back({"rnsm", k, double(plan.follower_count()) / double(n)});
    }
  }
  return rows;
}

namespace {

void write_csv(const std::filesystem::path& path, const std::string& config,
               const std::string& header, const std::string& body) {
  std::string out = "# pgmerge-report v1\n";
  if (!config.empty()) {
    out += "# config: " + config + "\n";
  }
  out += header + "\n" + body;
  io::atomic_write(path, out);
}

std::string bench_rows(std::span<const BenchResult> rows, const std::string& prefix) {
  std::string body;
  for (const auto& r : rows) {
    body += prefix + r.strategy + "," + std::to_string(r.ef) + "," +
            fmt(r.recall_at_k) + "," + fmt(r.qps) + "," + fmt(r.mean_ndc) + "," +
            fmt(r.build_or_merge_ms) + "\n";
  }
  return body;
}

} // namespace

void write_bench_csv(std::span<const BenchResult> rows,
                     const std::filesystem::path& path, const std::string& config) {
  write_csv(path, config, "strategy,ef,recall_at_k,qps,mean_ndc,build_or_merge_ms",
            bench_rows(rows, ""));
}

void write_strategy_csv(std::span<const StrategyReport> reports,
                        const std::filesystem::path& path,
                        const std::string& config) {
  double nm_ndc = 0, rebuild_ndc = 0;
  for (const auto& rep : reports) {
    if (rep.label == "naive") nm_ndc = double(rep.merge_ndc);
    if (rep.label == "rebuild") rebuild_ndc = double(rep.merge_ndc);
  }
  std::string body;
  for (const auto& rep : reports) {
    std::string ratio_nm =
        rep.merge_ndc && nm_ndc ? fmt(nm_ndc / double(rep.merge_ndc)) : "";
    std::string ratio_rb =
        rep.merge_ndc && rebuild_ndc ? fmt(rebuild_ndc / double(rep.merge_ndc)) : "";
    for (const auto& r : rep.sweep) {
      body += rep.label + "," + std::to_string(r.ef) + "," + fmt(r.recall_at_k) +
              "," + fmt(r.qps) + "," + fmt(r.mean_ndc) + "," +
              std::to_string(rep.merge_ndc) + "," + fmt(rep.merge_wall_ms) + "," +
              std::to_string(rep.merge_edges) + "," + ratio_nm + "," + ratio_rb +
              "\n";
    }
  }
  write_csv(path, config,
            "strategy,ef,recall_at_k,qps,mean_ndc,merge_ndc,merge_wall_ms,"
            "merge_edges,ndc_speedup_vs_nm,ndc_speedup_vs_rebuild",
            body);
}

void write_topology_csv(std::span<const TopologyReport> reports,
                        const std::filesystem::path& path,
                        const std::string& config) {
  std::string body;
  for (const auto& rep : reports) {
    for (const auto& r : rep.sweep) {
      body += rep.label + "," + std::to_string(rep.edge_count) + "," +
              std::to_string(r.ef) + "," + fmt(r.recall_at_k) + "," + fmt(r.qps) +
              "," + fmt(r.mean_ndc) + "," + std::to_string(rep.merge_ndc) + "," +
              fmt(rep.merge_wall_ms) + "\n";
    }
  }
  write_csv(path, config,
            "topology,edges,ef,recall_at_k,qps,mean_ndc,merge_ndc,merge_wall_ms",
            body);
}

void write_pivot_csv(std::span<const PivotVariantRow> rows,
                     const std::filesystem::path& path, const std::string& config) {
  std::string body;
  for (const auto& r : rows) {
    body += r.variant + "," + std::to_string(r.k) + "," + fmt(r.sliding_ratio) + "\n";
  }
  write_csv(path, config, "variant,k,sliding_ratio", body);
}

void write_merge_report_csv(const MergeReport& report,
                            const std::filesystem::path& path,
                            const std::string& config) {
  auto row = [&](const std::string& phase, double wall) {
    return phase + "," + std::to_string(report.pivots) + "," +
           std::to_string(report.followers) + "," + fmt(report.sliding_ratio) + "," +
           std::to_string(report.total_ndc) + "," + fmt(wall) + "\n";
  };
  std::string body = row("expand", report.phase1_ms) +
                     row("pivot_select", report.phase2_ms) +
                     row("link", report.phase3_ms) + row("total", report.wall_ms);
  write_csv(path, config, "phase,pivots,followers,sliding_ratio,total_ndc,wall_ms",
            body);
}

void write_slide_samples_csv(std::span<const SlideSample> samples,
                             const std::filesystem::path& path,
                             const std::string& config) {
  std::string body;
  for (const auto& s : samples) {
    body += fmt(s.pivot_dist) + "," + std::to_string(s.ndc) + "\n";
  }
  write_csv(path, config, "pivot_dist,slide_ndc", body);
}

} // namespace pgmerge
