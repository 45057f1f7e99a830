#include "pgmerge/mos.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_set>

#include "pgmerge/distance.hpp"
#include "pgmerge/errors.hpp"

namespace pgmerge {

std::vector<std::uint32_t> MergeOrderGraph::degrees() const {
  std::vector<std::uint32_t> deg(m, 0);
  for (auto [i, j] : edges) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

bool MergeOrderGraph::connected() const {
  for (int h : hops) {
    if (h >= kUnreachable) {
      return false;
    }
  }
  return true;
}

int MergeOrderGraph::diameter() const {
  int d = 0;
  for (int h : hops) {
    d = std::max(d, h);
  }
  return d;
}

double MergeOrderGraph::total_cost(const CostMatrix& costs) const {
  double c = 0;
  for (auto [i, j] : edges) {
    c += costs.at(i, j);
  }
  return c;
}

std::vector<int> hops_by_bfs(
    std::size_t m, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
  std::vector<std::vector<std::uint32_t>> adj(m);
  for (auto [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<int> hops(m * m, kUnreachable);
  std::deque<std::uint32_t> queue;
  for (std::size_t src = 0; src < m; ++src) {
    auto* row = hops.data() + src * m;
    row[src] = 0;
    queue.clear();
    queue.push_back(static_cast<std::uint32_t>(src));
    while (!queue.empty()) {
      std::uint32_t u = queue.front();
      queue.pop_front();
      for (std::uint32_t v : adj[u]) {
        if (row[v] >= kUnreachable) {
          row[v] = row[u] + 1;
          queue.push_back(v);
        }
      }
    }
  }
  return hops;
}

CostMatrix build_cost_matrix_from_centroids(const VectorSet& centroids,
                                            CostKind kind) {
  const std::size_t m = centroids.count();
  if (m == 0) {
    throw UsageError("build_cost_matrix: no partitions");
  }
  CostMatrix cm;
  cm.m = m;
  cm.kind = kind;
  cm.costs.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double c = kind == CostKind::random_unit
                     ? 1.0
                     : std::sqrt(l2_sqr(centroids.vec(i), centroids.vec(j),
                                        centroids.dim));
      cm.at(i, j) = c;
      cm.at(j, i) = c;
    }
  }
  return cm;
}

CostMatrix build_cost_matrix(std::span<const VectorSet> partitions, CostKind kind) {
  if (partitions.empty()) {
    throw UsageError("build_cost_matrix: no partitions");
  }
  VectorSet centroids;
  centroids.dim = partitions.front().dim;
  for (const auto& part : partitions) {
    if (part.count() == 0) {
      throw UsageError("build_cost_matrix: empty partition");
    }
    if (part.dim != centroids.dim) {
      throw UsageError("build_cost_matrix: dimension mismatch");
    }
    std::vector<float> mean(part.dim, 0.0f);
    std::vector<double> acc(part.dim, 0.0);
    for (std::size_t i = 0; i < part.count(); ++i) {
      const float* row = part.vec(i);
      for (std::size_t d = 0; d < part.dim; ++d) {
        acc[d] += row[d];
      }
    }
    for (std::size_t d = 0; d < part.dim; ++d) {
      mean[d] = static_cast<float>(acc[d] / double(part.count()));
    }
    centroids.append(mean);
  }
  return build_cost_matrix_from_centroids(centroids, kind);
}

namespace {

struct PlanBuilder {
  std::size_t m;
  std::uint32_t R;
  std::vector<std::vector<std::uint32_t>> adj;
  std::vector<std::uint32_t> deg;
  std::vector<int> hops;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  PlanBuilder(std::size_t m_, std::uint32_t R_) : m(m_), R(R_) {
    adj.resize(m);
    deg.assign(m, 0);
    hops.assign(m * m, kUnreachable);
    for (std::size_t i = 0; i < m; ++i) {
      hops[i * m + i] = 0;
    }
  }

  bool has_edge(std::uint32_t a, std::uint32_t b) const {
    return std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end();
  }

  // Single-edge insertion keeps the all-pairs hop matrix exact: a new
  // shortest path uses the edge at most once, so one relaxation through
  // (a,b) over the old rows suffices.
  void add_edge(std::uint32_t a, std::uint32_t b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
    ++deg[a];
    ++deg[b];
    edges.emplace_back(std::min(a, b), std::max(a, b));
    std::vector<int> row_a(hops.begin() + a * m, hops.begin() + (a + 1) * m);
    std::vector<int> row_b(hops.begin() + b * m, hops.begin() + (b + 1) * m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        int via = std::min(row_a[i] + 1 + row_b[j], row_b[i] + 1 + row_a[j]);
        if (via < hops[i * m + j]) {
          hops[i * m + j] = via;
        }
      }
    }
  }

  int hop(std::uint32_t a, std::uint32_t b) const { return hops[a * m + b]; }
};

} // namespace

MergeOrderGraph mos_plan(const CostMatrix& costs, std::uint32_t R,
                         std::uint32_t delta) {
  const std::size_t m = costs.m;
  if (m == 0 || R == 0 || delta == 0) {
    throw UsageError("mos_plan: m, R and delta must be positive");
  }
  PlanBuilder b(m, R);

  // Process order: ascending mean cost to the R nearest peers.
  std::vector<double> centrality(m, 0.0);
  for (std::size_t v = 0; v < m; ++v) {
    std::vector<double> row;
    row.reserve(m - 1);
    for (std::size_t u = 0; u < m; ++u) {
      if (u != v) {
        row.push_back(costs.at(v, u));
      }
    }
    std::size_t take = std::min<std::size_t>(R, row.size());
    std::partial_sort(row.begin(), row.begin() + take, row.end());
    double sum = 0;
    for (std::size_t i = 0; i < take; ++i) {
      sum += row[i];
    }
    centrality[v] = take == 0 ? 0 : sum / double(take);
  }
  std::vector<std::uint32_t> order(m);
  for (std::size_t i = 0; i < m; ++i) {
    order[i] = static_cast<std::uint32_t>(i);
  }
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t c) {
    if (centrality[a] != centrality[c]) return centrality[a] < centrality[c];
    return a < c;
  });

  auto cheapest_far_vertex = [&](std::uint32_t v) -> std::int64_t {
    std::int64_t best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < m; ++u) {
      if (u == v || b.hop(v, static_cast<std::uint32_t>(u)) <= int(delta)) {
        continue;
      }
      double c = costs.at(v, u);
      if (c < best_cost) {
        best_cost = c;
        best = static_cast<std::int64_t>(u);
      }
    }
    return best;
  };

  // Cheapest unsaturated neighbor of `sat` as relay endpoint toward `far`.
  auto relay = [&](std::uint32_t sat, std::uint32_t far) -> std::int64_t {
    std::int64_t best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::uint32_t nb : b.adj[sat]) {
      if (nb == far || b.deg[nb] >= R || b.has_edge(nb, far)) {
        continue;
      }
      double c = costs.at(nb, far);
      if (c < best_cost || (c == best_cost && std::int64_t(nb) < best)) {
        best_cost = c;
        best = nb;
      }
    }
    return best;
  };

  for (std::uint32_t v : order) {
    for (;;) {
      std::int64_t xi = cheapest_far_vertex(v);
      if (xi < 0) {
        break;
      }
      auto x = static_cast<std::uint32_t>(xi);
      if (b.deg[v] < R && b.deg[x] < R) {
        b.add_edge(v, x);
      } else if (b.deg[v] < R && b.deg[x] >= R) {
        std::int64_t xr = relay(x, v);
        if (xr < 0) {
          break;
        }
        b.add_edge(v, static_cast<std::uint32_t>(xr));
      } else if (b.deg[v] >= R && b.deg[x] < R) {
        std::int64_t vr = relay(v, x);
        if (vr < 0) {
          break;
        }
        b.add_edge(static_cast<std::uint32_t>(vr), x);
      } else {
        break; // both saturated; the pair is skipped, v's pass ends
      }
    }
  }

  MergeOrderGraph plan;
  plan.m = m;
  plan.degree_bound = R;
  plan.diameter_bound = delta;

  // Connectivity repair: join remaining components by minimum-cost edges,
  // degree bound permitting violations (counted).
  for (;;) {
    bool connected = true;
    for (std::size_t i = 0; i < m * m; ++i) {
      if (b.hops[i] >= kUnreachable) {
        connected = false;
        break;
      }
    }
    if (connected) {
      break;
    }
    double best_cost = std::numeric_limits<double>::infinity();
    std::int64_t bi = -1, bj = -1;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if (b.hops[i * m + j] < kUnreachable) {
          continue;
        }
        double c = costs.at(i, j);
        if (c < best_cost) {
          best_cost = c;
          bi = static_cast<std::int64_t>(i);
          bj = static_cast<std::int64_t>(j);
        }
      }
    }
    auto i = static_cast<std::uint32_t>(bi);
    auto j = static_cast<std::uint32_t>(bj);
    plan.degree_violations += (b.deg[i] >= R) + (b.deg[j] >= R);
    ++plan.repair_edge_count;
    b.add_edge(i, j);
  }

  plan.edges = std::move(b.edges);
  plan.hops = std::move(b.hops);
  return plan;
}

MergeOrderGraph pairwise_plan(std::size_t m) {
  if (m == 0) {
    throw UsageError("pairwise_plan: m must be positive");
  }
  MergeOrderGraph plan;
  plan.m = m;
  plan.degree_bound = m > 1 ? static_cast<std::uint32_t>(m - 1) : 1;
  plan.diameter_bound = 1;
  for (std::uint32_t i = 0; i < m; ++i) {
    for (std::uint32_t j = i + 1; j < m; ++j) {
      plan.edges.emplace_back(i, j);
    }
  }
  plan.hops = hops_by_bfs(m, plan.edges);
  return plan;
}

void save_plan(const MergeOrderGraph& plan, const std::filesystem::path& path) {
  nlohmann::json j;
  j["m"] = plan.m;
  j["R"] = plan.degree_bound;
  j["delta"] = plan.diameter_bound;
  auto edges = plan.edges;
  std::sort(edges.begin(), edges.end());
  nlohmann::json je = nlohmann::json::array();
  for (auto [a, b] : edges) {
    je.push_back({a, b});
  }
  j["edges"] = std::move(je);
  io::atomic_write(path, j.dump() + "\n");
}

MergeOrderGraph load_plan(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("plan file: ") + e.what());
  }
  MergeOrderGraph plan;
  try {
    plan.m = j.at("m").get<std::size_t>();
    plan.degree_bound = j.at("R").get<std::uint32_t>();
    plan.diameter_bound = j.at("delta").get<std::uint32_t>();
    for (const auto& e : j.at("edges")) {
      auto a = e.at(0).get<std::uint32_t>();
      auto b = e.at(1).get<std::uint32_t>();
      if (a >= plan.m || b >= plan.m || a == b) {
        throw FormatError("plan file: bad edge");
      }
      plan.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("plan file: ") + e.what());
  }
  std::sort(plan.edges.begin(), plan.edges.end());
  if (std::adjacent_find(plan.edges.begin(), plan.edges.end()) != plan.edges.end()) {
    throw FormatError("plan file: duplicate edge");
  }
  plan.hops = hops_by_bfs(plan.m, plan.edges);
  return plan;
}

std::pair<ProximityGraph, MultiMergeReport> multi_merge(
    std::span<const ProximityGraph> indexes, const MergeOrderGraph& plan,
    const CostMatrix& costs, const MergeParams& params, MergeStrategy strategy) {
  auto wall0 = std::chrono::steady_clock::now();
  const std::size_t m = indexes.size();
  if (plan.m != m) {
    throw UsageError("multi_merge: plan size does not match index count");
  }
  if (m == 0) {
    throw UsageError("multi_merge: no indexes");
  }
  if (!plan.connected()) {
    throw UsageError("multi_merge: plan is disconnected");
  }
  MultiMergeReport report;
  if (m == 1) {
    report.wall_ms = 0;
    return {indexes[0], std::move(report)};
  }

  std::size_t largest = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (indexes[i].count() > indexes[largest].count()) {
      largest = i;
    }
  }

  // Unified container over all partitions; node j of partition i lives at
  // offset[i] + j.
  std::vector<NodeId> offset(m, 0);
  ProximityGraph unified;
  unified.vectors.dim = indexes[0].vectors.dim;
  unified.max_degree = 0;
  std::size_t total_count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (indexes[i].vectors.dim != unified.vectors.dim) {
      throw UsageError("multi_merge: dimension mismatch across partitions");
    }
    offset[i] = static_cast<NodeId>(total_count);
    total_count += indexes[i].count();
    unified.max_degree = std::max(unified.max_degree, indexes[i].max_degree);
  }
  unified.ef_construction = indexes[largest].ef_construction;
  unified.vectors.data.reserve(total_count * unified.vectors.dim);
  unified.vectors.ids.reserve(total_count);
  unified.adjacency.reserve(total_count);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& part = indexes[i];
    unified.vectors.data.insert(unified.vectors.data.end(), part.vectors.data.begin(),
                                part.vectors.data.end());
    for (std::size_t r = 0; r < part.count(); ++r) {
      unified.vectors.ids.push_back(part.vectors.id_of(r));
    }
    for (const auto& lst : part.adjacency) {
      std::vector<NodeId> shifted;
      shifted.reserve(lst.size());
      for (NodeId v : lst) {
        shifted.push_back(v + offset[i]);
      }
      unified.adjacency.push_back(std::move(shifted));
    }
  }
  {
    std::unordered_set<std::uint64_t> seen(unified.vectors.ids.begin(),
                                           unified.vectors.ids.end());
    if (seen.size() != unified.vectors.ids.size()) {
      throw UsageError("multi_merge: global ids are not disjoint across partitions");
    }
  }
  unified.entry_point = offset[largest] + indexes[largest].entry_point;

  // Spanning edges first (each touching the grown component, cheapest
  // next), then chords by ascending cost.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ordered;
  {
    std::vector<char> in_comp(m, 0);
    std::vector<char> used(plan.edges.size(), 0);
    in_comp[largest] = 1;
    for (std::size_t step = 1; step < m; ++step) {
      double best_cost = std::numeric_limits<double>::infinity();
      std::int64_t best_e = -1;
      for (std::size_t e = 0; e < plan.edges.size(); ++e) {
        if (used[e]) {
          continue;
        }
        auto [a, bb] = plan.edges[e];
        if (in_comp[a] == in_comp[bb]) {
          continue;
        }
        double c = costs.at(a, bb);
        if (c < best_cost ||
            (c == best_cost && best_e >= 0 &&
             plan.edges[e] < plan.edges[static_cast<std::size_t>(best_e)])) {
          best_cost = c;
          best_e = static_cast<std::int64_t>(e);
        }
      }
      if (best_e < 0) {
        throw UsageError("multi_merge: plan is disconnected");
      }
      used[static_cast<std::size_t>(best_e)] = 1;
      auto [a, bb] = plan.edges[static_cast<std::size_t>(best_e)];
      in_comp[a] = in_comp[bb] = 1;
      ordered.push_back(plan.edges[static_cast<std::size_t>(best_e)]);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> chords;
    for (std::size_t e = 0; e < plan.edges.size(); ++e) {
      if (!used[e]) {
        chords.push_back(plan.edges[e]);
      }
    }
    std::sort(chords.begin(), chords.end(),
              [&](const auto& x, const auto& y) {
                double cx = costs.at(x.first, x.second);
                double cy = costs.at(y.first, y.second);
                if (cx != cy) return cx < cy;
                return x < y;
              });
    ordered.insert(ordered.end(), chords.begin(), chords.end());
  }

  for (auto [i, j] : ordered) {
    std::uint32_t src = i, tgt = j;
    if (indexes[src].count() > indexes[tgt].count()) {
      std::swap(src, tgt);
    }
    MergeReport r = detail::cross_link(indexes[src], indexes[tgt], unified,
                                       offset[src], offset[tgt], params, strategy);
    report.total_ndc += r.total_ndc;
    report.edge_order.emplace_back(i, j);
    report.per_edge.push_back(std::move(r));
  }
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - wall0)
                       .count();
  return {std::move(unified), std::move(report)};
}

std::pair<std::vector<GlobalCandidate>, SearchStats> separated_search(
    std::span<const ProximityGraph> indexes, std::span<const float> query,
    std::uint32_t ef, std::uint32_t k) {
  SearchStats total;
  std::vector<GlobalCandidate> all;
  for (const auto& g : indexes) {
    if (g.count() == 0) {
      continue;
    }
    SearchStats stats;
    NodeId entry = g.entry_point;
    auto res = detail::beam(g, query.data(), ef, {&entry, 1}, stats);
    if (res.size() > k) {
      res.resize(k);
    }
    for (const auto& c : res) {
      all.push_back({g.vectors.id_of(c.id), c.dist});
    }
    total.ndc += stats.ndc;
    total.hops += stats.hops;
  }
  std::sort(all.begin(), all.end(), [](const GlobalCandidate& a, const GlobalCandidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id;
  });
  if (all.size() > k) {
    all.resize(k);
  }
  for (auto& c : all) {
    c.dist = std::sqrt(c.dist);
  }
  return {std::move(all), total};
}

} // namespace pgmerge
