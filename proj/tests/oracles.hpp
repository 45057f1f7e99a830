#pragma once

// Test-only reference implementations, kept independent of the library
// code paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <unistd.h>
#include <vector>

#include "pgmerge/pgraph.hpp"
#include "pgmerge/vecstore.hpp"

namespace oracle {

// Plain scalar loop, float accumulation order unlike the library kernel.
inline double l2_sqr_scalar(const float* a, const float* b, std::size_t dim) {
  double sum = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    double d = double(a[i]) - double(b[i]);
    sum += d * d;
  }
  return sum;
}

struct Hit {
  std::uint64_t id;
  double dist;
};

// Exhaustive top-k over a vector set, insertion-sort flavored so the code
// path differs from the library's partial_sort scan.
inline std::vector<Hit> brute_force_topk(const pgmerge::VectorSet& base,
                                         const float* query, std::size_t k) {
  std::vector<Hit> best;
  for (std::size_t i = 0; i < base.count(); ++i) {
    Hit h{base.id_of(i), l2_sqr_scalar(query, base.vec(i), base.dim)};
    auto pos = std::find_if(best.begin(), best.end(), [&](const Hit& o) {
      return h.dist < o.dist || (h.dist == o.dist && h.id < o.id);
    });
    best.insert(pos, h);
    if (best.size() > k) {
      best.pop_back();
    }
  }
  for (auto& h : best) {
    h.dist = std::sqrt(h.dist);
  }
  return best;
}

// Quadratic restatement of the RNG occlusion rule.
inline std::vector<pgmerge::NodeId> prune_rng_reference(
    const pgmerge::VectorSet& vectors, pgmerge::NodeId query,
    std::vector<pgmerge::Candidate> candidates, std::uint32_t max_degree) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const pgmerge::Candidate& a, const pgmerge::Candidate& b) {
                     if (a.dist != b.dist) return a.dist < b.dist;
                     return a.id < b.id;
                   });
  std::vector<pgmerge::NodeId> kept;
  for (const auto& c : candidates) {
    if (kept.size() >= max_degree) break;
    if (c.id == query) continue;
    bool keep = true;
    for (auto s : kept) {
      double d_cs = l2_sqr_scalar(vectors.vec(c.id), vectors.vec(s), vectors.dim);
      if (!(c.dist < d_cs)) {
        keep = false;
        break;
      }
    }
    if (keep) kept.push_back(c.id);
  }
  return kept;
}

// Exhaustive minimum of the DPS objective over all valid pivot subsets.
// Domination relation: y is covered by p when p is in knn[y] (or y == p).
inline double dps_exhaustive_optimum(const std::vector<std::vector<std::uint32_t>>& knn,
                                     const pgmerge::VectorSet& set, double gamma,
                                     std::vector<std::uint32_t>* best_set = nullptr) {
  const std::size_t n = knn.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double cost = gamma * double(__builtin_popcount(mask));
    bool valid = true;
    for (std::size_t y = 0; y < n && valid; ++y) {
      if (mask & (1u << y)) continue;
      double slide = std::numeric_limits<double>::infinity();
      for (std::uint32_t p : knn[y]) {
        if (mask & (1u << p)) {
          slide = std::min(slide,
                           std::sqrt(l2_sqr_scalar(set.vec(y), set.vec(p), set.dim)));
        }
      }
      if (!std::isfinite(slide)) {
        valid = false;
      } else {
        cost += slide;
      }
    }
    if (valid && cost < best) {
      best = cost;
      if (best_set) {
        best_set->clear();
        for (std::uint32_t v = 0; v < n; ++v) {
          if (mask & (1u << v)) best_set->push_back(v);
        }
      }
    }
  }
  return best;
}

// Exhaustive minimum dominating set size under the same knn relation.
inline std::size_t mds_exhaustive(const std::vector<std::vector<std::uint32_t>>& knn) {
  const std::size_t n = knn.size();
  std::size_t best = n;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool valid = true;
    for (std::size_t y = 0; y < n && valid; ++y) {
      if (mask & (1u << y)) continue;
      bool covered = false;
      for (std::uint32_t p : knn[y]) {
        if (mask & (1u << p)) {
          covered = true;
          break;
        }
      }
      valid = covered;
    }
    if (valid) {
      best = std::min<std::size_t>(best, __builtin_popcount(mask));
    }
  }
  return best;
}

// Exhaustive optimum over all merge-order graphs on m <= 6 vertices
// meeting connectivity, degree and diameter constraints. Returns
// +infinity when no graph qualifies.
inline double mos_exhaustive_optimum(const std::vector<double>& costs, std::size_t m,
                                     std::uint32_t R, std::uint32_t delta) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> all_pairs;
  for (std::uint32_t i = 0; i < m; ++i) {
    for (std::uint32_t j = i + 1; j < m; ++j) {
      all_pairs.emplace_back(i, j);
    }
  }
  const std::size_t p = all_pairs.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
    std::vector<std::uint32_t> deg(m, 0);
    std::vector<std::vector<std::uint32_t>> adj(m);
    double cost = 0;
    bool deg_ok = true;
    for (std::size_t e = 0; e < p && deg_ok; ++e) {
      if (!(mask & (1u << e))) continue;
      auto [a, b] = all_pairs[e];
      if (++deg[a] > R || ++deg[b] > R) {
        deg_ok = false;
        break;
      }
      adj[a].push_back(b);
      adj[b].push_back(a);
      cost += costs[a * m + b];
    }
    if (!deg_ok || cost >= best) continue;
    // BFS diameter / connectivity.
    bool ok = true;
    for (std::size_t s = 0; s < m && ok; ++s) {
      std::vector<int> dist(m, -1);
      std::vector<std::uint32_t> queue{static_cast<std::uint32_t>(s)};
      dist[s] = 0;
      for (std::size_t h = 0; h < queue.size(); ++h) {
        for (auto v : adj[queue[h]]) {
          if (dist[v] < 0) {
            dist[v] = dist[queue[h]] + 1;
            queue.push_back(v);
          }
        }
      }
      for (std::size_t v = 0; v < m; ++v) {
        if (dist[v] < 0 || dist[v] > int(delta)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      best = cost;
    }
  }
  return best;
}

// Kruskal MST over a dense symmetric cost matrix.
inline double mst_cost_kruskal(const std::vector<double>& costs, std::size_t m) {
  struct Edge {
    double c;
    std::uint32_t a, b;
  };
  std::vector<Edge> edges;
  for (std::uint32_t i = 0; i < m; ++i) {
    for (std::uint32_t j = i + 1; j < m; ++j) {
      edges.push_back({costs[i * m + j], i, j});
    }
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& x, const Edge& y) { return x.c < y.c; });
  std::vector<std::uint32_t> parent(m);
  for (std::uint32_t i = 0; i < m; ++i) parent[i] = i;
  std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  double total = 0;
  std::size_t used = 0;
  for (const auto& e : edges) {
    auto ra = find(e.a), rb = find(e.b);
    if (ra == rb) continue;
    parent[ra] = rb;
    total += e.c;
    if (++used == m - 1) break;
  }
  return total;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0;
  return sxy / std::sqrt(sxx * syy);
}

// Scratch directory rooted in the build tree's temp area.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("pgmerge_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

} // namespace oracle
