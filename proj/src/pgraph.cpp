#include "pgmerge/pgraph.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <queue>

#include "pgmerge/distance.hpp"
#include "pgmerge/errors.hpp"

namespace pgmerge {

namespace {

inline bool cand_less(const Candidate& a, const Candidate& b) {
  if (a.dist != b.dist) return a.dist < b.dist;
  return a.id < b.id;
}

struct CandAscending {
  bool operator()(const Candidate& a, const Candidate& b) const {
    return cand_less(a, b);
  }
};

// Max-heap on (dist, id): top() is the worst beam member.
struct CandWorstOnTop {
  bool operator()(const Candidate& a, const Candidate& b) const {
    return cand_less(a, b);
  }
};

// Min-heap on (dist, id) for the expansion frontier.
struct CandBestOnTop {
  bool operator()(const Candidate& a, const Candidate& b) const {
    return cand_less(b, a);
  }
};

// Epoch-tagged visited marks, reused across searches on a thread.
struct VisitedTable {
  std::vector<std::uint32_t> tag;
  std::uint32_t epoch = 0;

  void begin(std::size_t n) {
    if (tag.size() < n) {
      tag.resize(n, 0);
    }
    if (++epoch == 0) {
      std::fill(tag.begin(), tag.end(), 0u);
      epoch = 1;
    }
  }
  bool seen(NodeId v) const { return tag[v] == epoch; }
  void mark(NodeId v) { tag[v] = epoch; }
};

thread_local VisitedTable tls_visited;

} // namespace

namespace detail {

std::vector<Candidate> beam(const ProximityGraph& graph, const float* query,
                            std::uint32_t ef, std::span<const NodeId> entries,
                            SearchStats& stats,
                            std::vector<Candidate>* evaluated_pool) {
  const std::size_t n = graph.count();
  if (n == 0 || ef == 0) {
    return {};
  }
  const std::size_t dim = graph.vectors.dim;

  VisitedTable& visited = tls_visited;
  visited.begin(n);

  std::priority_queue<Candidate, std::vector<Candidate>, CandWorstOnTop> beam_set;
  std::priority_queue<Candidate, std::vector<Candidate>, CandBestOnTop> frontier;

  auto evaluate = [&](NodeId v) {
    double d = l2_sqr(query, graph.vectors.vec(v), dim);
    ++stats.ndc;
    if (evaluated_pool) {
      evaluated_pool->push_back({v, d});
    }
    return d;
  };

  for (NodeId e : entries) {
    if (e >= n) {
      throw UsageError("beam_search: entry id out of range");
    }
    if (visited.seen(e)) {
      continue;
    }
    visited.mark(e);
    Candidate c{e, evaluate(e)};
    frontier.push(c);
    beam_set.push(c);
    if (beam_set.size() > ef) {
      beam_set.pop();
    }
  }

  std::uint64_t expansions = 0;
  while (!frontier.empty()) {
    Candidate u = frontier.top();
    if (beam_set.size() >= ef && cand_less(beam_set.top(), u)) {
      break; // u fell out of the beam; Algorithm 1 would not expand it
    }
    frontier.pop();
    ++expansions;
    for (NodeId v : graph.adjacency[u.id]) {
      if (visited.seen(v)) {
        continue;
      }
      visited.mark(v);
      Candidate c{v, evaluate(v)};
      if (beam_set.size() < ef || cand_less(c, beam_set.top())) {
        frontier.push(c);
        beam_set.push(c);
        if (beam_set.size() > ef) {
          beam_set.pop();
        }
      }
    }
  }
  stats.hops = expansions > 0 ? expansions - 1 : 0;

  std::vector<Candidate> result(beam_set.size());
  for (std::size_t i = result.size(); i-- > 0;) {
    result[i] = beam_set.top();
    beam_set.pop();
  }
  if (evaluated_pool) {
    std::sort(evaluated_pool->begin(), evaluated_pool->end(), CandAscending{});
  }
  return result;
}

} // namespace detail

std::pair<std::vector<Candidate>, SearchStats> beam_search(
    const ProximityGraph& graph, std::span<const float> query, std::uint32_t ef,
    std::uint32_t k, std::span<const NodeId> entries) {
  if (k > ef) {
    throw UsageError("beam_search: k must not exceed ef");
  }
  if (query.size() != graph.vectors.dim && graph.count() > 0) {
    throw UsageError("beam_search: query dimension mismatch");
  }
  SearchStats stats;
  if (graph.count() == 0) {
    return {{}, stats};
  }
  if (entries.empty()) {
    throw UsageError("beam_search: entries must be nonempty");
  }
  auto t0 = std::chrono::steady_clock::now();
  auto result = detail::beam(graph, query.data(), ef, entries, stats);
  if (result.size() > k) {
    result.resize(k);
  }
  for (auto& c : result) {
    c.dist = std::sqrt(c.dist);
  }
  stats.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return {std::move(result), stats};
}

std::vector<NodeId> prune_rng(const VectorSet& vectors, NodeId query_id,
                              std::span<const Candidate> candidates,
                              std::uint32_t max_degree, std::uint64_t* ndc) {
  std::vector<NodeId> kept;
  kept.reserve(max_degree);
  std::uint64_t evals = 0;
  for (const auto& c : candidates) {
    if (kept.size() >= max_degree) {
      break;
    }
    if (c.id == query_id) {
      continue;
    }
    bool occluded = false;
    for (NodeId s : kept) {
      double d_cs = l2_sqr(vectors.vec(c.id), vectors.vec(s), vectors.dim);
      ++evals;
      if (d_cs <= c.dist) {
        occluded = true;
        break;
      }
    }
    if (!occluded) {
      kept.push_back(c.id);
    }
  }
  if (ndc) {
    *ndc += evals;
  }
  return kept;
}

namespace detail {

void add_reverse_edge(ProximityGraph& g, NodeId u, NodeId v, std::uint64_t* ndc) {
  auto& lst = g.adjacency[u];
  if (std::find(lst.begin(), lst.end(), v) != lst.end()) {
    return;
  }
  if (lst.size() < g.max_degree) {
    lst.push_back(v);
    return;
  }
  std::vector<Candidate> cands;
  cands.reserve(lst.size() + 1);
  const float* uvec = g.vectors.vec(u);
  for (NodeId w : lst) {
    cands.push_back({w, l2_sqr(uvec, g.vectors.vec(w), g.vectors.dim)});
  }
  cands.push_back({v, l2_sqr(uvec, g.vectors.vec(v), g.vectors.dim)});
  if (ndc) {
    *ndc += cands.size();
  }
  std::sort(cands.begin(), cands.end(), CandAscending{});
  lst = prune_rng(g.vectors, u, cands, g.max_degree, ndc);
}

} // namespace detail

namespace {

// Shared insertion step: graph.adjacency has rows 0..i-1, vector i is
// already present in graph.vectors.
void insert_adjacency(ProximityGraph& g, NodeId i, std::uint64_t* ndc) {
  if (i == 0) {
    g.adjacency.push_back({});
    g.entry_point = 0;
    return;
  }
  SearchStats stats;
  std::vector<Candidate> pool;
  NodeId entry = g.entry_point;
  detail::beam(g, g.vectors.vec(i), g.ef_construction, {&entry, 1}, stats, &pool);
  if (ndc) {
    *ndc += stats.ndc;
  }
  auto neighbors = prune_rng(g.vectors, i, pool, g.max_degree, ndc);
  g.adjacency.push_back(neighbors);
  for (NodeId u : neighbors) {
    detail::add_reverse_edge(g, u, i, ndc);
  }
}

} // namespace

ProximityGraph build_index(VectorSet set, const BuildParams& params,
                           std::uint64_t* ndc) {
  set.validate();
  ProximityGraph g;
  g.vectors = std::move(set);
  g.max_degree = params.max_degree;
  g.ef_construction = params.ef_construction;
  const std::size_t n = g.vectors.count();
  g.adjacency.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    insert_adjacency(g, static_cast<NodeId>(i), ndc);
  }
  repair_connectivity(g, ndc);
  return g;
}

std::size_t repair_connectivity(ProximityGraph& graph, std::uint64_t* ndc) {
  const std::size_t n = graph.count();
  if (n == 0) {
    return 0;
  }
  std::size_t added = 0;
  std::vector<std::uint8_t> seen(n);
  std::vector<NodeId> stack;
  for (int pass = 0; pass < 32; ++pass) {
    std::fill(seen.begin(), seen.end(), 0);
    stack.assign(1, graph.entry_point);
    seen[graph.entry_point] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : graph.adjacency[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++reached;
          stack.push_back(v);
        }
      }
    }
    if (reached == n) {
      break;
    }
    bool progress = false;
    NodeId entry = graph.entry_point;
    for (NodeId u = 0; u < n; ++u) {
      if (seen[u]) {
        continue;
      }
      SearchStats stats;
      auto res = detail::beam(graph, graph.vectors.vec(u), graph.ef_construction,
                              {&entry, 1}, stats);
      if (ndc) {
        *ndc += stats.ndc;
      }
      if (res.empty()) {
        continue;
      }
      NodeId r = res.front().id;
      for (const auto& c : res) {
        if (graph.adjacency[c.id].size() < graph.max_degree) {
          r = c.id;
          break;
        }
      }
      auto& lst = graph.adjacency[r];
      if (lst.size() < graph.max_degree) {
        lst.push_back(u);
      } else {
        // Evict the farthest current neighbor to guarantee the in-edge.
        std::size_t worst = 0;
        double worst_dist = -1;
        const float* rvec = graph.vectors.vec(r);
        for (std::size_t i = 0; i < lst.size(); ++i) {
          double d = l2_sqr(rvec, graph.vectors.vec(lst[i]), graph.vectors.dim);
          if (ndc) {
            ++*ndc;
          }
          if (d > worst_dist || (d == worst_dist && lst[i] > lst[worst])) {
            worst_dist = d;
            worst = i;
          }
        }
        lst[worst] = u;
      }
      ++added;
      progress = true;
    }
    if (!progress) {
      break;
    }
  }
  return added;
}

NodeId insert_node(ProximityGraph& graph, std::span<const float> vec,
                   std::uint64_t* ndc) {
  if (graph.count() > 0 && vec.size() != graph.vectors.dim) {
    throw UsageError("insert_node: dimension mismatch");
  }
  if (!graph.vectors.ids.empty()) {
    std::uint64_t next = 0;
    for (std::uint64_t id : graph.vectors.ids) {
      next = std::max(next, id + 1);
    }
    graph.vectors.ids.push_back(next);
  }
  graph.vectors.append(vec);
  NodeId i = static_cast<NodeId>(graph.count());
  insert_adjacency(graph, i, ndc);
  return i;
}

namespace {

constexpr char kMagic[4] = {'P', 'G', 'M', 'G'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(const std::string& bytes, std::size_t& off, const char* what) {
  if (off + sizeof(T) > bytes.size()) {
    throw FormatError(std::string("index file truncated at ") + what);
  }
  T v;
  std::memcpy(&v, bytes.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

} // namespace

void save_index(const ProximityGraph& graph, const std::filesystem::path& path) {
  std::string bytes;
  bytes.append(kMagic, 4);
  put(bytes, kVersion);
  put(bytes, static_cast<std::uint32_t>(graph.vectors.dim));
  put(bytes, static_cast<std::uint64_t>(graph.count()));
  put(bytes, graph.max_degree);
  put(bytes, static_cast<std::uint64_t>(graph.entry_point));
  for (const auto& nbrs : graph.adjacency) {
    put(bytes, static_cast<std::uint32_t>(nbrs.size()));
    for (NodeId v : nbrs) {
      put(bytes, static_cast<std::uint64_t>(v));
    }
  }
  for (std::size_t i = 0; i < graph.count(); ++i) {
    put(bytes, graph.vectors.id_of(i));
  }
  bytes.append(reinterpret_cast<const char*>(graph.vectors.data.data()),
               sizeof(float) * graph.vectors.data.size());
  io::atomic_write(path, bytes);
}

ProximityGraph load_index(const std::filesystem::path& path) {
  const std::string bytes = io::read_file(path);
  std::size_t off = 0;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("index file: bad magic");
  }
  off = 4;
  auto version = take<std::uint32_t>(bytes, off, "version");
  if (version != kVersion) {
    throw FormatError("index file: unsupported version " + std::to_string(version));
  }
  ProximityGraph g;
  g.vectors.dim = take<std::uint32_t>(bytes, off, "dim");
  auto count = take<std::uint64_t>(bytes, off, "count");
  g.max_degree = take<std::uint32_t>(bytes, off, "max_degree");
  auto entry = take<std::uint64_t>(bytes, off, "entry");
  if (count > 0 && entry >= count) {
    throw FormatError("index file: entry point out of range");
  }
  g.entry_point = static_cast<NodeId>(entry);
  g.adjacency.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto deg = take<std::uint32_t>(bytes, off, "degree");
    if (deg > g.max_degree) {
      throw FormatError("index file: degree exceeds max_degree");
    }
    auto& lst = g.adjacency[i];
    lst.reserve(deg);
    for (std::uint32_t j = 0; j < deg; ++j) {
      auto v = take<std::uint64_t>(bytes, off, "neighbor");
      if (v >= count || v == i) {
        throw FormatError("index file: bad neighbor id");
      }
      lst.push_back(static_cast<NodeId>(v));
    }
  }
  g.vectors.ids.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    g.vectors.ids[i] = take<std::uint64_t>(bytes, off, "ids");
  }
  g.vectors.data.resize(count * g.vectors.dim);
  std::size_t payload = sizeof(float) * g.vectors.data.size();
  if (off + payload != bytes.size()) {
    throw FormatError("index file: size mismatch in vector payload");
  }
  std::memcpy(g.vectors.data.data(), bytes.data() + off, payload);
  return g;
}

void validate_graph(const ProximityGraph& graph) {
  const std::size_t n = graph.count();
  if (graph.vectors.count() != n) {
    throw UsageError("graph: vector count does not match adjacency");
  }
  if (n > 0 && graph.entry_point >= n) {
    throw UsageError("graph: entry point out of range");
  }
  std::vector<std::uint8_t> mark(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& lst = graph.adjacency[i];
    if (lst.size() > graph.max_degree) {
      throw UsageError("graph: degree cap exceeded at node " + std::to_string(i));
    }
    for (NodeId v : lst) {
      if (v >= n) {
        throw UsageError("graph: neighbor id out of range");
      }
      if (v == i) {
        throw UsageError("graph: self loop at node " + std::to_string(i));
      }
      if (mark[v]) {
        throw UsageError("graph: duplicate neighbor at node " + std::to_string(i));
      }
      mark[v] = 1;
    }
    for (NodeId v : lst) {
      mark[v] = 0;
    }
  }
}

bool connected_from_entry(const ProximityGraph& graph) {
  const std::size_t n = graph.count();
  if (n == 0) {
    return true;
  }
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<NodeId> stack{graph.entry_point};
  seen[graph.entry_point] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : graph.adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

} // namespace pgmerge
