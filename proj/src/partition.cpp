#include "pgmerge/partition.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "pgmerge/distance.hpp"
#include "pgmerge/errors.hpp"
#include "pgmerge/parallel.hpp"

namespace pgmerge {

namespace {

// Splits `set` along final assignments, handing partition i the global id
// range starting at its offset.
PartitionResult assemble(const VectorSet& set, std::uint32_t m,
                         PartitionKind kind, std::uint64_t seed,
                         std::vector<std::uint32_t> assignments) {
  PartitionResult result;
  result.spec.m = m;
  result.spec.kind = kind;
  result.spec.seed = seed;
  result.spec.assignments = std::move(assignments);
  result.spec.rows.resize(m);
  result.parts.resize(m);
  for (auto& part : result.parts) {
    part.dim = set.dim;
  }
  for (std::size_t i = 0; i < set.count(); ++i) {
    std::uint32_t p = result.spec.assignments[i];
    result.parts[p].append(set.row(i));
    result.spec.rows[p].push_back(i);
  }
  result.spec.offsets.resize(m);
  result.spec.counts.resize(m);
  std::uint64_t offset = 0;
  for (std::uint32_t p = 0; p < m; ++p) {
    result.spec.offsets[p] = offset;
    result.spec.counts[p] = result.parts[p].count();
    auto& ids = result.parts[p].ids;
    ids.resize(result.parts[p].count());
    std::iota(ids.begin(), ids.end(), offset);
    offset += result.spec.counts[p];
  }
  return result;
}

} // namespace

PartitionResult partition_random(const VectorSet& set, std::uint32_t m,
                                 std::uint64_t seed) {
  if (m == 0 || m > set.count()) {
    throw UsageError("partition_random: m must be in [1, count]");
  }
  std::vector<std::uint64_t> perm(set.count());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::uint32_t> assignments(set.count());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    assignments[perm[i]] = static_cast<std::uint32_t>(i % m);
  }
  return assemble(set, m, PartitionKind::random, seed, std::move(assignments));
}

KmeansState kmeans(const VectorSet& set, std::uint32_t m, std::uint64_t seed,
                   std::uint32_t max_iters, unsigned workers) {
  const std::size_t n = set.count();
  const std::size_t dim = set.dim;
  if (m == 0 || m > n) {
    throw UsageError("kmeans: m must be in [1, count]");
  }
  std::mt19937_64 rng(seed);
  KmeansState state;
  state.centroids.dim = dim;
  state.centroids.data.resize(std::size_t(m) * dim);

  // k-means++ seeding.
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  {
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    std::size_t c0 = first(rng);
    std::copy_n(set.vec(c0), dim, state.centroids.data.begin());
    for (std::uint32_t c = 1; c < m; ++c) {
      const float* prev = state.centroids.vec(c - 1);
      double total = 0;
      for (std::size_t i = 0; i < n; ++i) {
        d2[i] = std::min(d2[i], l2_sqr(set.vec(i), prev, dim));
        total += d2[i];
      }
      std::size_t chosen = 0;
      if (total > 0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double r = u(rng);
        double cum = 0;
        for (std::size_t i = 0; i < n; ++i) {
          cum += d2[i];
          if (cum >= r) {
            chosen = i;
            break;
          }
        }
      } else {
        std::uniform_int_distribution<std::size_t> any(0, n - 1);
        chosen = any(rng);
      }
      std::copy_n(set.vec(chosen), dim, state.centroids.data.begin() + c * dim);
    }
  }

  state.assignments.assign(n, 0);
  std::vector<std::size_t> sizes(m, 0);
  std::vector<double> point_cost(n, 0.0);

  for (std::uint32_t iter = 0; iter < max_iters; ++iter) {
    // Assignment step; per-point work is independent.
    parallel_for(n, workers, [&](std::size_t i) {
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t best_c = 0;
      for (std::uint32_t c = 0; c < m; ++c) {
        double d = l2_sqr(set.vec(i), state.centroids.vec(c), dim);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      state.assignments[i] = best_c;
      point_cost[i] = best;
    });
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++sizes[state.assignments[i]];
    }

    // Empty-cluster repair: steal the farthest point of the largest cluster.
    for (std::uint32_t c = 0; c < m; ++c) {
      if (sizes[c] != 0) {
        continue;
      }
      std::uint32_t donor = static_cast<std::uint32_t>(
          std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
      std::size_t worst = n;
      double worst_cost = -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (state.assignments[i] == donor && point_cost[i] > worst_cost) {
          worst_cost = point_cost[i];
          worst = i;
        }
      }
      state.assignments[worst] = c;
      point_cost[worst] = 0;
      --sizes[donor];
      ++sizes[c];
    }

    double inertia = std::accumulate(point_cost.begin(), point_cost.end(), 0.0);
    state.inertia_history.push_back(inertia);

    // Update step: centroid c averages its members in row order.
    std::vector<double> acc(std::size_t(m) * dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const float* row = set.vec(i);
      double* dst = acc.data() + std::size_t(state.assignments[i]) * dim;
      for (std::size_t d = 0; d < dim; ++d) {
        dst[d] += row[d];
      }
    }
    double max_shift_sq = 0;
    for (std::uint32_t c = 0; c < m; ++c) {
      float* dst = state.centroids.data.data() + std::size_t(c) * dim;
      double shift = 0;
      for (std::size_t d = 0; d < dim; ++d) {
        double v = acc[std::size_t(c) * dim + d] / double(sizes[c]);
        double diff = v - dst[d];
        shift += diff * diff;
        dst[d] = static_cast<float>(v);
      }
      max_shift_sq = std::max(max_shift_sq, shift);
    }
    if (std::sqrt(max_shift_sq) < 1e-4) {
      break;
    }
  }
  return state;
}

PartitionResult partition_kmeans(const VectorSet& set, std::uint32_t m,
                                 std::uint64_t seed, std::uint32_t max_iters,
                                 unsigned workers) {
  if (m == 0 || m > set.count()) {
    throw UsageError("partition_kmeans: m must be in [1, count]");
  }
  KmeansState state = kmeans(set, m, seed, max_iters, workers);
  PartitionResult result =
      assemble(set, m, PartitionKind::kmeans, seed, std::move(state.assignments));
  result.centroids = std::move(state.centroids);
  return result;
}

void write_partition_files(const PartitionResult& result,
                           const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw EnvError("cannot create directory " + dir.string());
  }
  nlohmann::json j;
  j["m"] = result.spec.m;
  j["kind"] = result.spec.kind == PartitionKind::random ? "random" : "kmeans";
  j["seed"] = result.spec.seed;
  j["dim"] = result.parts.empty() ? 0 : result.parts.front().dim;
  nlohmann::json parts = nlohmann::json::array();
  for (std::uint32_t p = 0; p < result.spec.m; ++p) {
    char name[32];
    std::snprintf(name, sizeof(name), "part_%03u.fvecs", p);
    save_fvecs(result.parts[p], dir / name);
    nlohmann::json entry;
    entry["file"] = name;
    entry["offset"] = result.spec.offsets[p];
    entry["count"] = result.spec.counts[p];
    entry["rows"] = result.spec.rows[p];
    parts.push_back(std::move(entry));
  }
  j["partitions"] = std::move(parts);
  if (result.centroids.count() > 0) {
    save_fvecs(result.centroids, dir / "centroids.fvecs");
    j["centroids"] = "centroids.fvecs";
  }
  io::atomic_write(dir / "manifest.json", j.dump(2) + "\n");
}

PartitionManifest load_partition_manifest(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  PartitionManifest mf;
  try {
    mf.m = j.at("m").get<std::uint32_t>();
    mf.kind = j.at("kind").get<std::string>();
    mf.seed = j.at("seed").get<std::uint64_t>();
    mf.dim = j.at("dim").get<std::size_t>();
    for (const auto& entry : j.at("partitions")) {
      mf.files.push_back(entry.at("file").get<std::string>());
      mf.offsets.push_back(entry.at("offset").get<std::uint64_t>());
      mf.counts.push_back(entry.at("count").get<std::uint64_t>());
      mf.rows.push_back(entry.at("rows").get<std::vector<std::uint64_t>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  if (mf.files.size() != mf.m) {
    throw FormatError("manifest: partition count mismatch");
  }
  return mf;
}

} // namespace pgmerge
