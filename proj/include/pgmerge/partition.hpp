#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pgmerge/vecstore.hpp"

namespace pgmerge {

enum class PartitionKind { random, kmeans };

struct PartitionSpec {
  std::uint32_t m = 1;
  PartitionKind kind = PartitionKind::random;
  std::uint64_t seed = 42;
  std::vector<std::uint32_t> assignments; // per input row
  /// Partition i owns global ids [offsets[i], offsets[i] + counts[i]).
  std::vector<std::uint64_t> offsets;
  std::vector<std::uint64_t> counts;
  /// rows[i][j] = original dataset row of partition i's j-th vector.
  std::vector<std::vector<std::uint64_t>> rows;
};

struct PartitionResult {
  std::vector<VectorSet> parts;
  PartitionSpec spec;
  VectorSet centroids; // kmeans only; empty for random
};

/// Seeded shuffle + round-robin split; sizes differ by at most one.
PartitionResult partition_random(const VectorSet& set, std::uint32_t m,
                                 std::uint64_t seed);

/// Lloyd's algorithm with k-means++ seeding. Stops after max_iters or when
/// the largest centroid movement drops below 1e-4. Empty clusters are
/// repaired by stealing the farthest point of the largest cluster.
PartitionResult partition_kmeans(const VectorSet& set, std::uint32_t m,
                                 std::uint64_t seed, std::uint32_t max_iters = 50,
                                 unsigned workers = 1);

struct KmeansState {
  std::vector<std::uint32_t> assignments;
  VectorSet centroids;
  std::vector<double> inertia_history; // one entry per Lloyd iteration
};

/// Bare clustering used by partition_kmeans; exposed for inspection.
KmeansState kmeans(const VectorSet& set, std::uint32_t m, std::uint64_t seed,
                   std::uint32_t max_iters, unsigned workers = 1);

/// Writes part_000.fvecs ..., centroids.fvecs (kmeans), manifest.json.
void write_partition_files(const PartitionResult& result,
                           const std::filesystem::path& dir);

struct PartitionManifest {
  std::uint32_t m = 0;
  std::string kind;
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  std::vector<std::string> files;
  std::vector<std::uint64_t> offsets;
  std::vector<std::uint64_t> counts;
  std::vector<std::vector<std::uint64_t>> rows;
};

PartitionManifest load_partition_manifest(const std::filesystem::path& path);

} // namespace pgmerge
