#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace pgmerge {

/// Flat row-major float32 vector collection. Immutable once handed to a
/// graph or loaded from disk; callers may append only while assembling.
struct VectorSet {
  std::size_t dim = 0;
  std::vector<float> data;
  /// Optional global identifiers; empty means the identity mapping 0..n-1.
  std::vector<std::uint64_t> ids;

  std::size_t count() const { return dim == 0 ? 0 : data.size() / dim; }

  const float* vec(std::size_t i) const { return data.data() + i * dim; }

  std::span<const float> row(std::size_t i) const { return {vec(i), dim}; }

  std::uint64_t id_of(std::size_t i) const { return ids.empty() ? i : ids[i]; }

  /// Appends one vector; fixes dim on the first append of an empty set.
  void append(std::span<const float> v);

  /// Checks data length, id distinctness. Throws UsageError on violation.
  void validate() const;
};

/// Exact k-nearest-neighbor answer rows, each sorted ascending by distance.
/// Identifiers are global ids of the base set.
struct GroundTruth {
  std::size_t k = 0;
  std::vector<std::vector<std::uint32_t>> neighbors;

  std::size_t query_count() const { return neighbors.size(); }
};

// fvecs/ivecs: little-endian records of [int32 length][length payload items].
VectorSet load_fvecs(const std::filesystem::path& path);
void save_fvecs(const VectorSet& set, const std::filesystem::path& path);

std::vector<std::vector<std::uint32_t>> load_ivecs(const std::filesystem::path& path);
void save_ivecs(const std::vector<std::vector<std::uint32_t>>& rows,
                const std::filesystem::path& path);

GroundTruth ground_truth_from_ivecs(const std::filesystem::path& path);
void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& path);

/// Isotropic unit Gaussian points, seeded.
VectorSet make_gaussian(std::size_t n, std::size_t dim, std::uint64_t seed);

/// Mixture of `clusters` Gaussians with unit within-cluster spread and
/// centers drawn at `center_scale`. clusters == 1 degenerates to
/// make_gaussian. Optional per-point cluster labels for tests.
VectorSet make_mixture(std::size_t n, std::size_t dim, std::size_t clusters,
                       std::uint64_t seed, double center_scale = 4.0,
                       std::vector<std::uint32_t>* labels = nullptr);

namespace io {
/// Writes via a temp file in the same directory, then renames, so failed
/// runs never leave partial output at `path`.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);
} // namespace io

} // namespace pgmerge
