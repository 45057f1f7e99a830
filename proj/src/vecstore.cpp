#include "pgmerge/vecstore.hpp"

#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <unordered_set>

#include "pgmerge/errors.hpp"

namespace pgmerge {

void VectorSet::append(std::span<const float> v) {
  if (count() == 0 && dim == 0) {
    dim = v.size();
  }
  if (v.size() != dim) {
    throw UsageError("VectorSet::append: dimension mismatch");
  }
  data.insert(data.end(), v.begin(), v.end());
}

void VectorSet::validate() const {
  if (dim == 0 && !data.empty()) {
    throw UsageError("VectorSet: data present with dim == 0");
  }
  if (dim != 0 && data.size() % dim != 0) {
    throw UsageError("VectorSet: data length is not a multiple of dim");
  }
  if (!ids.empty()) {
    if (ids.size() != count()) {
      throw UsageError("VectorSet: ids length does not match count");
    }
    std::unordered_set<std::uint64_t> seen(ids.begin(), ids.end());
    if (seen.size() != ids.size()) {
      throw UsageError("VectorSet: duplicate ids");
    }
  }
}

namespace io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw EnvError("cannot open for reading: " + path.string());
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw EnvError("read failed: " + path.string());
  }
  return bytes;
}

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw EnvError("cannot open for writing: " + tmp.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw EnvError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw EnvError("rename failed for " + path.string());
  }
}

} // namespace io

namespace {

// Little-endian raw views; target platforms are little-endian.
template <class T>
void append_raw(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_raw(const std::string& bytes, std::size_t& off, const char* what) {
  if (off + sizeof(T) > bytes.size()) {
    throw FormatError(std::string("truncated file while reading ") + what);
  }
  T v;
  std::memcpy(&v, bytes.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

} // namespace

VectorSet load_fvecs(const std::filesystem::path& path) {
  const std::string bytes = io::read_file(path);
  VectorSet set;
  std::size_t off = 0;
  while (off < bytes.size()) {
    auto rec_dim = read_raw<std::int32_t>(bytes, off, "fvecs record dim");
    if (rec_dim <= 0) {
      throw FormatError("fvecs: non-positive record dim");
    }
    if (set.count() == 0) {
      set.dim = static_cast<std::size_t>(rec_dim);
    } else if (static_cast<std::size_t>(rec_dim) != set.dim) {
      throw FormatError("fvecs: inconsistent record dim");
    }
    if (off + sizeof(float) * std::size_t(rec_dim) > bytes.size()) {
      throw FormatError("fvecs: truncated record payload");
    }
    std::size_t old = set.data.size();
    set.data.resize(old + std::size_t(rec_dim));
    std::memcpy(set.data.data() + old, bytes.data() + off,
                sizeof(float) * std::size_t(rec_dim));
    off += sizeof(float) * std::size_t(rec_dim);
  }
  return set;
}

void save_fvecs(const VectorSet& set, const std::filesystem::path& path) {
  std::string bytes;
  bytes.reserve(set.count() * (4 + 4 * set.dim));
  for (std::size_t i = 0; i < set.count(); ++i) {
    append_raw(bytes, static_cast<std::int32_t>(set.dim));
    bytes.append(reinterpret_cast<const char*>(set.vec(i)), sizeof(float) * set.dim);
  }
  io::atomic_write(path, bytes);
}

std::vector<std::vector<std::uint32_t>> load_ivecs(const std::filesystem::path& path) {
  const std::string bytes = io::read_file(path);
  std::vector<std::vector<std::uint32_t>> rows;
  std::size_t off = 0;
  while (off < bytes.size()) {
    auto len = read_raw<std::int32_t>(bytes, off, "ivecs record length");
    if (len < 0) {
      throw FormatError("ivecs: negative record length");
    }
    if (off + sizeof(std::uint32_t) * std::size_t(len) > bytes.size()) {
      throw FormatError("ivecs: truncated record payload");
    }
    std::vector<std::uint32_t> row(static_cast<std::size_t>(len), 0u);
    std::memcpy(row.data(), bytes.data() + off, sizeof(std::uint32_t) * row.size());
    off += sizeof(std::uint32_t) * row.size();
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_ivecs(const std::vector<std::vector<std::uint32_t>>& rows,
                const std::filesystem::path& path) {
  std::string bytes;
  for (const auto& row : rows) {
    if (row.size() > std::size_t(std::numeric_limits<std::int32_t>::max())) {
      throw UsageError("ivecs: row too long");
    }
    append_raw(bytes, static_cast<std::int32_t>(row.size()));
    bytes.append(reinterpret_cast<const char*>(row.data()),
                 sizeof(std::uint32_t) * row.size());
  }
  io::atomic_write(path, bytes);
}

GroundTruth ground_truth_from_ivecs(const std::filesystem::path& path) {
  GroundTruth gt;
  gt.neighbors = load_ivecs(path);
  gt.k = gt.neighbors.empty() ? 0 : gt.neighbors.front().size();
  for (const auto& row : gt.neighbors) {
    if (row.size() != gt.k) {
      throw FormatError("ground truth: ragged neighbor rows");
    }
  }
  return gt;
}

void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& path) {
  save_ivecs(gt.neighbors, path);
}

VectorSet make_gaussian(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  VectorSet set;
  set.dim = dim;
  set.data.resize(n * dim);
  for (auto& x : set.data) {
    x = normal(rng);
  }
  return set;
}

VectorSet make_mixture(std::size_t n, std::size_t dim, std::size_t clusters,
                       std::uint64_t seed, double center_scale,
                       std::vector<std::uint32_t>* labels) {
  if (clusters == 0) {
    throw UsageError("make_mixture: clusters must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::vector<float> centers(clusters * dim);
  for (auto& c : centers) {
    c = normal(rng) * static_cast<float>(center_scale);
  }
  std::uniform_int_distribution<std::size_t> pick(0, clusters - 1);
  VectorSet set;
  set.dim = dim;
  set.data.resize(n * dim);
  if (labels) {
    labels->assign(n, 0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = clusters == 1 ? 0 : pick(rng);
    if (labels) {
      (*labels)[i] = static_cast<std::uint32_t>(c);
    }
    float* row = set.data.data() + i * dim;
    const float* center = centers.data() + c * dim;
    for (std::size_t d = 0; d < dim; ++d) {
      row[d] = center[d] + normal(rng);
    }
  }
  return set;
}

} // namespace pgmerge
