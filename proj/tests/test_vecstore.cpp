#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pgmerge/distance.hpp"
#include "pgmerge/errors.hpp"
#include "pgmerge/vecstore.hpp"

using namespace pgmerge;

TEST_CASE("l2 distance basics") {
  std::vector<float> z{0, 0}, a{3, 4};
  CHECK(l2_distance(z, z) == doctest::Approx(0.0));
  CHECK(l2_distance(z, a) == doctest::Approx(5.0));
  CHECK(l2_distance(a, z) == doctest::Approx(5.0));
  std::vector<float> bad{1, 2, 3};
  CHECK_THROWS_AS((void)l2_distance(z, bad), UsageError);
}

TEST_CASE("l2 kernel matches scalar reference on random pairs") {
  std::mt19937_64 rng(7);
  std::normal_distribution<float> normal;
  const std::size_t dim = 16;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<float> a(dim), b(dim);
    for (auto& x : a) x = normal(rng);
    for (auto& x : b) x = normal(rng);
    double ref = std::sqrt(oracle::l2_sqr_scalar(a.data(), b.data(), dim));
    double got = l2_distance(a, b);
    CHECK(got == doctest::Approx(ref).epsilon(1e-5));
  }
}

TEST_CASE("optimized kernel agrees with scalar loop over 1e4 pairs") {
  std::mt19937_64 rng(11);
  std::normal_distribution<float> normal;
  for (std::size_t dim : {3u, 16u, 33u, 64u}) {
    for (int trial = 0; trial < 2500; ++trial) {
      std::vector<float> a(dim), b(dim);
      for (auto& x : a) x = normal(rng);
      for (auto& x : b) x = normal(rng);
      double ref = oracle::l2_sqr_scalar(a.data(), b.data(), dim);
      double got = l2_sqr(a.data(), b.data(), dim);
      if (ref == 0) {
        CHECK(got == 0);
      } else {
        CHECK(std::abs(got - ref) / ref <= 1e-5);
      }
    }
  }
}

TEST_CASE("symmetry and triangle inequality") {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> normal;
  const std::size_t dim = 8;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<float> a(dim), b(dim), c(dim);
    for (auto& x : a) x = normal(rng);
    for (auto& x : b) x = normal(rng);
    for (auto& x : c) x = normal(rng);
    double ab = l2_distance(a, b);
    double ba = l2_distance(b, a);
    CHECK(ab == ba);
    double ac = l2_distance(a, c);
    double cb = l2_distance(c, b);
    CHECK(ab <= ac + cb + 1e-4);
  }
}

TEST_CASE("distance call counter tallies kernel invocations") {
  std::vector<float> a{1, 2}, b{3, 4};
  reset_distance_call_count();
  l2_sqr(a.data(), b.data(), 2);
  l2_sqr(a.data(), b.data(), 2);
  CHECK(distance_call_count() == 2);
}

TEST_CASE("fvecs single record and empty file") {
  oracle::TempDir tmp("fvecs");
  VectorSet one;
  one.dim = 2;
  one.data = {1.0f, 2.0f};
  save_fvecs(one, tmp.path / "one.fvecs");
  VectorSet back = load_fvecs(tmp.path / "one.fvecs");
  CHECK(back.dim == 2);
  CHECK(back.count() == 1);
  CHECK(back.data == one.data);
  CHECK(back.id_of(0) == 0);

  io::atomic_write(tmp.path / "empty.fvecs", "");
  VectorSet empty = load_fvecs(tmp.path / "empty.fvecs");
  CHECK(empty.count() == 0);
  empty.append(std::vector<float>{5.0f, 6.0f, 7.0f});
  CHECK(empty.dim == 3);
}

TEST_CASE("fvecs round-trip is byte-exact") {
  oracle::TempDir tmp("fvecs_rt");
  VectorSet set = make_gaussian(1000, 24, 99);
  auto p1 = tmp.path / "a.fvecs";
  auto p2 = tmp.path / "b.fvecs";
  save_fvecs(set, p1);
  save_fvecs(load_fvecs(p1), p2);
  CHECK(io::read_file(p1) == io::read_file(p2));
}

TEST_CASE("fvecs format errors") {
  oracle::TempDir tmp("fvecs_bad");
  // Inconsistent per-record dim.
  std::string bytes;
  std::int32_t d2 = 2, d3 = 3;
  float v[3] = {1, 2, 3};
  bytes.append(reinterpret_cast<char*>(&d2), 4);
  bytes.append(reinterpret_cast<char*>(v), 8);
  bytes.append(reinterpret_cast<char*>(&d3), 4);
  bytes.append(reinterpret_cast<char*>(v), 12);
  io::atomic_write(tmp.path / "mixed.fvecs", bytes);
  CHECK_THROWS_AS(load_fvecs(tmp.path / "mixed.fvecs"), FormatError);

  // Truncated payload.
  std::string cut = bytes.substr(0, 9);
  io::atomic_write(tmp.path / "cut.fvecs", cut);
  CHECK_THROWS_AS(load_fvecs(tmp.path / "cut.fvecs"), FormatError);

  CHECK_THROWS_AS(load_fvecs(tmp.path / "missing.fvecs"), EnvError);
}

TEST_CASE("ivecs round-trips, including empty rows") {
  oracle::TempDir tmp("ivecs");
  std::vector<std::vector<std::uint32_t>> rows{{1, 2}, {3, 4}};
  save_ivecs(rows, tmp.path / "gt.ivecs");
  CHECK(load_ivecs(tmp.path / "gt.ivecs") == rows);

  std::vector<std::vector<std::uint32_t>> ragged{{7}, {}, {8, 9, 10}};
  save_ivecs(ragged, tmp.path / "ragged.ivecs");
  CHECK(load_ivecs(tmp.path / "ragged.ivecs") == ragged);

  std::mt19937_64 rng(5);
  std::vector<std::vector<std::uint32_t>> random_rows(200);
  for (auto& row : random_rows) {
    row.resize(rng() % 10);
    for (auto& x : row) x = static_cast<std::uint32_t>(rng());
  }
  auto p1 = tmp.path / "r1.ivecs";
  auto p2 = tmp.path / "r2.ivecs";
  save_ivecs(random_rows, p1);
  save_ivecs(load_ivecs(p1), p2);
  CHECK(io::read_file(p1) == io::read_file(p2));
}

TEST_CASE("ground truth rows must be rectangular") {
  oracle::TempDir tmp("gt");
  save_ivecs({{1, 2}, {3}}, tmp.path / "bad.ivecs");
  CHECK_THROWS_AS(ground_truth_from_ivecs(tmp.path / "bad.ivecs"), FormatError);
  save_ivecs({{1, 2}, {3, 4}}, tmp.path / "ok.ivecs");
  GroundTruth gt = ground_truth_from_ivecs(tmp.path / "ok.ivecs");
  CHECK(gt.k == 2);
  CHECK(gt.query_count() == 2);
}

TEST_CASE("generators are seeded and labeled") {
  VectorSet a = make_gaussian(100, 8, 42);
  VectorSet b = make_gaussian(100, 8, 42);
  CHECK(a.data == b.data);
  VectorSet c = make_gaussian(100, 8, 43);
  CHECK(a.data != c.data);

  std::vector<std::uint32_t> labels;
  VectorSet mix = make_mixture(500, 8, 4, 42, 10.0, &labels);
  CHECK(mix.count() == 500);
  CHECK(labels.size() == 500);
  std::vector<std::size_t> hist(4, 0);
  for (auto l : labels) {
    REQUIRE(l < 4);
    ++hist[l];
  }
  for (auto h : hist) {
    CHECK(h > 0);
  }
}

TEST_CASE("VectorSet validation") {
  VectorSet set;
  set.dim = 2;
  set.data = {1, 2, 3, 4};
  set.ids = {7, 7};
  CHECK_THROWS_AS(set.validate(), UsageError);
  set.ids = {7, 8};
  CHECK_NOTHROW(set.validate());
  CHECK(set.id_of(1) == 8);
}
