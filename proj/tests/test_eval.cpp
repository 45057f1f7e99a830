#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "pgmerge/errors.hpp"
#include "pgmerge/eval.hpp"
#include "pgmerge/partition.hpp"

using namespace pgmerge;

namespace {

std::vector<ProximityGraph> build_partition_indexes(
    const std::vector<VectorSet>& parts, std::uint32_t M = 12,
    std::uint32_t efc = 64) {
  std::vector<ProximityGraph> indexes;
  for (const auto& p : parts) {
    indexes.push_back(build_index(p, {.max_degree = M, .ef_construction = efc}));
  }
  return indexes;
}

} // namespace

TEST_CASE("brute_force_knn hand case on a line") {
  VectorSet base;
  base.dim = 1;
  base.data = {0.0f, 1.0f, 2.0f};
  VectorSet queries;
  queries.dim = 1;
  queries.data = {0.6f};
  GroundTruth gt = brute_force_knn(base, queries, 2);
  REQUIRE(gt.neighbors.size() == 1);
  CHECK(gt.neighbors[0] == std::vector<std::uint32_t>{1, 0});
}

TEST_CASE("brute_force_knn returns an exact base vector first") {
  VectorSet base = make_gaussian(100, 8, 1);
  VectorSet queries;
  queries.dim = 8;
  queries.append(base.row(37));
  GroundTruth gt = brute_force_knn(base, queries, 3);
  CHECK(gt.neighbors[0][0] == 37);
}

TEST_CASE("brute_force_knn agrees with the independent oracle") {
  VectorSet base = make_gaussian(300, 8, 2);
  base.ids.resize(300);
  std::iota(base.ids.begin(), base.ids.end(), 700);
  VectorSet queries = make_gaussian(100, 8, 3);
  GroundTruth gt = brute_force_knn(base, queries, 10, 2);
  for (std::size_t q = 0; q < queries.count(); ++q) {
    auto want = oracle::brute_force_topk(base, queries.vec(q), 10);
    REQUIRE(want.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(gt.neighbors[q][i] == want[i].id);
    }
  }
  CHECK_THROWS_AS(brute_force_knn(base, queries, 301), UsageError);
}

TEST_CASE("recall_at_k ratios") {
  std::vector<std::uint32_t> truth{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::uint64_t> same{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::uint64_t> none{11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  std::vector<std::uint64_t> nine{1, 2, 3, 4, 5, 6, 7, 8, 9, 20};
  CHECK(recall_at_k(same, truth, 10) == 1.0);
  CHECK(recall_at_k(none, truth, 10) == 0.0);
  CHECK(recall_at_k(nine, truth, 10) == 0.9);
}

TEST_CASE("bench_search reaches recall 1.0 with ef = n") {
  VectorSet set = make_gaussian(400, 8, 5);
  ProximityGraph g = build_index(set, {.max_degree = 12, .ef_construction = 64});
  REQUIRE(connected_from_entry(g));
  VectorSet queries = make_gaussian(50, 8, 6);
  GroundTruth gt = brute_force_knn(set, queries, 10);
  std::uint32_t ef = 400;
  auto rows = bench_search(g, queries, gt, {&ef, 1}, 10, "full");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].recall_at_k == doctest::Approx(1.0));
  CHECK(rows[0].mean_ndc > 0);
}

TEST_CASE("bench_search recall is monotone over the sweep") {
  VectorSet set = make_gaussian(2000, 16, 7);
  ProximityGraph g = build_index(set, {.max_degree = 16, .ef_construction = 100});
  VectorSet queries = make_gaussian(120, 16, 8);
  GroundTruth gt = brute_force_knn(set, queries, 10);
  std::vector<std::uint32_t> sweep{16, 128};
  auto rows = bench_search(g, queries, gt, sweep, 10, "sweep");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].recall_at_k >= rows[0].recall_at_k);
}

TEST_CASE("larger datasets do not get faster at fixed ef") {
  VectorSet small = make_gaussian(2000, 16, 9);
  VectorSet big = make_gaussian(8000, 16, 10);
  ProximityGraph gs = build_index(small, {.max_degree = 12, .ef_construction = 64});
  ProximityGraph gb = build_index(big, {.max_degree = 12, .ef_construction = 64});
  VectorSet queries = make_gaussian(200, 16, 11);
  GroundTruth gt_s = brute_force_knn(small, queries, 10);
  GroundTruth gt_b = brute_force_knn(big, queries, 10);
  std::uint32_t ef = 64;
  // Compare NDC rather than wall time: hardware-agnostic and stable.
  auto rs = bench_search(gs, queries, gt_s, {&ef, 1}, 10, "s");
  auto rb = bench_search(gb, queries, gt_b, {&ef, 1}, 10, "b");
  CHECK(rb[0].mean_ndc >= rs[0].mean_ndc);
}

TEST_CASE("dumped result ids recompute the reported recall") {
  oracle::TempDir tmp("dump");
  VectorSet set = make_gaussian(500, 8, 12);
  ProximityGraph g = build_index(set, {.max_degree = 12, .ef_construction = 64});
  VectorSet queries = make_gaussian(40, 8, 13);
  GroundTruth gt = brute_force_knn(set, queries, 10);
  std::uint32_t ef = 32;
  auto rows = bench_search(g, queries, gt, {&ef, 1}, 10, "dumped", &tmp.path);
  auto dumped = load_ivecs(tmp.path / "results_dumped_ef32.ivecs");
  REQUIRE(dumped.size() == queries.count());
  double recall = 0;
  for (std::size_t q = 0; q < dumped.size(); ++q) {
    std::vector<std::uint64_t> ids(dumped[q].begin(), dumped[q].end());
    recall += recall_at_k(ids, gt.neighbors[q], 10);
  }
  recall /= double(queries.count());
  CHECK(recall == doctest::Approx(rows[0].recall_at_k));
}

TEST_CASE("interp_recall_at_qps interpolates inside the range only") {
  std::vector<BenchResult> sweep(3);
  sweep[0].qps = 100;
  sweep[0].recall_at_k = 0.99;
  sweep[1].qps = 200;
  sweep[1].recall_at_k = 0.9;
  sweep[2].qps = 400;
  sweep[2].recall_at_k = 0.5;
  CHECK(!interp_recall_at_qps(sweep, 50).has_value());
  CHECK(!interp_recall_at_qps(sweep, 500).has_value());
  CHECK(*interp_recall_at_qps(sweep, 100) == doctest::Approx(0.99));
  CHECK(*interp_recall_at_qps(sweep, 300) == doctest::Approx(0.7));
}

TEST_CASE("compare_merge_strategies end-to-end on small partitions") {
  VectorSet all = make_mixture(2000, 8, 4, 14, 6.0);
  PartitionResult pr = partition_random(all, 2, 15);
  VectorSet queries = make_gaussian(80, 8, 16);
  std::vector<CompareStrategy> strategies{
      CompareStrategy::naive, CompareStrategy::rnsm, CompareStrategy::rebuild,
      CompareStrategy::separated};
  MergeParams mparams;
  mparams.ef_merge = 48;
  std::vector<std::uint32_t> sweep{32, 64};
  auto reports = compare_merge_strategies(
      pr.parts, strategies, {.max_degree = 12, .ef_construction = 64}, mparams,
      queries, 10, sweep, 3, 2);
  REQUIRE(reports.size() == 4);

  // Rebuild must be present as the reference row.
  bool has_rebuild = false;
  for (const auto& rep : reports) {
    if (rep.label == "rebuild") {
      has_rebuild = true;
      CHECK(rep.merge_ndc > 0);
    }
    REQUIRE(rep.sweep.size() == 2);
  }
  CHECK(has_rebuild);

  // RNSM merge must cost less than naive merge on identical inputs.
  std::uint64_t nm = 0, rnsm = 0;
  for (const auto& rep : reports) {
    if (rep.label == "naive") nm = rep.merge_ndc;
    if (rep.label == "rnsm") rnsm = rep.merge_ndc;
  }
  CHECK(rnsm < nm);

  oracle::TempDir tmp("cmp");
  write_strategy_csv(reports, tmp.path / "cmp.csv", "unit=test");
  std::string csv = io::read_file(tmp.path / "cmp.csv");
  CHECK(csv.rfind("# pgmerge-report v1", 0) == 0);
  CHECK(csv.find("rebuild") != std::string::npos);
}

TEST_CASE("mos plans use fewer edges than pairwise for m >= R+2") {
  VectorSet all = make_mixture(1200, 8, 6, 17, 6.0);
  PartitionResult pr = partition_kmeans(all, 6, 18);
  CostMatrix costs = build_cost_matrix(pr.parts, CostKind::centroid_distance);
  MergeOrderGraph mos = mos_plan(costs, 3, 2);
  MergeOrderGraph pairwise = pairwise_plan(6);
  CHECK(mos.edges.size() < pairwise.edges.size());
}

TEST_CASE("make_topology shapes") {
  CostMatrix costs;
  costs.m = 6;
  costs.kind = CostKind::centroid_distance;
  costs.costs.assign(36, 2.0);
  for (int i = 0; i < 6; ++i) costs.costs[i * 6 + i] = 0;
  costs.costs[0 * 6 + 1] = costs.costs[1 * 6 + 0] = 0.5;

  auto path = make_topology(Topology::path, costs, 3, 2, 1);
  CHECK(path.edges.size() == 5);
  auto star = make_topology(Topology::star, costs, 3, 2, 1);
  CHECK(star.edges.size() == 5);
  CHECK(star.diameter() <= 2);
  auto mst = make_topology(Topology::mst, costs, 3, 2, 1);
  CHECK(mst.edges.size() == 5);
  CHECK(mst.connected());
  auto mos = make_topology(Topology::mos, costs, 3, 2, 1);
  CHECK(mos.connected());
  auto rr = make_topology(Topology::random_regular, costs, 3, 2, 1);
  CHECK(rr.connected());
  CHECK(rr.edges.size() == mos.edges.size());
}

TEST_CASE("mst topology matches the kruskal oracle cost") {
  for (std::uint64_t seed : {31ull, 32ull, 33ull}) {
    VectorSet centroids = make_gaussian(8, 4, seed);
    CostMatrix costs =
        build_cost_matrix_from_centroids(centroids, CostKind::centroid_distance);
    auto mst = make_topology(Topology::mst, costs, 3, 2, seed);
    CHECK(mst.total_cost(costs) ==
          doctest::Approx(oracle::mst_cost_kruskal(costs.costs, 8)));
  }
}

TEST_CASE("compare_merge_orders smoke on four cluster partitions") {
  VectorSet all = make_mixture(1600, 8, 4, 19, 8.0);
  PartitionResult pr = partition_kmeans(all, 4, 20);
  auto indexes = build_partition_indexes(pr.parts);
  CostMatrix costs = build_cost_matrix(pr.parts, CostKind::centroid_distance);
  VectorSet queries = make_mixture(60, 8, 4, 21, 8.0);
  VectorSet base;
  base.dim = 8;
  for (const auto& p : pr.parts) {
    base.data.insert(base.data.end(), p.data.begin(), p.data.end());
    for (std::size_t i = 0; i < p.count(); ++i) base.ids.push_back(p.id_of(i));
  }
  GroundTruth gt = brute_force_knn(base, queries, 10);
  std::vector<Topology> tops{Topology::path, Topology::star, Topology::mst};
  MergeParams mparams;
  mparams.ef_merge = 48;
  std::vector<std::uint32_t> sweep{32};
  auto reports = compare_merge_orders(indexes, costs, tops, mparams, queries, gt,
                                      sweep, 10, 3, 2, 22);
  REQUIRE(reports.size() == 3);
  for (const auto& rep : reports) {
    // Observation-2 setup: trees use exactly m-1 edges.
    CHECK(rep.edge_count == 3);
    CHECK(rep.merge_ndc > 0);
    REQUIRE(rep.sweep.size() == 1);
    CHECK(rep.sweep[0].recall_at_k > 0.2);
  }
}

TEST_CASE("pivot variant ratios are ordered and bounded") {
  VectorSet set = make_gaussian(2000, 16, 23);
  ProximityGraph src = build_index(set, {.max_degree = 16, .ef_construction = 100});
  std::vector<std::uint32_t> ks{3, 5, 10, 20};
  auto rows = pivot_variant_study(src, ks, 20, 42);
  REQUIRE(rows.size() == 12);
  std::map<std::pair<std::string, std::uint32_t>, double> table;
  for (const auto& r : rows) {
    CHECK(r.sliding_ratio >= 0.0);
    CHECK(r.sliding_ratio <= 1.0);
    table[{r.variant, r.k}] = r.sliding_ratio;
  }
  for (std::uint32_t k : ks) {
    CHECK(table[{"rnsm", k}] >= table[{"rnsm-random-pivots", k}]);
  }
  for (const char* variant : {"rnsm", "rnsm-random-pivots", "nsm-iterative"}) {
    for (std::size_t i = 1; i < ks.size(); ++i) {
      CHECK(table[{variant, ks[i]}] >= table[{variant, ks[i - 1]}] - 1e-9);
    }
  }
}

TEST_CASE("csv writers emit versioned headers") {
  oracle::TempDir tmp("csv");
  std::vector<BenchResult> rows(1);
  rows[0].strategy = "x";
  rows[0].ef = 10;
  write_bench_csv(rows, tmp.path / "b.csv", "k=10");
  std::string csv = io::read_file(tmp.path / "b.csv");
  CHECK(csv.rfind("# pgmerge-report v1\n# config: k=10\n", 0) == 0);

  MergeReport mr;
  mr.pivots = 3;
  mr.followers = 7;
  mr.sliding_ratio = 0.7;
  mr.total_ndc = 1234;
  write_merge_report_csv(mr, tmp.path / "m.csv", "");
  std::string mcsv = io::read_file(tmp.path / "m.csv");
  CHECK(mcsv.find("phase,pivots,followers,sliding_ratio,total_ndc,wall_ms") !=
        std::string::npos);
  CHECK(mcsv.find("total,3,7,") != std::string::npos);

  std::vector<SlideSample> samples{{1.5, 77}};
  write_slide_samples_csv(samples, tmp.path / "s.csv", "");
  std::string scsv = io::read_file(tmp.path / "s.csv");
  CHECK(scsv.find("pivot_dist,slide_ndc") != std::string::npos);
  CHECK(scsv.find("1.5,77") != std::string::npos);
}
