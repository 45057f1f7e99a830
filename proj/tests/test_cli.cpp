#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pgmerge/cli.hpp"
#include "pgmerge/mos.hpp"
#include "pgmerge/partition.hpp"
#include "pgmerge/vecstore.hpp"

using namespace pgmerge;

namespace {

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"pgmerge"};
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace

TEST_CASE("help exits zero, missing flags exit one") {
  CHECK(run({"--help"}) == 0);
  CHECK(run({"build"}) == 1);          // --input/--out missing
  CHECK(run({"frobnicate"}) == 1);     // unknown subcommand
  CHECK(run({"build", "--nope"}) == 1);
}

TEST_CASE("corrupt inputs exit two and leave no output") {
  oracle::TempDir tmp("cli_bad");
  io::atomic_write(tmp.path / "bad.idx", "JUNKJUNKJUNK");
  std::string out = (tmp.path / "q.fvecs").string();
  CHECK(run({"search", "--index", (tmp.path / "bad.idx").string(), "--queries",
             out}) == 2);
  CHECK(run({"build", "--input", (tmp.path / "missing.fvecs").string(), "--out",
             (tmp.path / "g.idx").string()}) == 2);
  CHECK(!std::filesystem::exists(tmp.path / "g.idx"));
}

TEST_CASE("seed env var overrides the default") {
  oracle::TempDir tmp("cli_env");
  auto a = (tmp.path / "a.fvecs").string();
  auto b = (tmp.path / "b.fvecs").string();
  auto c = (tmp.path / "c.fvecs").string();
  setenv("PGMERGE_SEED", "777", 1);
  CHECK(run({"generate", "--n", "50", "--dim", "4", "--out", a}) == 0);
  unsetenv("PGMERGE_SEED");
  CHECK(run({"generate", "--n", "50", "--dim", "4", "--seed", "777", "--out", b}) == 0);
  CHECK(run({"generate", "--n", "50", "--dim", "4", "--out", c}) == 0); // seed 42
  CHECK(io::read_file(a) == io::read_file(b));
  CHECK(io::read_file(a) != io::read_file(c));
}

TEST_CASE("full pipeline: generate, partition, build, plan, merge-multi, gt, bench") {
  oracle::TempDir tmp("cli_pipe");
  auto p = [&](const char* name) { return (tmp.path / name).string(); };

  REQUIRE(run({"generate", "--n", "4000", "--dim", "8", "--clusters", "4", "--seed",
               "5", "--out", p("base.fvecs")}) == 0);
  REQUIRE(run({"generate", "--n", "100", "--dim", "8", "--clusters", "4", "--seed",
               "6", "--out", p("queries.fvecs")}) == 0);
  REQUIRE(run({"partition", "--input", p("base.fvecs"), "--m", "4", "--kind",
               "kmeans", "--seed", "7", "--out-dir", p("parts")}) == 0);

  PartitionManifest mf =
      load_partition_manifest(tmp.path / "parts" / "manifest.json");
  REQUIRE(mf.m == 4);
  std::vector<std::string> index_paths;
  for (std::uint32_t i = 0; i < mf.m; ++i) {
    auto part = (tmp.path / "parts" / mf.files[i]).string();
    auto idx = p(("g" + std::to_string(i) + ".idx").c_str());
    REQUIRE(run({"build", "--input", part, "--out", idx, "--max-degree", "12",
                 "--ef-construction", "64", "--id-offset",
                 std::to_string(mf.offsets[i])}) == 0);
    index_paths.push_back(idx);
  }

  REQUIRE(run({"plan", "--centroids", (tmp.path / "parts" / "centroids.fvecs").string(),
               "--kind", "centroid", "--R", "3", "--delta", "2", "--out",
               p("plan.json")}) == 0);
  MergeOrderGraph plan = load_plan(p("plan.json"));
  CHECK(plan.connected());

  std::string joined;
  for (std::size_t i = 0; i < index_paths.size(); ++i) {
    joined += (i ? "," : "") + index_paths[i];
  }
  REQUIRE(run({"merge-multi", "--indexes", joined, "--plan", p("plan.json"),
               "--out", p("all.idx"), "--ef", "48", "--workers", "1", "--report",
               p("multi.csv")}) == 0);
  CHECK(std::filesystem::exists(p("multi.csv")));

  REQUIRE(run({"gt", "--base", p("base.fvecs"), "--queries", p("queries.fvecs"),
               "--k", "10", "--out", p("gt.ivecs")}) == 0);
  REQUIRE(run({"bench", "--index", p("all.idx"), "--queries", p("queries.fvecs"),
               "--gt", p("gt.ivecs"), "--efs", "16,64", "--k", "10", "--out",
               p("bench.csv")}) == 0);
  std::string csv = io::read_file(p("bench.csv"));
  CHECK(csv.rfind("# pgmerge-report v1", 0) == 0);

  REQUIRE(run({"search", "--index", p("all.idx"), "--queries", p("queries.fvecs"),
               "--ef", "32", "--k", "5", "--out", p("res.ivecs")}) == 0);
  auto rows = load_ivecs(p("res.ivecs"));
  CHECK(rows.size() == 100);
  CHECK(rows[0].size() == 5);
}

TEST_CASE("pairwise merge via CLI with reports") {
  oracle::TempDir tmp("cli_merge");
  auto p = [&](const char* name) { return (tmp.path / name).string(); };
  REQUIRE(run({"generate", "--n", "800", "--dim", "8", "--seed", "11", "--out",
               p("a.fvecs")}) == 0);
  REQUIRE(run({"generate", "--n", "900", "--dim", "8", "--seed", "12", "--out",
               p("b.fvecs")}) == 0);
  REQUIRE(run({"build", "--input", p("a.fvecs"), "--out", p("a.idx")}) == 0);
  REQUIRE(run({"build", "--input", p("b.fvecs"), "--out", p("b.idx"),
               "--id-offset", "10000"}) == 0);
  REQUIRE(run({"merge", "--source", p("a.idx"), "--target", p("b.idx"), "--out",
               p("m.idx"), "--k", "5", "--k-plus", "20", "--k-cross", "10", "--ef",
               "48", "--workers", "1", "--report", p("report.csv")}) == 0);
  CHECK(std::filesystem::exists(p("report.csv")));
  CHECK(std::filesystem::exists(p("report_samples.csv")));
  ProximityGraph merged = load_index(p("m.idx"));
  CHECK(merged.count() == 1700);

  REQUIRE(run({"merge", "--source", p("a.idx"), "--target", p("b.idx"), "--out",
               p("nm.idx"), "--strategy", "naive", "--ef", "48"}) == 0);
  ProximityGraph nm = load_index(p("nm.idx"));
  CHECK(nm.count() == 1700);
}

TEST_CASE("build and merge outputs are byte-identical across reruns") {
  oracle::TempDir tmp("cli_det");
  auto p = [&](const char* name) { return (tmp.path / name).string(); };
  REQUIRE(run({"generate", "--n", "600", "--dim", "8", "--seed", "3", "--out",
               p("x.fvecs")}) == 0);
  for (const char* out : {"g1.idx", "g2.idx"}) {
    REQUIRE(run({"build", "--input", p("x.fvecs"), "--out", p(out), "--seed",
                 "3"}) == 0);
  }
  CHECK(io::read_file(p("g1.idx")) == io::read_file(p("g2.idx")));
}
