#include "pgmerge/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <numeric>
#include <sstream>

#include "pgmerge/errors.hpp"
#include "pgmerge/eval.hpp"
#include "pgmerge/mos.hpp"
#include "pgmerge/parallel.hpp"
#include "pgmerge/partition.hpp"
#include "pgmerge/pgraph.hpp"
#include "pgmerge/rnsm.hpp"
#include "pgmerge/vecstore.hpp"

namespace pgmerge {

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
  std::uint64_t seed = 42;
  unsigned workers = default_workers();
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--seed", opts.seed, "RNG seed")->envname("PGMERGE_SEED");
  cmd->add_option("--workers", opts.workers, "worker threads")
      ->check(CLI::PositiveNumber);
}

std::vector<VectorSet> load_parts(const fs::path& dir, PartitionManifest& mf) {
  mf = load_partition_manifest(dir / "manifest.json");
  std::vector<VectorSet> parts;
  parts.reserve(mf.m);
  for (std::uint32_t p = 0; p < mf.m; ++p) {
    VectorSet part = load_fvecs(dir / mf.files[p]);
    if (part.count() != mf.counts[p]) {
      throw FormatError("partition file size disagrees with manifest: " +
                        mf.files[p]);
    }
    part.ids.resize(part.count());
    std::iota(part.ids.begin(), part.ids.end(), mf.offsets[p]);
    parts.push_back(std::move(part));
  }
  return parts;
}

fs::path samples_path_for(const fs::path& report) {
  fs::path p = report;
  p.replace_extension();
  p += "_samples.csv";
  return p;
}

std::string echo(std::initializer_list<std::pair<std::string, std::string>> kvs) {
  std::string out;
  for (const auto& [k, v] : kvs) {
    if (!out.empty()) {
      out += " ";
    }
    out += k + "=" + v;
  }
  return out;
}

MergeStrategy parse_strategy(const std::string& s) {
  if (s == "rnsm") return MergeStrategy::rnsm;
  if (s == "naive") return MergeStrategy::naive;
  throw UsageError("unknown merge strategy: " + s);
}

int dispatch(CLI::App& app, int argc, const char* const* argv) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"proximity-graph index builder, merger and benchmark harness"};
  app.require_subcommand(1);

  int rc = 0;
  auto guard = [&rc](auto&& fn) {
    return [&rc, fn = std::forward<decltype(fn)>(fn)]() {
      try {
        fn();
      } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        rc = 1;
      } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        rc = 2;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        rc = 2;
      }
    };
  };

  // generate
  {
    auto* cmd = app.add_subcommand("generate", "write synthetic fvecs data");
    auto opts = std::make_shared<CommonOpts>();
    auto n = std::make_shared<std::size_t>(10000);
    auto dim = std::make_shared<std::size_t>(16);
    auto clusters = std::make_shared<std::size_t>(1);
    auto scale = std::make_shared<double>(4.0);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--n", *n, "vector count")->required();
    cmd->add_option("--dim", *dim, "dimensionality")->required();
    cmd->add_option("--clusters", *clusters, "mixture component count");
    cmd->add_option("--center-scale", *scale, "mixture center spread");
    cmd->add_option("--out", *out, "output fvecs path")->required();
    add_common(cmd, *opts);
    cmd->callback(guard([=] {
      VectorSet set = *clusters <= 1
                          ? make_gaussian(*n, *dim, opts->seed)
                          : make_mixture(*n, *dim, *clusters, opts->seed, *scale);
      save_fvecs(set, *out);
      std::cerr << "generate " +
                       echo({{"n", std::to_string(*n)},
                             {"dim", std::to_string(*dim)},
                             {"clusters", std::to_string(*clusters)},
                             {"seed", std::to_string(opts->seed)},
                             {"out", *out}})
                << "\n";
    }));
  }

  // partition
  {
    auto* cmd = app.add_subcommand("partition", "split a dataset into partitions");
    auto opts = std::make_shared<CommonOpts>();
    auto input = std::make_shared<std::string>();
    auto m = std::make_shared<std::uint32_t>(2);
    auto kind = std::make_shared<std::string>("random");
    auto out_dir = std::make_shared<std::string>();
    auto iters = std::make_shared<std::uint32_t>(50);
    cmd->add_option("--input", *input, "input fvecs")->required();
    cmd->add_option("--m", *m, "partition count")->required();
    cmd->add_option("--kind", *kind, "random|kmeans")
        ->check(CLI::IsMember({"random", "kmeans"}));
    cmd->add_option("--out-dir", *out_dir, "output directory")->required();
    cmd->add_option("--max-iters", *iters, "kmeans iteration cap");
    add_common(cmd, *opts);
    cmd->callback(guard([=] {
      VectorSet set = load_fvecs(*input);
      PartitionResult result =
          *kind == "random"
              ? partition_random(set, *m, opts->seed)
              : partition_kmeans(set, *m, opts->seed, *iters, opts->workers);
      write_partition_files(result, *out_dir);
      std::cerr << "partition "
                << echo({{"input", *input},
                         {"m", std::to_string(*m)},
                         {"kind", *kind},
                         {"seed", std::to_string(opts->seed)},
                         {"out-dir", *out_dir}})
                << "\n";
    }));
  }

  // gt
  {
    auto* cmd = app.add_subcommand("gt", "exact ground truth by exhaustive scan");
    auto opts = std::make_shared<CommonOpts>();
    auto base = std::make_shared<std::string>();
    auto queries = std::make_shared<std::string>();
    auto k = std::make_shared<std::uint32_t>(100);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--base", *base, "base fvecs")->required();
    cmd->add_option("--queries", *queries, "query fvecs")->required();
    cmd->add_option("--k", *k, "neighbors per query");
    cmd->add_option("--out", *out, "output ivecs")->required();
    add_common(cmd, *opts);
    cmd->callback(guard([=] {
      VectorSet b = load_fvecs(*base);
      VectorSet q = load_fvecs(*queries);
      GroundTruth gt = brute_force_knn(b, q, *k, opts->workers);
      save_ground_truth(gt, *out);
      std::cerr << "gt "
                << echo({{"base", *base},
                         {"queries", *queries},
                         {"k", std::to_string(*k)},
                         {"out", *out}})
                << "\n";
    }));
  }

  // build
  {
    auto* cmd = app.add_subcommand("build", "build a proximity-graph index");
    auto opts = std::make_shared<CommonOpts>();
    auto input = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto params = std::make_shared<BuildParams>();
    auto id_offset = std::make_shared<std::uint64_t>(0);
    cmd->add_option("--input", *input, "input fvecs")->required();
    cmd->add_option("--out", *out, "output index path")->required();
    cmd->add_option("--max-degree", params->max_degree, "degree cap M");
    cmd->add_option("--ef-construction", params->ef_construction,
                    "construction beam width");
    cmd->add_option("--id-offset", *id_offset,
                    "global id of the first vector (partition ranges)");
    add_common(cmd, *opts);
    cmd->callback(guard([=] {
      VectorSet set = load_fvecs(*input);
      if (*id_offset != 0) {
        set.ids.resize(set.count());
        std::iota(set.ids.begin(), set.ids.end(), *id_offset);
      }
      params->seed = opts->seed;
      ProximityGraph g = build_index(std::move(set), *params);
      save_index(g, *out);
      std::cerr << "build "
                << echo({{"input", *input},
                         {"out", *out},
                         {"max-degree", std::to_string(params->max_degree)},
                         {"ef-construction", std::to_string(params->ef_construction)},
                         {"seed", std::to_string(opts->seed)}})
                << "\n";
    }));
  }

  // plan
  {
    auto* cmd = app.add_subcommand("plan", "merge order selection");
    auto centroids = std::make_shared<std::string>();
    auto kind = std::make_shared<std::string>("centroid");
    auto R = std::make_shared<std::uint32_t>(0);
    auto delta = std::make_shared<std::uint32_t>(2);
    auto m = std::make_shared<std::size_t>(0);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--centroids", *centroids, "centroid fvecs (centroid kind)");
    cmd->add_option("--kind", *kind, "centroid|random")
        ->check(CLI::IsMember({"centroid", "random"}));
    cmd->add_option("--R", *R, "degree bound (default min(4, m-1))");
    cmd->add_option("--delta", *delta, "diameter bound");
    cmd->add_option("--m", *m, "partition count (random kind without centroids)");
    cmd->add_option("--out", *out, "output plan.json")->required();
    cmd->callback(guard([=] {
      CostMatrix costs;
      if (!centroids->empty()) {
        VectorSet c = load_fvecs(*centroids);
        costs = build_cost_matrix_from_centroids(
            c, *kind == "centroid" ? CostKind::centroid_distance
                                   : CostKind::random_unit);
      } else if (*kind == "random" && *m > 0) {
        VectorSet dummy;
        dummy.dim = 1;
        dummy.data.assign(*m, 0.0f);
        costs = build_cost_matrix_from_centroids(dummy, CostKind::random_unit);
      } else {
        throw UsageError("plan: need --centroids, or --kind random with --m");
      }
      std::uint32_t use_R =
          *R > 0 ? *R
                 : std::max<std::uint32_t>(
                       1, std::min<std::uint32_t>(4, std::uint32_t(costs.m) - 1));
      MergeOrderGraph plan = mos_plan(costs, use_R, *delta);
      save_plan(plan, *out);
      std::cerr << "plan "
                << echo({{"m", std::to_string(costs.m)},
                         {"kind", *kind},
                         {"R", std::to_string(use_R)},
                         {"delta", std::to_string(*delta)},
                         {"edges", std::to_string(plan.edges.size())},
                         {"out", *out}})
                << "\n";
    }));
  }

  // merge
  {
    auto* cmd = app.add_subcommand("merge", "merge two indexes");
    auto opts = std::make_shared<CommonOpts>();
    auto source = std::make_shared<std::string>();
    auto target = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto report = std::make_shared<std::string>();
    auto strategy = std::make_shared<std::string>("rnsm");
    auto params = std::make_shared<MergeParams>();
    params->ef_merge = 100;
    cmd->add_option("--source", *source, "source index")->required();
    cmd->add_option("--target", *target, "target index")->required();
    cmd->add_option("--out", *out, "merged index path")->required();
    cmd->add_option("--k", params->k, "reverse-neighbor size");
    cmd->add_option("--k-plus", params->k_plus, "expansion size");
    cmd->add_option("--k-cross", params->k_cross, "cross neighbors per node");
    cmd->add_option("--ef", params->ef_merge, "merge search beam width");
    cmd->add_option("--strategy", *strategy, "rnsm|naive")
        ->check(CLI::IsMember({"rnsm", "naive"}));
    cmd->add_option("--report", *report, "merge report CSV path");
    add_common(cmd, *opts);
    cmd->callback(guard([=] {
      ProximityGraph src = load_index(*source);
      ProximityGraph tgt = load_index(*target);
      params->workers = opts->workers;
      params->seed = opts->seed;
      auto [merged, rep] = merge_pair(src, tgt, *params, parse_strategy(*strategy));
      save_index(merged, *out);
      std::string config =
          echo({{"source", *source},
                {"target", *target},
                {"strategy", *strategy},
                {"k", std::to_string(params->k)},
                {"k-plus", std::to_string(params->k_plus)},
                {"k-cross", std::to_string(params->k_cross)},
                {"ef", std::to_string(params->ef_merge)},
                {"workers", std::to_string(params->workers)},
                {"seed", std::to_string(opts->seed)}});
      if (!report->empty()) {
        write_merge_report_csv(rep, *report, config);
        if (!rep.samples.empty()) {
          write_slide_samples_csv(rep.samples, samples_path_for(*report), config);
        }
      }
      std::cerr << "merge " << config << " total_ndc=" << rep.total_ndc << "\n";
    }));
  }

  // merge-multi
  {
    auto* cmd = app.add_subcommand("merge-multi", "merge many indexes along a plan");
    auto opts = std::make_shared<CommonOpts>();
    auto index_paths = std::make_shared<std::vector<std::string>>();
    auto plan_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto report = std::make_shared<std::string>();
    auto strategy = std::make_shared<std::string>("rnsm");
    auto params = std::make_shared<MergeParams>();
    params->ef_merge = 100;
    cmd->add_option("--indexes", *index_paths, "comma-separated index paths")
        ->required()
        ->delimiter(',');
    cmd->add_option("--plan", *plan_path, "plan.json")->required();
    cmd->add_option("--out", *out, "merged index path")->required();
    cmd->add_option("--k", params->k, "reverse-neighbor size");
    cmd->add_option("--k-plus", params->k_plus, "expansion size");
    cmd->add_option("--k-cross", params->k_cross, "cross neighbors per node");
    cmd->add_option("--ef", params->ef_merge, "merge search beam width");
    cmd->add_option("--strategy", *strategy, "rnsm|naive")
        ->check(CLI::IsMember({"rnsm", "naive"}));
    cmd->add_option("--report", *report, "multi-merge report CSV path");
    add_common(cmd, *opts);
    cmd->callback(guard([=] {
      std::vector<ProximityGraph> indexes;
      std::vector<VectorSet> sets;
      for (const auto& p : *index_paths) {
        indexes.push_back(load_index(p));
        sets.push_back(indexes.back().vectors);
      }
      MergeOrderGraph plan = load_plan(*plan_path);
      CostMatrix costs = build_cost_matrix(sets, CostKind::centroid_distance);
      params->workers = opts->workers;
      params->seed = opts->seed;
      auto [merged, rep] =
          multi_merge(indexes, plan, costs, *params, parse_strategy(*strategy));
      save_index(merged, *out);
      std::string config = echo({{"plan", *plan_path},
                                 {"indexes", std::to_string(indexes.size())},
                                 {"strategy", *strategy},
                                 {"ef", std::to_string(params->ef_merge)},
                                 {"workers", std::to_string(params->workers)},
                                 {"seed", std::to_string(opts->seed)}});
      if (!report->empty()) {
        std::string body;
        for (std::size_t e = 0; e < rep.per_edge.size(); ++e) {
          const auto& r = rep.per_edge[e];
          body += std::to_string(rep.edge_order[e].first) + "," +
                  std::to_string(rep.edge_order[e].second) + "," +
                  std::to_string(r.pivots) + "," + std::to_string(r.followers) +
                  "," + std::to_string(r.sliding_ratio) + "," +
                  std::to_string(r.total_ndc) + "," + std::to_string(r.wall_ms) +
                  "\n";
        }
        std::string csv = "# pgmerge-report v1\n# config: " + config +
                          "\nedge_i,edge_j,pivots,followers,sliding_ratio,"
                          "total_ndc,wall_ms\n" +
                          body + "total,,,,," + std::to_string(rep.total_ndc) + "," +
                          std::to_string(rep.wall_ms) + "\n";
        io::atomic_write(*report, csv);
      }
      std::cerr << "merge-multi " << config << " total_ndc=" << rep.total_ndc
                << "\n";
    }));
  }

  // search
  {
    auto* cmd = app.add_subcommand("search", "query an index");
    auto index_path = std::make_shared<std::string>();
    auto queries_path = std::make_shared<std::string>();
    auto ef = std::make_shared<std::uint32_t>(64);
    auto k = std::make_shared<std::uint32_t>(10);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--index", *index_path, "index path")->required();
    cmd->add_option("--queries", *queries_path, "query fvecs")->required();
    cmd->add_option("--ef", *ef, "beam width");
    cmd->add_option("--k", *k, "results per query");
    cmd->add_option("--out", *out, "result ivecs (global ids)");
    cmd->callback(guard([=] {
      ProximityGraph g = load_index(*index_path);
      VectorSet queries = load_fvecs(*queries_path);
      NodeId entry = g.entry_point;
      std::vector<std::vector<std::uint32_t>> rows;
      for (std::size_t q = 0; q < queries.count(); ++q) {
        auto [res, stats] =
            beam_search(g, queries.row(q), std::max(*ef, *k), *k, {&entry, 1});
        std::vector<std::uint32_t> row;
        row.reserve(res.size());
        for (const auto& c : res) {
          row.push_back(static_cast<std::uint32_t>(g.vectors.id_of(c.id)));
        }
        if (out->empty()) {
          std::cout << q << ":";
          for (auto id : row) {
            std::cout << " " << id;
          }
          std::cout << "\n";
        }
        rows.push_back(std::move(row));
      }
      if (!out->empty()) {
        save_ivecs(rows, *out);
      }
    }));
  }

  // bench
  {
    auto* cmd = app.add_subcommand("bench", "recall/QPS sweep on an index");
    auto index_path = std::make_shared<std::string>();
    auto queries_path = std::make_shared<std::string>();
    auto gt_path = std::make_shared<std::string>();
    auto efs = std::make_shared<std::vector<std::uint32_t>>(
        std::vector<std::uint32_t>{16, 32, 64, 128});
    auto k = std::make_shared<std::uint32_t>(10);
    auto out = std::make_shared<std::string>();
    auto label = std::make_shared<std::string>("index");
    auto dump_dir = std::make_shared<std::string>();
    cmd->add_option("--index", *index_path, "index path")->required();
    cmd->add_option("--queries", *queries_path, "query fvecs")->required();
    cmd->add_option("--gt", *gt_path, "ground truth ivecs")->required();
    cmd->add_option("--efs", *efs, "ef sweep")->delimiter(',');
    cmd->add_option("--k", *k, "recall@k");
    cmd->add_option("--label", *label, "strategy label in the CSV");
    cmd->add_option("--out", *out, "output CSV")->required();
    cmd->add_option("--dump-dir", *dump_dir, "directory for raw result ids");
    cmd->callback(guard([=] {
      ProximityGraph g = load_index(*index_path);
      VectorSet queries = load_fvecs(*queries_path);
      GroundTruth gt = ground_truth_from_ivecs(*gt_path);
      fs::path dump = *dump_dir;
      if (!dump_dir->empty()) {
        std::error_code ec;
        fs::create_directories(dump, ec);
      }
      auto rows = bench_search(g, queries, gt, *efs, *k, *label,
                               dump_dir->empty() ? nullptr : &dump);
      std::string config = echo({{"index", *index_path},
                                 {"queries", *queries_path},
                                 {"k", std::to_string(*k)}});
      write_bench_csv(rows, *out, config);
      for (const auto& r : rows) {
        std::cout << r.strategy << " ef=" << r.ef << " recall@" << *k << "="
                  << r.recall_at_k << " qps=" << r.qps << " ndc=" << r.mean_ndc
                  << "\n";
      }
    }));
  }

  // compare
  {
    auto* cmd = app.add_subcommand("compare", "strategy / order / pivot studies");
    auto opts = std::make_shared<CommonOpts>();
    auto what = std::make_shared<std::string>("strategies");
    auto parts_dir = std::make_shared<std::string>();
    auto queries_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto efs = std::make_shared<std::vector<std::uint32_t>>(
        std::vector<std::uint32_t>{16, 32, 64, 128});
    auto k = std::make_shared<std::uint32_t>(10);
    auto R = std::make_shared<std::uint32_t>(0);
    auto delta = std::make_shared<std::uint32_t>(2);
    auto bparams = std::make_shared<BuildParams>();
    auto mparams = std::make_shared<MergeParams>();
    mparams->ef_merge = 100;
    auto strategies = std::make_shared<std::vector<std::string>>(
        std::vector<std::string>{"naive", "rnsm", "rnsm+mos-centroid", "rebuild",
                                 "separated"});
    auto topologies = std::make_shared<std::vector<std::string>>(
        std::vector<std::string>{"path", "star", "mst", "mos", "random-regular"});
    auto index_path = std::make_shared<std::string>();
    auto ks = std::make_shared<std::vector<std::uint32_t>>(
        std::vector<std::uint32_t>{3, 5, 10, 20});
    cmd->add_option("--what", *what, "strategies|orders|pivots")
        ->check(CLI::IsMember({"strategies", "orders", "pivots"}));
    cmd->add_option("--parts-dir", *parts_dir, "partition directory with manifest");
    cmd->add_option("--queries", *queries_path, "query fvecs");
    cmd->add_option("--out", *out, "output CSV")->required();
    cmd->add_option("--efs", *efs, "ef sweep")->delimiter(',');
    cmd->add_option("--k", *k, "recall@k");
    cmd->add_option("--R", *R, "MOS degree bound (default min(4, m-1))");
    cmd->add_option("--delta", *delta, "MOS diameter bound");
    cmd->add_option("--max-degree", bparams->max_degree, "index degree cap");
    cmd->add_option("--ef-construction", bparams->ef_construction,
                    "construction beam width");
    cmd->add_option("--merge-k", mparams->k, "reverse-neighbor size");
    cmd->add_option("--k-plus", mparams->k_plus, "expansion size");
    cmd->add_option("--k-cross", mparams->k_cross, "cross neighbors");
    cmd->add_option("--ef", mparams->ef_merge, "merge beam width");
    cmd->add_option("--strategies", *strategies, "strategy list")->delimiter(',');
    cmd->add_option("--topologies", *topologies, "topology list")->delimiter(',');
    cmd->add_option("--index", *index_path, "source index (pivots study)");
    cmd->add_option("--ks", *ks, "reverse-k sweep (pivots study)")->delimiter(',');
    add_common(cmd, *opts);
    cmd->callback(guard([=] {
      mparams->workers = opts->workers;
      mparams->seed = opts->seed;
      bparams->seed = opts->seed;
      if (*what == "pivots") {
        if (index_path->empty()) {
          throw UsageError("compare --what pivots requires --index");
        }
        ProximityGraph src = load_index(*index_path);
        auto rows = pivot_variant_study(src, *ks, mparams->k_plus, opts->seed);
        write_pivot_csv(rows, *out,
                        echo({{"index", *index_path},
                              {"k-plus", std::to_string(mparams->k_plus)},
                              {"seed", std::to_string(opts->seed)}}));
        for (const auto& r : rows) {
          std::cout << r.variant << " k=" << r.k << " ratio=" << r.sliding_ratio
                    << "\n";
        }
        return;
      }
      if (parts_dir->empty() || queries_path->empty()) {
        throw UsageError("compare requires --parts-dir and --queries");
      }
      PartitionManifest mf;
      std::vector<VectorSet> parts = load_parts(*parts_dir, mf);
      VectorSet queries = load_fvecs(*queries_path);
      std::uint32_t use_R =
          *R > 0 ? *R
                 : std::max<std::uint32_t>(
                       1, std::min<std::uint32_t>(4, std::uint32_t(parts.size()) - 1));
      std::string config = echo({{"what", *what},
                                 {"parts-dir", *parts_dir},
                                 {"m", std::to_string(parts.size())},
                                 {"R", std::to_string(use_R)},
                                 {"delta", std::to_string(*delta)},
                                 {"ef-construction",
                                  std::to_string(bparams->ef_construction)},
                                 {"ef", std::to_string(mparams->ef_merge)},
                                 {"seed", std::to_string(opts->seed)},
                                 {"workers", std::to_string(opts->workers)}});
      if (*what == "strategies") {
        std::vector<CompareStrategy> list;
        for (const auto& s : *strategies) {
          if (s == "naive") list.push_back(CompareStrategy::naive);
          else if (s == "rnsm") list.push_back(CompareStrategy::rnsm);
          else if (s == "rnsm+mos-random") list.push_back(CompareStrategy::rnsm_mos_random);
          else if (s == "rnsm+mos-centroid") list.push_back(CompareStrategy::rnsm_mos_centroid);
          else if (s == "rebuild") list.push_back(CompareStrategy::rebuild);
          else if (s == "separated") list.push_back(CompareStrategy::separated);
          else throw UsageError("unknown strategy: " + s);
        }
        auto reports = compare_merge_strategies(parts, list, *bparams, *mparams,
                                                queries, *k, *efs, use_R, *delta);
        write_strategy_csv(reports, *out, config);
        for (const auto& rep : reports) {
          std::cout << rep.label << " merge_ndc=" << rep.merge_ndc
                    << " merge_ms=" << rep.merge_wall_ms << "\n";
        }
      } else {
        std::vector<Topology> list;
        for (const auto& t : *topologies) {
          if (t == "path") list.push_back(Topology::path);
          else if (t == "star") list.push_back(Topology::star);
          else if (t == "mst") list.push_back(Topology::mst);
          else if (t == "mos") list.push_back(Topology::mos);
          else if (t == "random-regular") list.push_back(Topology::random_regular);
          else throw UsageError("unknown topology: " + t);
        }
        std::vector<ProximityGraph> indexes;
        for (const auto& p : parts) {
          indexes.push_back(build_index(p, *bparams));
        }
        VectorSet all;
        all.dim = parts.front().dim;
        for (const auto& p : parts) {
          all.data.insert(all.data.end(), p.data.begin(), p.data.end());
          for (std::size_t i = 0; i < p.count(); ++i) {
            all.ids.push_back(p.id_of(i));
          }
        }
        GroundTruth gt = brute_force_knn(all, queries, *k, opts->workers);
        CostMatrix costs = build_cost_matrix(parts, CostKind::centroid_distance);
        auto reports = compare_merge_orders(indexes, costs, list, *mparams, queries,
                                            gt, *efs, *k, use_R, *delta, opts->seed);
        write_topology_csv(reports, *out, config);
        for (const auto& rep : reports) {
          std::cout << rep.label << " edges=" << rep.edge_count
                    << " merge_ndc=" << rep.merge_ndc << "\n";
        }
      }
    }));
  }

  int parse_rc = dispatch(app, argc, argv);
  if (parse_rc != 0) {
    return parse_rc;
  }
  return rc;
}

} // namespace pgmerge
