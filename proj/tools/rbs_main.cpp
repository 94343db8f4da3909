// Command-line front end: graph generation, ball sampling, profiles,
// distances, estimators, training and the experiment harness. Every command
// prints a JSON report on stdout and is byte-reproducible for a fixed seed.
//
// Exit codes: 0 success, 1 usage error, 2 runtime error, 3 a bound check
// asserted by an experiment failed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbs/errors.hpp"
#include "rbs/experiments.hpp"
#include "rbs/rng.hpp"

namespace {

using rbs::Json;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RBS_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 12345;
}

rbs::Graph load_graph(const std::string& path, const std::string& features_path) {
  const auto result = features_path.empty()
                          ? rbs::load_edge_list(path, /*directed=*/false)
                          : rbs::load_edge_list(path, /*directed=*/false, features_path);
  return result.graph;
}

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

struct BoundFailure {};  // raised after printing a failed bound report

int run(int argc, char** argv) {
  CLI::App app{"random neighborhood model toolkit"};
  app.require_subcommand(1);
  std::uint64_t seed = default_seed();
  app.add_option("--seed", seed, "global seed (env RBS_SEED overrides the default)")
      ->capture_default_str();

  // --- gen ---
  auto* gen = app.add_subcommand("gen", "generate a graph and write an edge list");
  std::string gen_kind, gen_out = "graph.el", gen_features_out, gen_grid;
  std::uint32_t gen_n = 100, gen_d = 3, gen_clique = 10;
  double gen_p = 0.1;
  bool gen_bridged = false;
  gen->add_option("kind", gen_kind, "er | config | graphon | two-cliques")->required();
  gen->add_option("--n", gen_n, "vertex count");
  gen->add_option("--p", gen_p, "edge probability (er)");
  gen->add_option("--d", gen_d, "degree (config)");
  gen->add_option("--grid", gen_grid, "graphon grid rows, e.g. \"0.3,0.05;0.05,0.3\"");
  gen->add_option("--N", gen_clique, "clique size (two-cliques)");
  gen->add_flag("--bridged", gen_bridged, "bridge the two cliques");
  gen->add_option("--out", gen_out, "output edge list path")->capture_default_str();
  gen->add_option("--features-out", gen_features_out,
                  "write graphon latent positions as a feature file");

  // --- sample ---
  auto* sample = app.add_subcommand("sample", "dump one sampled ball union as JSON");
  std::string sample_graph;
  std::uint32_t sk = 3, sb = 3, sr = 2;
  std::optional<std::uint32_t> sample_root;
  sample->add_option("--graph", sample_graph, "edge list path")->required();
  sample->add_option("--k", sk, "number of balls");
  sample->add_option("--b", sb, "branching factor");
  sample->add_option("--r", sr, "radius");
  sample->add_option("--root", sample_root, "rooted variant: center ball 0 here");

  // --- profile ---
  auto* profile = app.add_subcommand("profile", "estimate an empirical r-profile");
  std::string profile_graph, profile_out;
  std::uint32_t profile_r = 2;
  std::optional<std::uint32_t> profile_k;
  std::uint64_t profile_samples = 1000;
  profile->add_option("--graph", profile_graph)->required();
  profile->add_option("--r", profile_r, "profile level (k = b = radius = r)");
  profile->add_option("--k", profile_k, "override the number of balls");
  profile->add_option("--samples", profile_samples);
  profile->add_option("--out", profile_out, "also write the profile JSON here");

  // --- distance ---
  auto* distance = app.add_subcommand("distance", "truncated sampling distance");
  std::string dist_a, dist_b;
  std::uint32_t dist_rmax = 3;
  std::uint64_t dist_samples = 5000;
  distance->add_option("--a", dist_a)->required();
  distance->add_option("--b", dist_b)->required();
  distance->add_option("--rmax", dist_rmax);
  distance->add_option("--samples", dist_samples);

  // --- wasserstein ---
  auto* wass = app.add_subcommand("wasserstein", "exact OT between two graph lists");
  std::vector<std::string> wass_a, wass_b;
  std::uint32_t wass_rmax = 2;
  std::uint64_t wass_samples = 500;
  wass->add_option("--a", wass_a, "edge list (repeatable)")->required();
  wass->add_option("--b", wass_b, "edge list (repeatable)")->required();
  wass->add_option("--rmax", wass_rmax);
  wass->add_option("--samples", wass_samples);

  // --- estimate ---
  auto* estimate = app.add_subcommand("estimate", "constant-query estimators");
  std::string est_kind, est_graph;
  std::uint64_t est_trials = 100000;
  std::uint32_t est_redraw_cap = 16;
  std::optional<std::uint64_t> est_budget;
  estimate->add_option("kind", est_kind, "triangle | clustering")->required();
  estimate->add_option("--graph", est_graph)->required();
  estimate->add_option("--trials", est_trials);
  estimate->add_option("--redraw-cap", est_redraw_cap, "clustering neighbor redraws");
  estimate->add_option("--budget", est_budget, "optional oracle query budget");

  // --- train ---
  auto* train_cmd = app.add_subcommand("train", "train an RBS-GNN on the ER task");
  std::string train_out = "model.bin", train_curve;
  std::uint32_t tr_nmin = 50, tr_nmax = 150, tr_count = 500;
  double tr_p0 = 0.05, tr_p1 = 0.15;
  std::uint32_t tr_k = 3, tr_b = 5, tr_r = 2;
  std::uint32_t tr_hidden = 16, tr_layers = 2, tr_epochs = 40, tr_batch = 32;
  double tr_lr = 0.01;
  train_cmd->add_option("--n-min", tr_nmin);
  train_cmd->add_option("--n-max", tr_nmax);
  train_cmd->add_option("--p0", tr_p0);
  train_cmd->add_option("--p1", tr_p1);
  train_cmd->add_option("--train-size", tr_count);
  train_cmd->add_option("--k", tr_k);
  train_cmd->add_option("--b", tr_b);
  train_cmd->add_option("--r", tr_r);
  train_cmd->add_option("--hidden", tr_hidden);
  train_cmd->add_option("--layers", tr_layers);
  train_cmd->add_option("--epochs", tr_epochs);
  train_cmd->add_option("--batch", tr_batch);
  train_cmd->add_option("--lr", tr_lr);
  train_cmd->add_option("--out", train_out, "checkpoint path")->capture_default_str();
  train_cmd->add_option("--curve", train_curve, "write the loss curve JSON here");

  // --- eval ---
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on the ER task");
  std::string eval_model;
  std::uint32_t ev_nmin = 50, ev_nmax = 150, ev_count = 200, ev_votes = 5;
  double ev_p0 = 0.05, ev_p1 = 0.15;
  std::uint32_t ev_k = 3, ev_b = 5, ev_r = 2;
  eval_cmd->add_option("--model", eval_model)->required();
  eval_cmd->add_option("--n-min", ev_nmin);
  eval_cmd->add_option("--n-max", ev_nmax);
  eval_cmd->add_option("--p0", ev_p0);
  eval_cmd->add_option("--p1", ev_p1);
  eval_cmd->add_option("--test-size", ev_count);
  eval_cmd->add_option("--votes", ev_votes);
  eval_cmd->add_option("--k", ev_k);
  eval_cmd->add_option("--b", ev_b);
  eval_cmd->add_option("--r", ev_r);

  // --- perturb ---
  auto* perturb = app.add_subcommand("perturb", "additive perturbation bound check");
  std::string pert_graph;
  rbs::PerturbConfig pert_cfg;
  perturb->add_option("--graph", pert_graph)->required();
  perturb->add_option("--delta", pert_cfg.delta);
  perturb->add_option("--rmax", pert_cfg.r_max);
  perturb->add_option("--samples", pert_cfg.samples);
  perturb->add_option("--seeds", pert_cfg.seeds, "run seeds (repeatable)");

  // --- connectivity-demo ---
  auto* conn = app.add_subcommand("connectivity-demo",
                                  "two-cliques non-estimability gadget");
  rbs::ConnectivityConfig conn_cfg;
  conn->add_option("--sizes", conn_cfg.clique_sizes, "clique sizes");
  conn->add_option("--rmax", conn_cfg.r_max);
  conn->add_option("--samples", conn_cfg.samples);
  conn->add_option("--seeds", conn_cfg.seeds);

  // --- sizegen ---
  auto* sizegen = app.add_subcommand("sizegen", "size-generalization experiment");
  rbs::SizegenConfig sg;
  std::string sg_family = "graphon", sg_target = "global-clustering";
  sizegen->add_option("--family", sg_family, "graphon | config-regular");
  sizegen->add_option("--target", sg_target, "global-clustering | max-degree");
  sizegen->add_option("--small-min", sg.small_min);
  sizegen->add_option("--small-max", sg.small_max);
  sizegen->add_option("--large-min", sg.large_min);
  sizegen->add_option("--large-max", sg.large_max);
  sizegen->add_option("--classes", sg.classes);
  sizegen->add_option("--train-size", sg.train_size);
  sizegen->add_option("--test-size", sg.test_size);
  sizegen->add_option("--k", sg.ball.k);
  sizegen->add_option("--b", sg.ball.b);
  sizegen->add_option("--r", sg.ball.r);
  sizegen->add_option("--epochs", sg.epochs);
  sizegen->add_option("--votes", sg.votes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (gen->parsed()) {
    rbs::Graph g;
    Json extra = Json::object();
    if (gen_kind == "er") {
      g = rbs::gen_er(gen_n, gen_p, seed);
    } else if (gen_kind == "config") {
      std::uint64_t removed = 0;
      g = rbs::gen_config_regular(gen_n, gen_d, seed, &removed);
      extra["pairings_removed"] = removed;
    } else if (gen_kind == "graphon") {
      rbs::GraphonSpec spec;
      std::stringstream rows(gen_grid);
      std::string row;
      while (std::getline(rows, row, ';')) {
        std::vector<double> entries;
        std::stringstream cells(row);
        std::string cell;
        while (std::getline(cells, cell, ',')) entries.push_back(std::stod(cell));
        spec.grid.push_back(entries);
      }
      if (spec.grid.empty()) spec.grid = {{gen_p}};
      g = rbs::gen_graphon(spec, gen_n, seed, !gen_features_out.empty());
      if (!gen_features_out.empty()) {
        std::ofstream f(gen_features_out);
        for (rbs::VertexId v = 0; v < g.vertex_count(); ++v) {
          f << g.feature_row(v)[0] << '\n';
        }
      }
    } else if (gen_kind == "two-cliques") {
      g = rbs::gen_two_cliques(gen_clique, gen_bridged);
    } else {
      throw CLI::ValidationError("gen", "unknown generator kind: " + gen_kind);
    }
    rbs::write_edge_list(g, gen_out);
    Json j{{"schema_version", 1}, {"command", "gen"},       {"kind", gen_kind},
           {"seed", seed},        {"n", g.vertex_count()},  {"edges", g.edge_count()},
           {"out", gen_out}};
    j.update(extra);
    emit(j);
    return 0;
  }

  if (sample->parsed()) {
    const rbs::Graph g = load_graph(sample_graph, "");
    rbs::OracleSession session(g, seed);
    const rbs::BallUnion u =
        sample_root ? rbs::rooted_union_sample(session, *sample_root, sk, sb, sr)
                    : rbs::union_sample(session, sk, sb, sr);
    Json j{{"schema_version", 1}, {"command", "sample"}, {"seed", seed}};
    j["ball_union"] = rbs::ball_union_to_json(u);
    j["queries"] = rbs::query_counts_to_json(session.counts());
    emit(j);
    return 0;
  }

  if (profile->parsed()) {
    const rbs::Graph g = load_graph(profile_graph, "");
    rbs::ProfileOptions opts;
    opts.k_override = profile_k;
    const rbs::Profile p =
        rbs::estimate_profile(g, profile_r, profile_samples, seed, opts);
    Json j{{"schema_version", 1}, {"command", "profile"}, {"seed", seed}};
    j["profile"] = rbs::profile_to_json(p);
    if (!profile_out.empty()) {
      std::ofstream f(profile_out);
      f << j["profile"].dump(2) << '\n';
    }
    emit(j);
    return 0;
  }

  if (distance->parsed()) {
    const rbs::Graph a = load_graph(dist_a, "");
    const rbs::Graph b = load_graph(dist_b, "");
    const rbs::DistanceEstimate d =
        rbs::sampling_distance(a, b, dist_rmax, dist_samples, seed);
    emit(Json{{"schema_version", 1},
              {"command", "distance"},
              {"seed", seed},
              {"eps_mc", rbs::monte_carlo_tolerance(dist_samples)},
              {"distance", rbs::distance_to_json(d)}});
    return 0;
  }

  if (wass->parsed()) {
    std::vector<rbs::Graph> ga, gb;
    for (const auto& path : wass_a) ga.push_back(load_graph(path, ""));
    for (const auto& path : wass_b) gb.push_back(load_graph(path, ""));
    std::vector<std::reference_wrapper<const rbs::Graph>> ra, rb;
    for (const auto& g : ga) ra.emplace_back(g);
    for (const auto& g : gb) rb.emplace_back(g);
    rbs::WassersteinOptions opts;
    opts.r_max = wass_rmax;
    opts.samples = wass_samples;
    const rbs::WassersteinResult w = rbs::wasserstein_distance(ra, rb, seed, opts);
    emit(Json{{"schema_version", 1},
              {"command", "wasserstein"},
              {"seed", seed},
              {"value", w.value},
              {"cost_matrix", w.cost}});
    return 0;
  }

  if (estimate->parsed()) {
    const rbs::Graph g = load_graph(est_graph, "");
    rbs::OracleSession session =
        est_budget ? rbs::OracleSession(g, seed, *est_budget)
                   : rbs::OracleSession(g, seed);
    rbs::EstimateResult r;
    if (est_kind == "triangle") {
      r = rbs::triangle_density(session, est_trials);
    } else if (est_kind == "clustering") {
      r = rbs::local_clustering(session, est_trials, est_redraw_cap);
    } else {
      throw CLI::ValidationError("estimate", "unknown estimator: " + est_kind);
    }
    emit(Json{{"schema_version", 1},
              {"command", "estimate"},
              {"kind", est_kind},
              {"seed", seed},
              {"estimate", r.estimate},
              {"trials", r.trials},
              {"stderr_estimate", r.stderr_estimate},
              {"queries", rbs::query_counts_to_json(r.queries)}});
    return 0;
  }

  if (train_cmd->parsed()) {
    rbs::ErBinaryConfig data_cfg;
    data_cfg.n_min = tr_nmin;
    data_cfg.n_max = tr_nmax;
    data_cfg.p0 = tr_p0;
    data_cfg.p1 = tr_p1;
    data_cfg.count = tr_count;
    std::vector<rbs::Graph> graphs;
    std::vector<std::uint32_t> labels;
    rbs::make_er_binary_dataset(data_cfg, rbs::Rng::derive(seed, 1), graphs, labels);
    const auto samples = rbs::presample_dataset(
        graphs, labels, {tr_k, tr_b, tr_r}, rbs::Rng::derive(seed, 2));
    rbs::FeatureSpec features{rbs::FeatureMode::DegreeBuckets,
                              rbs::default_degree_bucket_bounds()};
    rbs::ModelParams model = rbs::init_model(features, tr_hidden, tr_layers, 2,
                                             false, rbs::Rng::derive(seed, 3));
    rbs::TrainConfig tc;
    tc.learning_rate = tr_lr;
    tc.epochs = tr_epochs;
    tc.batch_size = tr_batch;
    tc.seed = rbs::Rng::derive(seed, 4);
    const rbs::TrainResult result = rbs::train(std::move(model), samples, tc);
    rbs::save_model(result.params, train_out);
    Json curve = result.epoch_losses;
    if (!train_curve.empty()) {
      std::ofstream f(train_curve);
      f << curve.dump(2) << '\n';
    }
    emit(Json{{"schema_version", 1},
              {"command", "train"},
              {"seed", seed},
              {"train_size", tr_count},
              {"epochs", tr_epochs},
              {"final_loss", result.epoch_losses.back()},
              {"loss_curve", curve},
              {"model", train_out}});
    return 0;
  }

  if (eval_cmd->parsed()) {
    const rbs::ModelParams model = rbs::load_model(eval_model);
    rbs::ErBinaryConfig data_cfg;
    data_cfg.n_min = ev_nmin;
    data_cfg.n_max = ev_nmax;
    data_cfg.p0 = ev_p0;
    data_cfg.p1 = ev_p1;
    data_cfg.count = ev_count;
    std::vector<rbs::Graph> graphs;
    std::vector<std::uint32_t> labels;
    rbs::make_er_binary_dataset(data_cfg, rbs::Rng::derive(seed, 11), graphs, labels);
    std::vector<std::reference_wrapper<const rbs::Graph>> refs;
    for (const auto& g : graphs) refs.emplace_back(g);
    const rbs::EvalReport report = rbs::evaluate(
        model, refs, labels, {ev_k, ev_b, ev_r}, rbs::Rng::derive(seed, 12), ev_votes);
    emit(Json{{"schema_version", 1},
              {"command", "eval"},
              {"seed", seed},
              {"test_size", ev_count},
              {"votes", ev_votes},
              {"accuracy", report.accuracy},
              {"confusion", report.confusion},
              {"queries_per_graph",
               report.per_graph_queries.empty() ? 0 : report.per_graph_queries.front()},
              {"queries", rbs::query_counts_to_json(report.total_queries)}});
    return 0;
  }

  if (perturb->parsed()) {
    const rbs::Graph g = load_graph(pert_graph, "");
    for (auto& s : pert_cfg.seeds) s = rbs::Rng::derive(seed, s);
    const Json report = rbs::run_perturb(g, pert_cfg);
    emit(report);
    if (!report["pass"].get<bool>()) throw BoundFailure{};
    return 0;
  }

  if (conn->parsed()) {
    for (auto& s : conn_cfg.seeds) s = rbs::Rng::derive(seed, s);
    const Json report = rbs::run_connectivity_demo(conn_cfg);
    emit(report);
    if (!report["pass"].get<bool>()) throw BoundFailure{};
    return 0;
  }

  if (sizegen->parsed()) {
    sg.family = sg_family == "config-regular" ? rbs::SizegenConfig::Family::ConfigRegular
                                              : rbs::SizegenConfig::Family::Graphon;
    sg.target = sg_target == "max-degree" ? rbs::SizegenConfig::Target::MaxDegree
                                          : rbs::SizegenConfig::Target::GlobalClustering;
    sg.seed = seed;
    emit(rbs::run_sizegen(sg));
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const BoundFailure&) {
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
