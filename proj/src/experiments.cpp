#include "rbs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rbs/errors.hpp"
#include "rbs/rng.hpp"

namespace rbs {

Json query_counts_to_json(const QueryCounts& q) {
  return Json{{"sample_vertex", q.sample_vertex},
              {"sample_neighbor", q.sample_neighbor},
              {"is_adjacent", q.is_adjacent},
              {"total", q.total()}};
}

Json distance_to_json(const DistanceEstimate& d) {
  Json levels = Json::array();
  for (std::size_t i = 0; i < d.per_level_tv.size(); ++i) {
    levels.push_back(Json{{"level", i + 1}, {"tv", d.per_level_tv[i]}});
  }
  return Json{{"value", d.value},
              {"r_max", d.r_max},
              {"per_level_tv", levels},
              {"tail_bound", d.tail_bound},
              {"samples_per_level", d.samples_per_level}};
}

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw ParseError("odd hex string length");
  auto nibble = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw ParseError("invalid hex digit");
  };
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return out;
}

Json profile_to_json(const Profile& p) {
  std::vector<const CanonicalCode*> codes;
  codes.reserve(p.histogram.size());
  for (const auto& [code, count] : p.histogram) codes.push_back(&code);
  std::sort(codes.begin(), codes.end(),
            [](const CanonicalCode* a, const CanonicalCode* b) { return *a < *b; });
  Json entries = Json::array();
  for (const CanonicalCode* code : codes) {
    entries.push_back(Json{{"certificate", to_hex(code->certificate)},
                           {"count", p.histogram.at(*code)}});
  }
  return Json{{"schema_version", 1},
              {"kind", "profile"},
              {"level", p.level},
              {"k", p.params.k},
              {"b", p.params.b},
              {"radius", p.params.radius},
              {"feature_step_micro", p.params.feature_step_micro},
              {"root_mode", p.params.root_mode == RootMode::Ordered ? "ordered" : "unrooted"},
              {"samples", p.samples},
              {"classes", p.class_count()},
              {"entries", entries}};
}

Profile profile_from_json(const Json& j) {
  if (j.value("kind", "") != "profile" || j.value("schema_version", 0) != 1) {
    throw ParseError("not a version-1 profile document");
  }
  Profile p;
  p.level = j.at("level").get<std::uint32_t>();
  p.params.k = j.at("k").get<std::uint32_t>();
  p.params.b = j.at("b").get<std::uint32_t>();
  p.params.radius = j.at("radius").get<std::uint32_t>();
  p.params.feature_step_micro = j.at("feature_step_micro").get<std::uint32_t>();
  p.params.root_mode = j.at("root_mode").get<std::string>() == "ordered"
                           ? RootMode::Ordered
                           : RootMode::Unrooted;
  p.samples = j.at("samples").get<std::uint64_t>();
  for (const auto& entry : j.at("entries")) {
    CanonicalCode code;
    code.certificate = from_hex(entry.at("certificate").get<std::string>());
    code.digest = hash128(code.certificate.data(), code.certificate.size());
    p.histogram[code] = entry.at("count").get<std::uint64_t>();
  }
  return p;
}

Json ball_union_to_json(const BallUnion& u) {
  Json edges = Json::array();
  const std::uint32_t m = u.size();
  for (std::uint32_t i = 0; i < m; ++i) {
    for (std::uint32_t j = 0; j < m; ++j) {
      if (u.edge(i, j)) edges.push_back(Json::array({i, j}));
    }
  }
  Json layers = Json::array();
  for (const auto& ball : u.layers) {
    Json levels = Json::array();
    for (const auto& level : ball) levels.push_back(level);
    layers.push_back(levels);
  }
  Json j{{"size", m},
         {"roots", u.roots},
         {"original_ids", u.vertices},
         {"local_edges", edges},
         {"layers", layers},
         {"params", Json{{"k", u.params.k}, {"b", u.params.b}, {"r", u.params.r}}}};
  if (u.designated_root) j["designated_root"] = *u.designated_root;
  return j;
}

Json run_perturb(const Graph& g, const PerturbConfig& cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw std::invalid_argument("perturb: delta must lie in (0,1)");
  }
  const std::uint64_t extra = static_cast<std::uint64_t>(
      cfg.delta * static_cast<double>(g.vertex_count()));
  const double eps_mc = monte_carlo_tolerance(cfg.samples);

  double total_bound = 1.0;
  for (std::uint32_t s = 1; s <= 8; ++s) {
    total_bound = std::min(total_bound, std::pow(static_cast<double>(s), s) * cfg.delta +
                                            std::ldexp(1.0, -static_cast<int>(s)));
  }

  bool all_pass = true;
  Json runs = Json::array();
  for (std::uint64_t seed : cfg.seeds) {
    const Graph perturbed = add_random_edges(g, extra, Rng::derive(seed, 0xED6E5));
    const DistanceEstimate d = sampling_distance(g, perturbed, cfg.r_max, cfg.samples,
                                                 Rng::derive(seed, 0xD157));
    Json levels = Json::array();
    bool run_pass = true;
    for (std::uint32_t r = 1; r <= cfg.r_max; ++r) {
      const double bound =
          2.0 * std::pow(static_cast<double>(r), r) * cfg.delta + eps_mc;
      const double tv = d.per_level_tv[r - 1];
      const bool ok = tv <= bound;
      run_pass = run_pass && ok;
      levels.push_back(Json{{"level", r},
                            {"tv", tv},
                            {"bound", bound},
                            {"pass", ok}});
    }
    all_pass = all_pass && run_pass;
    runs.push_back(Json{{"seed", seed},
                        {"distance", distance_to_json(d)},
                        {"per_level_checks", levels},
                        {"total_bound", total_bound + eps_mc},
                        {"pass", run_pass}});
  }
  return Json{{"schema_version", 1},
              {"experiment", "perturb"},
              {"n", g.vertex_count()},
              {"delta", cfg.delta},
              {"edges_added", extra},
              {"samples", cfg.samples},
              {"r_max", cfg.r_max},
              {"eps_mc", eps_mc},
              {"runs", runs},
              {"pass", all_pass}};
}

Json run_connectivity_demo(const ConnectivityConfig& cfg) {
  Json points = Json::array();
  std::vector<double> mean_distance;
  for (std::uint32_t n : cfg.clique_sizes) {
    double sum = 0.0;
    Json per_seed = Json::array();
    int gap = 0;
    for (std::uint64_t seed : cfg.seeds) {
      const ConnectivityDemoPoint point =
          connectivity_demo(n, cfg.r_max, cfg.samples, Rng::derive(seed, n));
      gap = point.connectivity_bridged - point.connectivity_unbridged;
      sum += point.distance.value;
      per_seed.push_back(Json{{"seed", seed},
                              {"distance", distance_to_json(point.distance)}});
    }
    const double mean = sum / static_cast<double>(cfg.seeds.size());
    mean_distance.push_back(mean);
    points.push_back(Json{{"clique_size", n},
                          {"connectivity_gap", gap},
                          {"mean_distance", mean},
                          {"runs", per_seed}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < mean_distance.size(); ++i) {
    decreasing = decreasing && mean_distance[i] < mean_distance[i - 1];
  }
  return Json{{"schema_version", 1},
              {"experiment", "connectivity_demo"},
              {"r_max", cfg.r_max},
              {"samples", cfg.samples},
              {"seeds", cfg.seeds},
              {"points", points},
              {"strictly_decreasing", decreasing},
              {"pass", decreasing}};
}

void make_er_binary_dataset(const ErBinaryConfig& cfg, std::uint64_t seed,
                            std::vector<Graph>& graphs,
                            std::vector<std::uint32_t>& labels) {
  graphs.clear();
  labels.clear();
  Rng rng(Rng::derive(seed, 0xE2));
  for (std::uint32_t i = 0; i < cfg.count; ++i) {
    const std::uint32_t label = i % 2;
    const std::uint32_t n =
        cfg.n_min + static_cast<std::uint32_t>(rng.below(cfg.n_max - cfg.n_min + 1));
    graphs.push_back(gen_er(n, label == 0 ? cfg.p0 : cfg.p1, rng.next_u64()));
    labels.push_back(label);
  }
}

std::vector<LabeledSample> presample_dataset(const std::vector<Graph>& graphs,
                                             const std::vector<std::uint32_t>& labels,
                                             BallParams ball, std::uint64_t seed,
                                             std::uint32_t per_graph) {
  std::vector<LabeledSample> samples;
  samples.reserve(graphs.size() * per_graph);
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    for (std::uint32_t rep = 0; rep < per_graph; ++rep) {
      OracleSession session(graphs[i], Rng::derive(seed, i, rep));
      LabeledSample s;
      s.ball_union = union_sample(session, ball.k, ball.b, ball.r);
      s.components = weakly_connected_components(s.ball_union);
      s.label = labels[i];
      s.target = static_cast<double>(labels[i]);
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

std::vector<std::uint32_t> default_degree_bucket_bounds() {
  return {0, 1, 2, 3, 4, 5, 7, 9, 12, 16, 21, 27, 34};
}

namespace {

Graph sizegen_graph(SizegenConfig::Family family, std::uint32_t n, Rng& rng) {
  if (family == SizegenConfig::Family::Graphon) {
    const double p_in = rng.uniform(0.15, 0.60);
    const double p_out = rng.uniform(0.05, 0.6 * p_in);
    GraphonSpec spec{{{p_in, p_out}, {p_out, p_in}}};
    return gen_graphon(spec, n, rng.next_u64());
  }
  const std::uint32_t d = 3 + static_cast<std::uint32_t>(rng.below(6));
  const std::uint32_t nn = (static_cast<std::uint64_t>(n) * d) % 2 == 0 ? n : n + 1;
  return gen_config_regular(nn, d, rng.next_u64());
}

double sizegen_target(SizegenConfig::Target target, const Graph& g) {
  return target == SizegenConfig::Target::GlobalClustering
             ? exact_global_clustering(g)
             : static_cast<double>(exact_max_degree(g));
}

std::vector<std::uint32_t> quantile_labels(const std::vector<double>& values,
                                           std::uint32_t classes,
                                           std::vector<double>& edges) {
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  edges.clear();
  for (std::uint32_t j = 1; j < classes; ++j) {
    edges.push_back(sorted[(static_cast<std::size_t>(j) * sorted.size()) / classes]);
  }
  std::vector<std::uint32_t> labels;
  labels.reserve(values.size());
  for (double v : values) {
    std::uint32_t label = 0;
    for (double e : edges) {
      if (v >= e) ++label;
    }
    labels.push_back(label);
  }
  return labels;
}

}  // namespace

Json run_sizegen(const SizegenConfig& cfg) {
  if (cfg.small_min > cfg.small_max || cfg.large_min > cfg.large_max) {
    throw std::invalid_argument("sizegen: malformed size ranges");
  }
  const bool identical = cfg.small_min == cfg.large_min && cfg.small_max == cfg.large_max;
  if (!identical && cfg.small_max >= cfg.large_min) {
    throw std::invalid_argument("sizegen: size ranges must be disjoint (small below large)");
  }
  if (cfg.classes < 2) throw std::invalid_argument("sizegen: need at least 2 classes");

  // Generate both splits.
  std::vector<Graph> train_graphs, test_graphs;
  std::vector<double> train_stat, test_stat;
  for (std::uint32_t i = 0; i < cfg.train_size; ++i) {
    Rng rng(Rng::derive(cfg.seed, 0, i));
    const std::uint32_t n =
        cfg.small_min + static_cast<std::uint32_t>(rng.below(cfg.small_max - cfg.small_min + 1));
    train_graphs.push_back(sizegen_graph(cfg.family, n, rng));
    train_stat.push_back(sizegen_target(cfg.target, train_graphs.back()));
  }
  for (std::uint32_t i = 0; i < cfg.test_size; ++i) {
    Rng rng(Rng::derive(cfg.seed, 1, i));
    const std::uint32_t n =
        cfg.large_min + static_cast<std::uint32_t>(rng.below(cfg.large_max - cfg.large_min + 1));
    test_graphs.push_back(sizegen_graph(cfg.family, n, rng));
    test_stat.push_back(sizegen_target(cfg.target, test_graphs.back()));
  }

  // Pooled quantile bins so both splits share boundaries.
  std::vector<double> pooled = train_stat;
  pooled.insert(pooled.end(), test_stat.begin(), test_stat.end());
  std::vector<double> edges;
  const std::vector<std::uint32_t> pooled_labels =
      quantile_labels(pooled, cfg.classes, edges);
  std::vector<std::uint32_t> train_labels(pooled_labels.begin(),
                                          pooled_labels.begin() + cfg.train_size);
  std::vector<std::uint32_t> test_labels(pooled_labels.begin() + cfg.train_size,
                                         pooled_labels.end());
  for (const auto* labels : {&train_labels, &test_labels}) {
    const auto [lo, hi] = std::minmax_element(labels->begin(), labels->end());
    if (*lo == *hi) {
      throw std::runtime_error(
          "sizegen: degenerate label distribution (all samples in class " +
          std::to_string(*lo) + ")");
    }
  }

  // Train/validation split over the small graphs.
  std::vector<std::size_t> order(train_graphs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(Rng::derive(cfg.seed, 3));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[shuffle_rng.below(i)]);
  }
  const std::size_t val_count =
      std::max<std::size_t>(1, static_cast<std::size_t>(cfg.val_fraction *
                                                        static_cast<double>(order.size())));
  std::vector<Graph> fit_graphs, val_graphs;
  std::vector<std::uint32_t> fit_labels, val_labels;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < val_count) {
      val_graphs.push_back(train_graphs[order[i]]);
      val_labels.push_back(train_labels[order[i]]);
    } else {
      fit_graphs.push_back(train_graphs[order[i]]);
      fit_labels.push_back(train_labels[order[i]]);
    }
  }

  const auto samples =
      presample_dataset(fit_graphs, fit_labels, cfg.ball, Rng::derive(cfg.seed, 4),
                        cfg.presample_per_graph);

  FeatureSpec features{FeatureMode::DegreeBuckets, default_degree_bucket_bounds()};
  ModelParams model = init_model(features, cfg.hidden, cfg.prop_layers, cfg.classes,
                                 /*rooted=*/false, Rng::derive(cfg.seed, 5));
  TrainConfig tc;
  tc.learning_rate = cfg.learning_rate;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.seed = Rng::derive(cfg.seed, 6);
  const TrainResult trained = train(std::move(model), samples, tc);

  auto refs = [](const std::vector<Graph>& graphs) {
    std::vector<std::reference_wrapper<const Graph>> r;
    r.reserve(graphs.size());
    for (const Graph& g : graphs) r.emplace_back(g);
    return r;
  };
  const EvalReport val_report = evaluate(trained.params, refs(val_graphs), val_labels,
                                         cfg.ball, Rng::derive(cfg.seed, 7), cfg.votes);
  const EvalReport test_report = evaluate(trained.params, refs(test_graphs), test_labels,
                                          cfg.ball, Rng::derive(cfg.seed, 8), cfg.votes);

  // Wasserstein distance between the two graph samples (capped support).
  const std::uint32_t support = std::min<std::uint32_t>(
      cfg.wasserstein_support,
      static_cast<std::uint32_t>(std::min(train_graphs.size(), test_graphs.size())));
  std::vector<std::reference_wrapper<const Graph>> wa, wb;
  for (std::uint32_t i = 0; i < support; ++i) {
    wa.emplace_back(train_graphs[i]);
    wb.emplace_back(test_graphs[i]);
  }
  WassersteinOptions wopts;
  wopts.r_max = cfg.wasserstein_rmax;
  wopts.samples = cfg.wasserstein_samples;
  const WassersteinResult w = wasserstein_distance(wa, wb, Rng::derive(cfg.seed, 9), wopts);

  auto label_histogram = [&](const std::vector<std::uint32_t>& labels) {
    std::vector<std::uint64_t> h(cfg.classes, 0);
    for (std::uint32_t l : labels) ++h[l];
    return h;
  };

  return Json{
      {"schema_version", 1},
      {"experiment", "sizegen"},
      {"family", cfg.family == SizegenConfig::Family::Graphon ? "graphon" : "config-regular"},
      {"target", cfg.target == SizegenConfig::Target::GlobalClustering ? "global-clustering"
                                                                       : "max-degree"},
      {"small_range", Json::array({cfg.small_min, cfg.small_max})},
      {"large_range", Json::array({cfg.large_min, cfg.large_max})},
      {"classes", cfg.classes},
      {"train_size", cfg.train_size},
      {"test_size", cfg.test_size},
      {"ball", Json{{"k", cfg.ball.k}, {"b", cfg.ball.b}, {"r", cfg.ball.r}}},
      {"votes", cfg.votes},
      {"seed", cfg.seed},
      {"label_edges", edges},
      {"train_label_histogram", label_histogram(train_labels)},
      {"test_label_histogram", label_histogram(test_labels)},
      {"final_train_loss", trained.epoch_losses.back()},
      {"validation_accuracy", val_report.accuracy},
      {"test_accuracy", test_report.accuracy},
      {"test_confusion", test_report.confusion},
      {"test_queries_per_graph",
       test_report.per_graph_queries.empty() ? 0 : test_report.per_graph_queries.front()},
      {"wasserstein_train_test",
       Json{{"value", w.value},
            {"support", support},
            {"samples", cfg.wasserstein_samples},
            {"r_max", cfg.wasserstein_rmax}}},
  };
}

}  // namespace rbs
