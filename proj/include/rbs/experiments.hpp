#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbs/estimators.hpp"
#include "rbs/graph.hpp"
#include "rbs/metric.hpp"
#include "rbs/rbsgnn.hpp"

namespace rbs {

using Json = nlohmann::ordered_json;

Json query_counts_to_json(const QueryCounts& q);
Json distance_to_json(const DistanceEstimate& d);

// Versioned JSON form of an empirical profile (full certificates in hex, so
// profiles reload losslessly across machines).
Json profile_to_json(const Profile& p);
Profile profile_from_json(const Json& j);

// Ball-union dump for the CLI `sample` subcommand.
Json ball_union_to_json(const BallUnion& u);

// --- additive perturbation experiment ---

struct PerturbConfig {
  double delta = 0.01;
  std::uint32_t r_max = 3;
  std::uint64_t samples = 5000;
  std::vector<std::uint64_t> seeds{1, 2};
};

// Adds floor(delta*n) random new edges and checks the per-level bound
// 2 * r^r * delta (plus the Monte Carlo tolerance) at every level.
Json run_perturb(const Graph& g, const PerturbConfig& cfg);

// --- connectivity non-estimability demo ---

struct ConnectivityConfig {
  std::vector<std::uint32_t> clique_sizes{20, 80, 320};
  std::uint32_t r_max = 3;
  std::uint64_t samples = 5000;
  std::vector<std::uint64_t> seeds{1, 2, 3};
};

Json run_connectivity_demo(const ConnectivityConfig& cfg);

// --- binary ER separation task (train/eval plumbing) ---

struct ErBinaryConfig {
  std::uint32_t n_min = 50, n_max = 150;
  double p0 = 0.05, p1 = 0.15;
  std::uint32_t count = 500;  // total graphs, classes alternating
};

void make_er_binary_dataset(const ErBinaryConfig& cfg, std::uint64_t seed,
                            std::vector<Graph>& graphs,
                            std::vector<std::uint32_t>& labels);

// Pre-samples `per_graph` ball unions per graph into labeled samples.
std::vector<LabeledSample> presample_dataset(const std::vector<Graph>& graphs,
                                             const std::vector<std::uint32_t>& labels,
                                             BallParams ball, std::uint64_t seed,
                                             std::uint32_t per_graph = 1);

std::vector<std::uint32_t> default_degree_bucket_bounds();

// --- size generalization experiment ---

struct SizegenConfig {
  enum class Family : std::uint8_t { Graphon = 0, ConfigRegular = 1 };
  enum class Target : std::uint8_t { GlobalClustering = 0, MaxDegree = 1 };

  Family family = Family::Graphon;
  Target target = Target::GlobalClustering;
  std::uint32_t small_min = 30, small_max = 60;
  std::uint32_t large_min = 300, large_max = 600;
  std::uint32_t classes = 5;
  std::uint32_t train_size = 200, test_size = 200;
  BallParams ball{3, 3, 2};
  std::uint32_t hidden = 16, prop_layers = 2;
  std::uint32_t epochs = 60, batch_size = 16;
  double learning_rate = 0.01;
  std::uint32_t votes = 7;
  std::uint32_t presample_per_graph = 2;
  double val_fraction = 0.2;
  std::uint32_t wasserstein_support = 6;
  std::uint64_t wasserstein_samples = 300;
  std::uint32_t wasserstein_rmax = 2;
  std::uint64_t seed = 0;
};

// Trains on small graphs, tests on large ones; labels are pooled-quantile
// classes of the exact target statistic, shared across both splits. Reports
// the empirical Wasserstein distance between the two graph samples.
Json run_sizegen(const SizegenConfig& cfg);

std::string to_hex(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> from_hex(const std::string& hex);

}  // namespace rbs
