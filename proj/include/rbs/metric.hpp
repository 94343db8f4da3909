#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rbs/canonical.hpp"
#include "rbs/graph.hpp"

namespace rbs {

struct ProfileParams {
  std::uint32_t k = 1;
  std::uint32_t b = 1;
  std::uint32_t radius = 1;
  std::uint32_t feature_step_micro = 100000;  // 0.1
  RootMode root_mode = RootMode::Ordered;

  bool operator==(const ProfileParams&) const = default;
};

// Empirical r-profile: histogram of canonical codes of M independent ball
// unions with k = b = radius = r (k may be overridden).
struct Profile {
  std::uint32_t level = 1;
  ProfileParams params;
  std::uint64_t samples = 0;
  std::unordered_map<CanonicalCode, std::uint64_t, CodeHash> histogram;

  std::size_t class_count() const { return histogram.size(); }
};

struct ProfileOptions {
  std::optional<std::uint32_t> k_override;
  double feature_step = 0.1;
  std::uint32_t canon_size_cap = 256;
  std::uint64_t canon_search_budget = 1u << 20;
  // Worker threads for the Monte Carlo loop; 0 = hardware concurrency.
  // The histogram merge is associative, so any thread count gives the
  // same result for a fixed seed.
  std::uint32_t threads = 1;
};

// Draw i uses the oracle-session seed Rng::derive(seed, i).
Profile estimate_profile(const Graph& g, std::uint32_t level, std::uint64_t samples,
                         std::uint64_t seed, const ProfileOptions& opts = {});

// Plug-in total variation distance between empirical frequencies. Requires
// matching level and params.
double tv_distance(const Profile& p, const Profile& q);

// Truncated sampling distance: sum_{r=1..r_max} 2^-r * TV(z_r(G), z_r(H)).
struct DistanceEstimate {
  double value = 0.0;
  std::uint32_t r_max = 0;
  std::vector<double> per_level_tv;  // [0] <-> level 1
  double tail_bound = 0.0;           // 2^-r_max
  std::uint64_t samples_per_level = 0;
};

// Level r profiles use session seeds derived from (seed, r, side) with side
// 0 for g and 1 for h, so enlarging r_max keeps lower levels identical.
DistanceEstimate sampling_distance(const Graph& g, const Graph& h,
                                   std::uint32_t r_max, std::uint64_t samples,
                                   std::uint64_t seed,
                                   const ProfileOptions& opts = {});

// Stated Monte Carlo tolerance for empirical distances: c / sqrt(M). The
// plug-in TV estimator is biased upward by O(sqrt(#classes / M)); the
// coefficient absorbs that at the class counts arising in the experiments.
inline constexpr double kMonteCarloCoeff = 4.0;
double monte_carlo_tolerance(std::uint64_t samples);

struct WassersteinOptions {
  std::uint32_t support_cap = 64;
  std::uint32_t r_max = 3;
  std::uint64_t samples = 1000;
  ProfileOptions profile;
};

struct WassersteinResult {
  double value = 0.0;
  std::vector<std::vector<double>> cost;  // |a| x |b| sampling distances
};

// Exact optimal transport between the uniform measures on two finite graph
// lists, with pairwise empirical sampling distances as ground cost. Pair
// (i, j) uses seed Rng::derive(seed, i, j).
WassersteinResult wasserstein_distance(
    const std::vector<std::reference_wrapper<const Graph>>& a,
    const std::vector<std::reference_wrapper<const Graph>>& b,
    std::uint64_t seed, const WassersteinOptions& opts = {});

// Exact min-cost assignment of two uniform discrete measures given a cost
// matrix (successive-shortest-path min-cost flow on the scaled instance).
double uniform_transport_cost(const std::vector<std::vector<double>>& cost);

}  // namespace rbs
