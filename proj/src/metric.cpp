#include "rbs/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <thread>

#include "rbs/errors.hpp"
#include "rbs/oracle.hpp"
#include "rbs/rng.hpp"

namespace rbs {

namespace {

ProfileParams make_params(std::uint32_t level, const ProfileOptions& opts) {
  ProfileParams p;
  p.k = opts.k_override.value_or(level);
  p.b = level;
  p.radius = level;
  p.feature_step_micro =
      static_cast<std::uint32_t>(std::llround(opts.feature_step * 1e6));
  p.root_mode = RootMode::Ordered;
  return p;
}

using Histogram = std::unordered_map<CanonicalCode, std::uint64_t, CodeHash>;

Histogram profile_chunk(const Graph& g, const ProfileParams& params,
                        std::uint64_t begin, std::uint64_t end, std::uint64_t seed,
                        const CanonOptions& canon) {
  Histogram hist;
  for (std::uint64_t i = begin; i < end; ++i) {
    OracleSession session(g, Rng::derive(seed, i));
    const BallUnion u = union_sample(session, params.k, params.b, params.radius);
    try {
      ++hist[canonicalize(u, canon)];
    } catch (const CanonSearchBudgetError& e) {
      throw CanonSearchBudgetError(std::string(e.what()) + " (draw " +
                                   std::to_string(i) + ", session seed " +
                                   std::to_string(Rng::derive(seed, i)) + ")");
    }
  }
  return hist;
}

}  // namespace

Profile estimate_profile(const Graph& g, std::uint32_t level, std::uint64_t samples,
                         std::uint64_t seed, const ProfileOptions& opts) {
  if (level < 1) throw std::invalid_argument("profile level must be >= 1");
  if (samples < 1) throw std::invalid_argument("profile needs at least one sample");

  Profile profile;
  profile.level = level;
  profile.params = make_params(level, opts);
  profile.samples = samples;

  CanonOptions canon;
  canon.root_mode = RootMode::Ordered;
  canon.feature_step = opts.feature_step;
  canon.size_cap = opts.canon_size_cap;
  canon.search_budget = opts.canon_search_budget;

  std::uint32_t threads = opts.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<std::uint32_t>(
      std::min<std::uint64_t>(threads, samples));

  if (threads <= 1) {
    profile.histogram = profile_chunk(g, profile.params, 0, samples, seed, canon);
    return profile;
  }

  std::vector<Histogram> partial(threads);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (samples + threads - 1) / threads;
  for (std::uint32_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      const std::uint64_t begin = t * chunk;
      const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, samples);
      try {
        if (begin < end) {
          partial[t] = profile_chunk(g, profile.params, begin, end, seed, canon);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  for (auto& part : partial) {
    for (auto& [code, count] : part) profile.histogram[code] += count;
  }
  return profile;
}

double tv_distance(const Profile& p, const Profile& q) {
  if (p.level != q.level || !(p.params == q.params)) {
    throw std::invalid_argument("tv_distance: profile parameters differ");
  }
  const double mp = static_cast<double>(p.samples);
  const double mq = static_cast<double>(q.samples);
  double sum = 0.0;
  for (const auto& [code, count] : p.histogram) {
    const auto it = q.histogram.find(code);
    const double fq = it == q.histogram.end()
                          ? 0.0
                          : static_cast<double>(it->second) / mq;
    sum += std::abs(static_cast<double>(count) / mp - fq);
  }
  for (const auto& [code, count] : q.histogram) {
    if (!p.histogram.contains(code)) {
      sum += static_cast<double>(count) / mq;
    }
  }
  return 0.5 * sum;
}

DistanceEstimate sampling_distance(const Graph& g, const Graph& h,
                                   std::uint32_t r_max, std::uint64_t samples,
                                   std::uint64_t seed, const ProfileOptions& opts) {
  if (r_max < 1) throw std::invalid_argument("sampling_distance: r_max must be >= 1");
  DistanceEstimate est;
  est.r_max = r_max;
  est.samples_per_level = samples;
  est.tail_bound = std::ldexp(1.0, -static_cast<int>(r_max));
  for (std::uint32_t r = 1; r <= r_max; ++r) {
    const Profile pg = estimate_profile(g, r, samples, Rng::derive(seed, r, 0), opts);
    const Profile ph = estimate_profile(h, r, samples, Rng::derive(seed, r, 1), opts);
    const double tv = tv_distance(pg, ph);
    est.per_level_tv.push_back(tv);
    est.value += std::ldexp(tv, -static_cast<int>(r));
  }
  return est;
}

double monte_carlo_tolerance(std::uint64_t samples) {
  return kMonteCarloCoeff / std::sqrt(static_cast<double>(samples));
}

namespace {

// Successive shortest paths with Dijkstra potentials; exact for our small
// bipartite instances (all costs non-negative).
class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes) : head_(nodes, -1) {}

  void add_edge(int from, int to, std::int64_t cap, double cost) {
    edges_.push_back({to, head_[from], cap, cost});
    head_[from] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({from, head_[to], 0, -cost});
    head_[to] = static_cast<int>(edges_.size()) - 1;
  }

  double run(int s, int t, std::int64_t flow_target) {
    const int n = static_cast<int>(head_.size());
    std::vector<double> potential(n, 0.0);
    double total_cost = 0.0;
    std::int64_t shipped = 0;
    while (shipped < flow_target) {
      std::vector<double> dist(n, std::numeric_limits<double>::infinity());
      std::vector<int> prev_edge(n, -1);
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      dist[s] = 0.0;
      pq.emplace(0.0, s);
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u] + 1e-12) continue;
        for (int e = head_[u]; e != -1; e = edges_[e].next) {
          if (edges_[e].cap <= 0) continue;
          const int v = edges_[e].to;
          const double nd = d + edges_[e].cost + potential[u] - potential[v];
          if (nd < dist[v] - 1e-15) {
            dist[v] = nd;
            prev_edge[v] = e;
            pq.emplace(nd, v);
          }
        }
      }
      if (prev_edge[t] == -1) {
        throw std::logic_error("transport network disconnected");
      }
      for (int v = 0; v < n; ++v) {
        if (dist[v] < std::numeric_limits<double>::infinity()) {
          potential[v] += dist[v];
        }
      }
      std::int64_t push = flow_target - shipped;
      for (int v = t; v != s;) {
        const auto& e = edges_[prev_edge[v]];
        push = std::min(push, e.cap);
        v = edges_[prev_edge[v] ^ 1].to;
      }
      for (int v = t; v != s;) {
        auto& e = edges_[prev_edge[v]];
        e.cap -= push;
        edges_[prev_edge[v] ^ 1].cap += push;
        total_cost += e.cost * static_cast<double>(push);
        v = edges_[prev_edge[v] ^ 1].to;
      }
      shipped += push;
    }
    return total_cost;
  }

 private:
  struct Edge {
    int to;
    int next;
    std::int64_t cap;
    double cost;
  };
  std::vector<int> head_;
  std::vector<Edge> edges_;
};

}  // namespace

double uniform_transport_cost(const std::vector<std::vector<double>>& cost) {
  const std::int64_t na = static_cast<std::int64_t>(cost.size());
  if (na == 0) throw std::invalid_argument("empty cost matrix");
  const std::int64_t nb = static_cast<std::int64_t>(cost[0].size());
  const std::int64_t scale = std::lcm(na, nb);

  const int source = 0;
  const int sink = static_cast<int>(na + nb + 1);
  MinCostFlow flow(static_cast<int>(na + nb + 2));
  for (std::int64_t i = 0; i < na; ++i) {
    flow.add_edge(source, static_cast<int>(1 + i), scale / na, 0.0);
  }
  for (std::int64_t j = 0; j < nb; ++j) {
    flow.add_edge(static_cast<int>(1 + na + j), sink, scale / nb, 0.0);
  }
  for (std::int64_t i = 0; i < na; ++i) {
    if (static_cast<std::int64_t>(cost[i].size()) != nb) {
      throw std::invalid_argument("ragged cost matrix");
    }
    for (std::int64_t j = 0; j < nb; ++j) {
      if (!(cost[i][j] >= 0.0)) {
        throw std::invalid_argument("transport costs must be non-negative");
      }
      flow.add_edge(static_cast<int>(1 + i), static_cast<int>(1 + na + j),
                    scale, cost[i][j]);
    }
  }
  return flow.run(source, sink, scale) / static_cast<double>(scale);
}

WassersteinResult wasserstein_distance(
    const std::vector<std::reference_wrapper<const Graph>>& a,
    const std::vector<std::reference_wrapper<const Graph>>& b,
    std::uint64_t seed, const WassersteinOptions& opts) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("wasserstein: empty graph list");
  }
  if (a.size() > opts.support_cap || b.size() > opts.support_cap) {
    throw TooLargeError("wasserstein: support exceeds cap of " +
                        std::to_string(opts.support_cap));
  }
  WassersteinResult result;
  result.cost.assign(a.size(), std::vector<double>(b.size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      result.cost[i][j] = sampling_distance(a[i], b[j], opts.r_max, opts.samples,
                                            Rng::derive(seed, i, j), opts.profile)
                              .value;
    }
  }
  result.value = uniform_transport_cost(result.cost);
  return result;
}

}  // namespace rbs
