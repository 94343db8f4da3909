#include "rbs/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <optional>
#include <stdexcept>

#include "rbs/errors.hpp"
#include "rbs/rng.hpp"

namespace rbs {

namespace {

constexpr std::uint8_t kCertVersion = 1;
constexpr std::size_t kHeaderBytes = 18;  // version, mode, q, m, d, k

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t x) {
  out.push_back(static_cast<std::uint8_t>(x));
  out.push_back(static_cast<std::uint8_t>(x >> 8));
  out.push_back(static_cast<std::uint8_t>(x >> 16));
  out.push_back(static_cast<std::uint8_t>(x >> 24));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t at) {
  return static_cast<std::uint32_t>(in[at]) |
         (static_cast<std::uint32_t>(in[at + 1]) << 8) |
         (static_cast<std::uint32_t>(in[at + 2]) << 16) |
         (static_cast<std::uint32_t>(in[at + 3]) << 24);
}

std::uint32_t quantize(double x, double step) {
  const auto top = static_cast<std::uint32_t>(1.0 / step);
  const auto b = static_cast<std::uint32_t>(std::floor(x / step));
  return std::min(b, top);
}

// State for one canonical-labeling search.
struct Search {
  std::uint32_t m;
  const std::uint8_t* adj;  // m*m
  std::vector<std::vector<std::uint32_t>> out_list, in_list;
  const std::vector<std::uint32_t>* roots;
  const std::vector<std::uint32_t>* buckets;  // m*d
  std::uint32_t bucket_dim;
  std::uint64_t budget;
  std::uint64_t nodes = 0;

  std::optional<std::vector<std::uint8_t>> best;  // cert body (no header)

  bool adj_at(std::uint32_t i, std::uint32_t j) const {
    return adj[static_cast<std::size_t>(i) * m + j] != 0;
  }

  void build_lists() {
    out_list.assign(m, {});
    in_list.assign(m, {});
    for (std::uint32_t i = 0; i < m; ++i) {
      for (std::uint32_t j = 0; j < m; ++j) {
        if (adj_at(i, j)) {
          out_list[i].push_back(j);
          in_list[j].push_back(i);
        }
      }
    }
  }

  // Re-rank vertices by (color, sorted out-neighbor colors, sorted
  // in-neighbor colors) until the partition stops splitting.
  void refine(std::vector<std::uint32_t>& color) const {
    std::uint32_t classes = 0;
    for (std::uint32_t c : color) classes = std::max(classes, c + 1);
    std::vector<std::vector<std::uint32_t>> sig(m);
    std::vector<std::uint32_t> order(m);
    while (classes < m) {
      for (std::uint32_t v = 0; v < m; ++v) {
        auto& s = sig[v];
        s.clear();
        s.push_back(color[v]);
        s.push_back(static_cast<std::uint32_t>(out_list[v].size()));
        const std::size_t out_at = s.size();
        for (std::uint32_t u : out_list[v]) s.push_back(color[u]);
        std::sort(s.begin() + out_at, s.end());
        const std::size_t in_at = s.size();
        for (std::uint32_t u : in_list[v]) s.push_back(color[u]);
        std::sort(s.begin() + in_at, s.end());
      }
      for (std::uint32_t v = 0; v < m; ++v) order[v] = v;
      std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return sig[a] < sig[b];
      });
      std::vector<std::uint32_t> next(m);
      std::uint32_t rank = 0;
      for (std::uint32_t i = 0; i < m; ++i) {
        if (i > 0 && sig[order[i]] != sig[order[i - 1]]) ++rank;
        next[order[i]] = rank;
      }
      const std::uint32_t new_classes = rank + 1;
      color.swap(next);
      if (new_classes == classes) return;
      classes = new_classes;
    }
  }

  // A cell is free when its block to every cell (both directions, itself
  // included) is complete or empty; its vertices are then mutually
  // automorphic and never need individualization.
  bool cell_is_free(const std::vector<std::uint32_t>& color,
                    const std::vector<std::vector<std::uint32_t>>& cells,
                    std::size_t cell) const {
    const std::uint32_t rep = cells[cell][0];
    std::vector<std::uint32_t> out_cnt(cells.size(), 0), in_cnt(cells.size(), 0);
    for (std::uint32_t u : out_list[rep]) ++out_cnt[color[u]];
    for (std::uint32_t u : in_list[rep]) ++in_cnt[color[u]];
    for (std::size_t b = 0; b < cells.size(); ++b) {
      const std::uint32_t full = static_cast<std::uint32_t>(cells[b].size()) -
                                 (b == cell ? 1 : 0);
      if (out_cnt[b] != 0 && out_cnt[b] != full) return false;
      if (in_cnt[b] != 0 && in_cnt[b] != full) return false;
    }
    return true;
  }

  std::vector<std::uint8_t> leaf_certificate(
      const std::vector<std::uint32_t>& color) const {
    // Canonical order: by color, ties (free cells only) by local index.
    std::vector<std::uint32_t> order(m);
    for (std::uint32_t v = 0; v < m; ++v) order[v] = v;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return color[a] < color[b]; });
    std::vector<std::uint32_t> pos(m);
    for (std::uint32_t p = 0; p < m; ++p) pos[order[p]] = p;

    std::vector<std::uint8_t> body;
    for (std::uint32_t rt : *roots) put_u32(body, pos[rt]);
    for (std::uint32_t p = 0; p < m; ++p) {
      const std::uint32_t v = order[p];
      for (std::uint32_t d = 0; d < bucket_dim; ++d) {
        put_u32(body, (*buckets)[static_cast<std::size_t>(v) * bucket_dim + d]);
      }
    }
    std::vector<std::uint8_t> bits((static_cast<std::size_t>(m) * m + 7) / 8, 0);
    for (std::uint32_t v = 0; v < m; ++v) {
      for (std::uint32_t u : out_list[v]) {
        const std::size_t bit = static_cast<std::size_t>(pos[v]) * m + pos[u];
        bits[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
      }
    }
    body.insert(body.end(), bits.begin(), bits.end());
    return body;
  }

  void run(std::vector<std::uint32_t> color) {
    if (++nodes > budget) {
      throw CanonSearchBudgetError("canonical search node budget exceeded");
    }
    refine(color);

    std::uint32_t classes = 0;
    for (std::uint32_t c : color) classes = std::max(classes, c + 1);
    std::vector<std::vector<std::uint32_t>> cells(classes);
    for (std::uint32_t v = 0; v < m; ++v) cells[color[v]].push_back(v);

    std::optional<std::size_t> target;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].size() > 1 && !cell_is_free(color, cells, c)) {
        target = c;
        break;
      }
    }
    if (!target) {
      auto body = leaf_certificate(color);
      if (!best || body < *best) best = std::move(body);
      return;
    }
    for (std::uint32_t v : cells[*target]) {
      std::vector<std::uint32_t> child(m);
      for (std::uint32_t u = 0; u < m; ++u) child[u] = color[u] * 2;
      child[v] -= 1;
      run(std::move(child));
    }
  }
};

}  // namespace

std::array<std::uint64_t, 2> hash128(const std::uint8_t* data, std::size_t len) {
  std::uint64_t h1 = 0x9E3779B97F4A7C15ULL ^ len;
  std::uint64_t h2 = 0xC2B2AE3D27D4EB4FULL + len;
  std::size_t i = 0;
  while (i + 8 <= len) {
    std::uint64_t w;
    std::memcpy(&w, data + i, 8);
    h1 = Rng::mix(h1 ^ w);
    h2 = Rng::mix(h2 + w) + h1;
    i += 8;
  }
  std::uint64_t tail = 0;
  for (std::size_t t = 0; i + t < len; ++t) {
    tail |= static_cast<std::uint64_t>(data[i + t]) << (8 * t);
  }
  h1 = Rng::mix(h1 ^ tail ^ (len * 0x9E3779B97F4A7C15ULL));
  h2 = Rng::mix(h2 + tail) + h1;
  return {h1, h2};
}

RootMode CanonicalCode::root_mode() const {
  return static_cast<RootMode>(certificate.at(1));
}
std::uint32_t CanonicalCode::feature_step_micro() const {
  return get_u32(certificate, 2);
}
std::uint32_t CanonicalCode::vertex_count() const {
  return get_u32(certificate, 6);
}

CanonicalCode canonicalize(const SmallGraphView& g, const CanonOptions& opts) {
  if (g.m > opts.size_cap) {
    throw TooLargeError("canonicalize: graph exceeds size cap of " +
                        std::to_string(opts.size_cap));
  }
  if (g.m == 0) throw std::invalid_argument("canonicalize: empty graph");
  if (g.adjacency.size() != static_cast<std::size_t>(g.m) * g.m) {
    throw std::invalid_argument("canonicalize: adjacency size mismatch");
  }
  if (!(opts.feature_step > 0.0 && opts.feature_step <= 1.0)) {
    throw std::invalid_argument("canonicalize: feature step must lie in (0,1]");
  }

  const bool rooted = opts.root_mode == RootMode::Ordered;
  static const std::vector<std::uint32_t> kNoRoots;
  const std::vector<std::uint32_t>& roots = rooted ? g.roots : kNoRoots;
  for (std::uint32_t rt : roots) {
    if (rt >= g.m) throw std::invalid_argument("canonicalize: root out of range");
  }

  std::vector<std::uint32_t> buckets(static_cast<std::size_t>(g.m) * g.feature_dim);
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    buckets[i] = quantize(g.features[i], opts.feature_step);
  }

  // Initial colors: (sorted root indices pointing at the vertex, feature
  // bucket row), densely ranked by content so isomorphic inputs agree.
  std::vector<std::vector<std::uint32_t>> key(g.m);
  for (std::uint32_t v = 0; v < g.m; ++v) {
    std::vector<std::uint32_t> mark;
    for (std::uint32_t i = 0; i < roots.size(); ++i) {
      if (roots[i] == v) mark.push_back(i);
    }
    key[v].push_back(static_cast<std::uint32_t>(mark.size()));
    key[v].insert(key[v].end(), mark.begin(), mark.end());
    for (std::uint32_t d = 0; d < g.feature_dim; ++d) {
      key[v].push_back(buckets[static_cast<std::size_t>(v) * g.feature_dim + d]);
    }
  }
  std::vector<std::uint32_t> order(g.m);
  for (std::uint32_t v = 0; v < g.m; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return key[a] < key[b];
  });
  std::vector<std::uint32_t> color(g.m);
  std::uint32_t rank = 0;
  for (std::uint32_t i = 0; i < g.m; ++i) {
    if (i > 0 && key[order[i]] != key[order[i - 1]]) ++rank;
    color[order[i]] = rank;
  }

  Search search;
  search.m = g.m;
  search.adj = g.adjacency.data();
  search.roots = &roots;
  search.buckets = &buckets;
  search.bucket_dim = g.feature_dim;
  search.budget = opts.search_budget;
  search.build_lists();
  search.run(std::move(color));

  CanonicalCode code;
  code.certificate.reserve(kHeaderBytes + search.best->size());
  code.certificate.push_back(kCertVersion);
  code.certificate.push_back(static_cast<std::uint8_t>(opts.root_mode));
  put_u32(code.certificate,
          static_cast<std::uint32_t>(std::llround(opts.feature_step * 1e6)));
  put_u32(code.certificate, g.m);
  put_u32(code.certificate, g.feature_dim);
  put_u32(code.certificate, static_cast<std::uint32_t>(roots.size()));
  code.certificate.insert(code.certificate.end(), search.best->begin(),
                          search.best->end());
  code.digest = hash128(code.certificate.data(), code.certificate.size());
  return code;
}

namespace {

SmallGraphView view_of(const BallUnion& u) {
  SmallGraphView v;
  v.m = u.size();
  v.adjacency = u.adjacency;
  v.features = u.features;
  v.feature_dim = u.feature_dim;
  v.roots.reserve(u.roots.size());
  for (VertexId rt : u.roots) {
    const auto it = std::find(u.vertices.begin(), u.vertices.end(), rt);
    v.roots.push_back(static_cast<std::uint32_t>(it - u.vertices.begin()));
  }
  return v;
}

}  // namespace

CanonicalCode canonicalize(const BallUnion& u, const CanonOptions& opts) {
  return canonicalize(view_of(u), opts);
}

CanonicalCode canonicalize_component(const BallUnion& u, const ComponentSet& cs,
                                     std::size_t component,
                                     const CanonOptions& opts) {
  const auto& members = cs.components.at(component);
  SmallGraphView v;
  v.m = static_cast<std::uint32_t>(members.size());
  v.adjacency.assign(static_cast<std::size_t>(v.m) * v.m, 0);
  std::vector<std::uint32_t> local_of(u.size(), UINT32_MAX);
  for (std::uint32_t i = 0; i < v.m; ++i) local_of[members[i]] = i;
  for (std::uint32_t i = 0; i < v.m; ++i) {
    for (std::uint32_t j = 0; j < v.m; ++j) {
      if (i != j && u.edge(members[i], members[j])) {
        v.adjacency[static_cast<std::size_t>(i) * v.m + j] = 1;
      }
    }
  }
  if (u.feature_dim > 0) {
    v.feature_dim = u.feature_dim;
    v.features.reserve(static_cast<std::size_t>(v.m) * v.feature_dim);
    for (std::uint32_t i = 0; i < v.m; ++i) {
      const auto* row = u.features.data() +
                        static_cast<std::size_t>(members[i]) * u.feature_dim;
      v.features.insert(v.features.end(), row, row + u.feature_dim);
    }
  }
  for (VertexId rt : u.roots) {
    const auto it = std::find(u.vertices.begin(), u.vertices.end(), rt);
    const auto local = static_cast<std::uint32_t>(it - u.vertices.begin());
    if (local_of[local] != UINT32_MAX) v.roots.push_back(local_of[local]);
  }
  return canonicalize(v, opts);
}

bool isomorphic(const CanonicalCode& a, const CanonicalCode& b) {
  if (a.root_mode() != b.root_mode()) {
    throw std::invalid_argument("isomorphic: root mode mismatch");
  }
  if (a.feature_step_micro() != b.feature_step_micro()) {
    throw std::invalid_argument("isomorphic: feature quantization mismatch");
  }
  return a == b;
}

}  // namespace rbs
