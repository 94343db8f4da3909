#include "rbs/rbsgnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "rbs/errors.hpp"
#include "rbs/rng.hpp"

namespace rbs {

namespace {

// Sums `items` (each a vector of length `dim`) in lexicographically sorted
// order, so the result is independent of the callers' operand order.
std::vector<double> sorted_accumulate(std::vector<const double*> items,
                                      std::uint32_t dim) {
  std::sort(items.begin(), items.end(), [dim](const double* a, const double* b) {
    return std::lexicographical_compare(a, a + dim, b, b + dim);
  });
  std::vector<double> out(dim, 0.0);
  for (const double* item : items) {
    for (std::uint32_t i = 0; i < dim; ++i) out[i] += item[i];
  }
  return out;
}

void matvec(const Matrix& w, const double* x, double* out) {
  for (std::uint32_t i = 0; i < w.rows; ++i) {
    double acc = 0.0;
    const double* row = w.data.data() + std::size_t(i) * w.cols;
    for (std::uint32_t j = 0; j < w.cols; ++j) acc += row[j] * x[j];
    out[i] = acc;
  }
}

// out += w^T * g
void matvec_t_add(const Matrix& w, const double* g, double* out) {
  for (std::uint32_t i = 0; i < w.rows; ++i) {
    const double* row = w.data.data() + std::size_t(i) * w.cols;
    for (std::uint32_t j = 0; j < w.cols; ++j) out[j] += row[j] * g[i];
  }
}

std::uint32_t degree_bucket(std::uint32_t deg, const std::vector<std::uint32_t>& bounds) {
  for (std::uint32_t i = 0; i < bounds.size(); ++i) {
    if (deg <= bounds[i]) return i;
  }
  return static_cast<std::uint32_t>(bounds.size());
}

std::vector<double> input_features(const FeatureSpec& spec, const BallUnion& u) {
  const std::uint32_t m = u.size();
  const std::uint32_t dim = spec.input_dim();
  std::vector<double> x(std::size_t(m) * dim, 0.0);
  if (spec.mode == FeatureMode::ConstantOne) {
    for (std::uint32_t v = 0; v < m; ++v) x[v] = 1.0;
  } else {
    for (std::uint32_t v = 0; v < m; ++v) {
      std::uint32_t deg = 0;
      for (std::uint32_t w = 0; w < m; ++w) {
        if (u.edge(v, w)) ++deg;
      }
      x[std::size_t(v) * dim + degree_bucket(deg, spec.bucket_bounds)] = 1.0;
    }
  }
  return x;
}

struct Trace {
  std::vector<std::vector<double>> h;  // [0..L], layer l: m x dim_l
  std::vector<std::vector<double>> s;  // [1..L] at index l-1: m x dim_{l-1}
  std::vector<double> pooled;          // g input
  std::vector<double> a1, z1, logits;
};

Trace run_forward(const ModelParams& p, const BallUnion& u, const ComponentSet& c,
                  bool rooted) {
  p.validate();
  const std::uint32_t m = u.size();
  const std::uint32_t L = p.prop_layers;
  const std::uint32_t H = p.hidden;
  const std::uint32_t in_dim = p.features.input_dim();

  Trace t;
  t.h.resize(L + 1);
  t.s.resize(L);
  t.h[0] = input_features(p.features, u);

  for (std::uint32_t l = 1; l <= L; ++l) {
    const std::uint32_t prev_dim = l == 1 ? in_dim : H;
    const auto& layer = p.f[l - 1];
    t.s[l - 1].assign(std::size_t(m) * prev_dim, 0.0);
    t.h[l].assign(std::size_t(m) * H, 0.0);
    for (std::uint32_t v = 0; v < m; ++v) {
      std::vector<const double*> nbrs;
      for (std::uint32_t w = 0; w < m; ++w) {
        if (u.edge(v, w)) nbrs.push_back(t.h[l - 1].data() + std::size_t(w) * prev_dim);
      }
      auto sum = sorted_accumulate(std::move(nbrs), prev_dim);
      std::copy(sum.begin(), sum.end(), t.s[l - 1].begin() + std::size_t(v) * prev_dim);
      double* hv = t.h[l].data() + std::size_t(v) * H;
      matvec(layer.w, sum.data(), hv);
      for (std::uint32_t i = 0; i < H; ++i) hv[i] += layer.b[i];
    }
  }

  // Per-component embeddings: sum of all per-layer vertex states.
  std::vector<std::vector<double>> phi(c.components.size());
  for (std::size_t j = 0; j < c.components.size(); ++j) {
    std::vector<const double*> items;
    items.reserve(c.components[j].size() * L);
    for (std::uint32_t l = 1; l <= L; ++l) {
      for (std::uint32_t v : c.components[j]) {
        items.push_back(t.h[l].data() + std::size_t(v) * H);
      }
    }
    phi[j] = sorted_accumulate(std::move(items), H);
  }

  if (!rooted) {
    std::vector<const double*> items;
    for (const auto& e : phi) items.push_back(e.data());
    t.pooled = sorted_accumulate(std::move(items), H);
  } else {
    if (!c.root_component) {
      throw InvalidStateError("forward_rooted: component set has no root component");
    }
    const std::size_t rc = *c.root_component;
    t.pooled.assign(std::size_t(2) * H, 0.0);
    std::copy(phi[rc].begin(), phi[rc].end(), t.pooled.begin());
    std::vector<const double*> rest;
    for (std::size_t j = 0; j < phi.size(); ++j) {
      if (j != rc) rest.push_back(phi[j].data());
    }
    const auto rest_sum = sorted_accumulate(std::move(rest), H);
    std::copy(rest_sum.begin(), rest_sum.end(), t.pooled.begin() + H);
  }

  t.a1.assign(H, 0.0);
  matvec(p.g1.w, t.pooled.data(), t.a1.data());
  for (std::uint32_t i = 0; i < H; ++i) t.a1[i] += p.g1.b[i];
  t.z1.resize(H);
  for (std::uint32_t i = 0; i < H; ++i) t.z1[i] = std::max(0.0, t.a1[i]);
  t.logits.assign(p.classes, 0.0);
  matvec(p.g2.w, t.z1.data(), t.logits.data());
  for (std::uint32_t i = 0; i < p.classes; ++i) t.logits[i] += p.g2.b[i];
  return t;
}

ModelParams zeros_like(const ModelParams& p) {
  ModelParams z = p;
  for (auto& layer : z.f) {
    std::fill(layer.w.data.begin(), layer.w.data.end(), 0.0);
    std::fill(layer.b.begin(), layer.b.end(), 0.0);
  }
  for (auto* layer : {&z.g1, &z.g2}) {
    std::fill(layer->w.data.begin(), layer->w.data.end(), 0.0);
    std::fill(layer->b.begin(), layer->b.end(), 0.0);
  }
  return z;
}

void backward_sample(const ModelParams& p, const BallUnion& u, const ComponentSet& c,
                     const Trace& t, std::span<const double> dlogits,
                     ModelParams& grads) {
  const std::uint32_t m = u.size();
  const std::uint32_t L = p.prop_layers;
  const std::uint32_t H = p.hidden;
  const bool rooted = p.rooted;

  // g2
  for (std::uint32_t i = 0; i < p.classes; ++i) {
    grads.g2.b[i] += dlogits[i];
    for (std::uint32_t j = 0; j < H; ++j) {
      grads.g2.w.at(i, j) += dlogits[i] * t.z1[j];
    }
  }
  std::vector<double> dz1(H, 0.0);
  matvec_t_add(p.g2.w, dlogits.data(), dz1.data());
  for (std::uint32_t i = 0; i < H; ++i) {
    if (t.a1[i] <= 0.0) dz1[i] = 0.0;  // rectifier gate
  }
  // g1
  const std::uint32_t e_dim = rooted ? 2 * H : H;
  for (std::uint32_t i = 0; i < H; ++i) {
    grads.g1.b[i] += dz1[i];
    for (std::uint32_t j = 0; j < e_dim; ++j) {
      grads.g1.w.at(i, j) += dz1[i] * t.pooled[j];
    }
  }
  std::vector<double> dpooled(e_dim, 0.0);
  matvec_t_add(p.g1.w, dz1.data(), dpooled.data());

  // Pooling: every state h_l(v) receives the slice of dpooled addressed to
  // its component (root slice vs rest slice in the rooted variant).
  std::vector<const double*> dstate_of(m, nullptr);
  std::vector<std::size_t> comp_of(m, 0);
  for (std::size_t j = 0; j < c.components.size(); ++j) {
    for (std::uint32_t v : c.components[j]) comp_of[v] = j;
  }
  for (std::uint32_t v = 0; v < m; ++v) {
    if (!rooted) {
      dstate_of[v] = dpooled.data();
    } else {
      dstate_of[v] = comp_of[v] == *c.root_component ? dpooled.data()
                                                     : dpooled.data() + H;
    }
  }

  // Descend propagation layers; dh[l] collects pooling plus upper-layer terms.
  std::vector<std::vector<double>> dh(L + 1);
  for (std::uint32_t l = 0; l <= L; ++l) {
    const std::uint32_t dim = l == 0 ? p.features.input_dim() : H;
    dh[l].assign(std::size_t(m) * dim, 0.0);
  }
  for (std::uint32_t l = 1; l <= L; ++l) {
    for (std::uint32_t v = 0; v < m; ++v) {
      double* dst = dh[l].data() + std::size_t(v) * H;
      const double* src = dstate_of[v];
      for (std::uint32_t i = 0; i < H; ++i) dst[i] += src[i];
    }
  }
  for (std::uint32_t l = L; l >= 1; --l) {
    const std::uint32_t prev_dim = l == 1 ? p.features.input_dim() : H;
    const auto& layer = p.f[l - 1];
    auto& glayer = grads.f[l - 1];
    std::vector<double> ds(prev_dim);
    for (std::uint32_t v = 0; v < m; ++v) {
      const double* dhv = dh[l].data() + std::size_t(v) * H;
      const double* sv = t.s[l - 1].data() + std::size_t(v) * prev_dim;
      for (std::uint32_t i = 0; i < H; ++i) {
        glayer.b[i] += dhv[i];
        for (std::uint32_t j = 0; j < prev_dim; ++j) {
          glayer.w.at(i, j) += dhv[i] * sv[j];
        }
      }
      std::fill(ds.begin(), ds.end(), 0.0);
      matvec_t_add(layer.w, dhv, ds.data());
      for (std::uint32_t w = 0; w < m; ++w) {
        if (u.edge(v, w)) {
          double* dst = dh[l - 1].data() + std::size_t(w) * prev_dim;
          for (std::uint32_t j = 0; j < prev_dim; ++j) dst[j] += ds[j];
        }
      }
    }
  }
}

double logsumexp(std::span<const double> x) {
  double mx = x[0];
  for (double v : x) mx = std::max(mx, v);
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - mx);
  return mx + std::log(acc);
}

}  // namespace

void ModelParams::validate() const {
  if (prop_layers == 0 || hidden == 0 || classes == 0) {
    throw std::invalid_argument("model dims must be positive");
  }
  if (f.size() != prop_layers) throw std::invalid_argument("wrong number of f layers");
  const std::uint32_t in_dim = features.input_dim();
  for (std::uint32_t l = 0; l < prop_layers; ++l) {
    const std::uint32_t expect_cols = l == 0 ? in_dim : hidden;
    if (f[l].w.rows != hidden || f[l].w.cols != expect_cols ||
        f[l].b.size() != hidden) {
      throw std::invalid_argument("f layer shape mismatch");
    }
  }
  const std::uint32_t e_dim = rooted ? 2 * hidden : hidden;
  if (g1.w.rows != hidden || g1.w.cols != e_dim || g1.b.size() != hidden) {
    throw std::invalid_argument("g1 shape mismatch");
  }
  if (g2.w.rows != classes || g2.w.cols != hidden || g2.b.size() != classes) {
    throw std::invalid_argument("g2 shape mismatch");
  }
}

ModelParams init_model(const FeatureSpec& features, std::uint32_t hidden,
                       std::uint32_t prop_layers, std::uint32_t classes,
                       bool rooted, std::uint64_t seed) {
  ModelParams p;
  p.features = features;
  p.hidden = hidden;
  p.prop_layers = prop_layers;
  p.classes = classes;
  p.rooted = rooted;
  std::uint64_t tensor_idx = 0;
  auto glorot = [&](std::uint32_t rows, std::uint32_t cols) {
    Matrix w(rows, cols);
    Rng rng(Rng::derive(seed, tensor_idx++));
    const double limit = std::sqrt(6.0 / (rows + cols));
    for (double& x : w.data) x = rng.uniform(-limit, limit);
    return w;
  };
  const std::uint32_t in_dim = features.input_dim();
  for (std::uint32_t l = 0; l < prop_layers; ++l) {
    LinearLayer layer;
    layer.w = glorot(hidden, l == 0 ? in_dim : hidden);
    layer.b.assign(hidden, 0.0);
    p.f.push_back(std::move(layer));
  }
  p.g1.w = glorot(hidden, rooted ? 2 * hidden : hidden);
  p.g1.b.assign(hidden, 0.0);
  p.g2.w = glorot(classes, hidden);
  p.g2.b.assign(classes, 0.0);
  p.validate();
  return p;
}

std::vector<std::vector<double>*> parameter_tensors(ModelParams& p) {
  std::vector<std::vector<double>*> tensors;
  for (auto& layer : p.f) {
    tensors.push_back(&layer.w.data);
    tensors.push_back(&layer.b);
  }
  tensors.push_back(&p.g1.w.data);
  tensors.push_back(&p.g1.b);
  tensors.push_back(&p.g2.w.data);
  tensors.push_back(&p.g2.b);
  return tensors;
}

std::vector<double> forward(const ModelParams& p, const BallUnion& u,
                            const ComponentSet& c) {
  if (p.rooted) throw std::invalid_argument("forward: params are rooted");
  return run_forward(p, u, c, false).logits;
}

std::vector<double> forward_rooted(const ModelParams& p, const BallUnion& u,
                                   const ComponentSet& c) {
  if (!p.rooted) throw std::invalid_argument("forward_rooted: params are unrooted");
  return run_forward(p, u, c, true).logits;
}

LossGrad loss_and_grad(const ModelParams& p, std::span<const LabeledSample> batch,
                       double weight_decay, LossKind kind) {
  if (batch.empty()) throw std::invalid_argument("loss_and_grad: empty batch");
  p.validate();
  LossGrad out;
  out.grads = zeros_like(p);
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  for (const LabeledSample& sample : batch) {
    const Trace t = run_forward(p, sample.ball_union, sample.components, p.rooted);
    std::vector<double> dlogits(p.classes, 0.0);
    if (kind == LossKind::CrossEntropy) {
      if (sample.label >= p.classes) {
        throw std::invalid_argument("loss_and_grad: label out of range");
      }
      const double lse = logsumexp(t.logits);
      out.loss += (lse - t.logits[sample.label]) * inv_b;
      for (std::uint32_t i = 0; i < p.classes; ++i) {
        dlogits[i] = (std::exp(t.logits[i] - lse) -
                      (i == sample.label ? 1.0 : 0.0)) *
                     inv_b;
      }
    } else {
      for (std::uint32_t i = 0; i < p.classes; ++i) {
        const double diff = t.logits[i] - sample.target;
        out.loss += diff * diff * inv_b;
        dlogits[i] = 2.0 * diff * inv_b;
      }
    }
    backward_sample(p, sample.ball_union, sample.components, t, dlogits, out.grads);
  }

  if (weight_decay != 0.0) {
    auto params = parameter_tensors(const_cast<ModelParams&>(p));
    auto grads = parameter_tensors(out.grads);
    for (std::size_t t = 0; t < params.size(); ++t) {
      for (std::size_t i = 0; i < params[t]->size(); ++i) {
        const double theta = (*params[t])[i];
        out.loss += 0.5 * weight_decay * theta * theta;
        (*grads[t])[i] += weight_decay * theta;
      }
    }
  }
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0,1)");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight decay must be >= 0");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw std::invalid_argument("lr decay factor must lie in (0,1]");
  if (lr_step == 0 || batch_size == 0) throw std::invalid_argument("lr step and batch size must be positive");
}

TrainResult train(ModelParams p0, std::span<const LabeledSample> data,
                  const TrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  cfg.validate();
  p0.validate();

  TrainResult result;
  result.params = std::move(p0);
  auto params = parameter_tensors(result.params);
  std::vector<std::vector<double>> velocity;
  for (auto* t : params) velocity.emplace_back(t->size(), 0.0);

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<LabeledSample const*> batch_ptrs;

  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.learning_rate *
                      std::pow(cfg.lr_decay, static_cast<double>(epoch / cfg.lr_step));
    Rng shuffle_rng(Rng::derive(cfg.seed, epoch));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t at = 0; at < order.size(); at += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), at + cfg.batch_size);
      std::vector<LabeledSample> batch;
      batch.reserve(end - at);
      for (std::size_t i = at; i < end; ++i) batch.push_back(data[order[i]]);
      const LossGrad lg =
          loss_and_grad(result.params, batch, cfg.weight_decay, cfg.loss);
      if (!std::isfinite(lg.loss)) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                              ": loss = " + std::to_string(lg.loss));
      }
      epoch_loss += lg.loss;
      ++batches;
      auto grads = parameter_tensors(const_cast<ModelParams&>(lg.grads));
      for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t i = 0; i < params[t]->size(); ++i) {
          velocity[t][i] = cfg.momentum * velocity[t][i] + (*grads[t])[i];
          (*params[t])[i] -= lr * velocity[t][i];
        }
      }
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(batches));
  }
  return result;
}

EvalReport evaluate(const ModelParams& p,
                    const std::vector<std::reference_wrapper<const Graph>>& graphs,
                    std::span<const std::uint32_t> labels, BallParams ball,
                    std::uint64_t seed, std::uint32_t votes) {
  if (votes < 1) throw std::invalid_argument("evaluate: votes must be >= 1");
  if (graphs.size() != labels.size()) {
    throw std::invalid_argument("evaluate: graphs/labels size mismatch");
  }
  EvalReport report;
  report.confusion.assign(p.classes, std::vector<std::uint64_t>(p.classes, 0));
  std::uint64_t correct = 0;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    OracleSession session(graphs[i], Rng::derive(seed, i));
    std::vector<std::uint32_t> tally(p.classes, 0);
    for (std::uint32_t v = 0; v < votes; ++v) {
      const BallUnion u = union_sample(session, ball.k, ball.b, ball.r);
      const ComponentSet c = weakly_connected_components(u);
      const auto logits = forward(p, u, c);
      const std::uint32_t pred = static_cast<std::uint32_t>(
          std::max_element(logits.begin(), logits.end()) - logits.begin());
      ++tally[pred];
    }
    const std::uint32_t pred = static_cast<std::uint32_t>(
        std::max_element(tally.begin(), tally.end()) - tally.begin());
    report.per_graph_queries.push_back(session.counts().total());
    report.total_queries.sample_vertex += session.counts().sample_vertex;
    report.total_queries.sample_neighbor += session.counts().sample_neighbor;
    report.total_queries.is_adjacent += session.counts().is_adjacent;
    if (labels[i] < p.classes) {
      report.confusion[labels[i]][pred] += 1;
      if (pred == labels[i]) ++correct;
    }
  }
  report.accuracy = graphs.empty()
                        ? 0.0
                        : static_cast<double>(correct) / static_cast<double>(graphs.size());
  return report;
}

namespace {

constexpr char kModelMagic[8] = {'R', 'B', 'S', 'G', 'N', 'N', '0', '1'};

void put_u32_le(std::ofstream& out, std::uint32_t x) {
  const std::uint8_t bytes[4] = {
      static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(x >> 8),
      static_cast<std::uint8_t>(x >> 16), static_cast<std::uint8_t>(x >> 24)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t get_u32_le(std::ifstream& in) {
  std::uint8_t bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void put_f64_le(std::ofstream& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  std::uint8_t bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<std::uint8_t>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_f64_le(std::ifstream& in) {
  std::uint8_t bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

}  // namespace

void save_model(const ModelParams& p, const std::string& path) {
  p.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kModelMagic, sizeof(kModelMagic));
  put_u32_le(out, static_cast<std::uint32_t>(p.features.mode));
  put_u32_le(out, static_cast<std::uint32_t>(p.features.bucket_bounds.size()));
  for (std::uint32_t b : p.features.bucket_bounds) put_u32_le(out, b);
  put_u32_le(out, p.hidden);
  put_u32_le(out, p.prop_layers);
  put_u32_le(out, p.classes);
  put_u32_le(out, p.rooted ? 1 : 0);
  auto tensors = parameter_tensors(const_cast<ModelParams&>(p));
  for (const auto* t : tensors) {
    for (double x : *t) put_f64_le(out, x);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ModelParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kModelMagic, 8) != 0) {
    throw ParseError("not a model checkpoint: " + path);
  }
  FeatureSpec spec;
  spec.mode = static_cast<FeatureMode>(get_u32_le(in));
  const std::uint32_t n_bounds = get_u32_le(in);
  for (std::uint32_t i = 0; i < n_bounds; ++i) {
    spec.bucket_bounds.push_back(get_u32_le(in));
  }
  const std::uint32_t hidden = get_u32_le(in);
  const std::uint32_t layers = get_u32_le(in);
  const std::uint32_t classes = get_u32_le(in);
  const bool rooted = get_u32_le(in) != 0;
  ModelParams p = init_model(spec, hidden, layers, classes, rooted, 0);
  auto tensors = parameter_tensors(p);
  for (auto* t : tensors) {
    for (double& x : *t) x = get_f64_le(in);
  }
  if (!in) throw ParseError("model checkpoint truncated: " + path);
  p.validate();
  return p;
}

}  // namespace rbs
