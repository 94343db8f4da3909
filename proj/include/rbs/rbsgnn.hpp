#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rbs/oracle.hpp"
#include "rbs/sampler.hpp"

namespace rbs {

struct Matrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(std::uint32_t r, std::uint32_t c) : rows(r), cols(c), data(std::size_t(r) * c, 0.0) {}
  double& at(std::uint32_t i, std::uint32_t j) { return data[std::size_t(i) * cols + j]; }
  double at(std::uint32_t i, std::uint32_t j) const { return data[std::size_t(i) * cols + j]; }
};

struct LinearLayer {
  Matrix w;
  std::vector<double> b;
};

enum class FeatureMode : std::uint8_t { ConstantOne = 0, DegreeBuckets = 1 };

// Input featurization of sampled vertices. Degree buckets use the degree
// within the sampled subgraph (the oracle forbids global degree access):
// bucket i covers degrees <= bounds[i], the last bucket catches the rest.
struct FeatureSpec {
  FeatureMode mode = FeatureMode::ConstantOne;
  std::vector<std::uint32_t> bucket_bounds;

  std::uint32_t input_dim() const {
    return mode == FeatureMode::ConstantOne
               ? 1
               : static_cast<std::uint32_t>(bucket_bounds.size()) + 1;
  }
};

// Message-passing f plus readout g. f runs `prop_layers` linear layers
// (no activation) over neighbor sums; the per-component embedding is the
// sum of all per-layer vertex states. g is a two-layer perceptron with a
// rectifier. The rooted variant feeds g the concatenation of the root
// component's embedding and the sum of the rest.
struct ModelParams {
  FeatureSpec features;
  std::uint32_t hidden = 16;
  std::uint32_t prop_layers = 2;
  std::uint32_t classes = 2;
  bool rooted = false;

  std::vector<LinearLayer> f;  // [0]: hidden x input, rest hidden x hidden
  LinearLayer g1;              // hidden x (rooted ? 2*hidden : hidden)
  LinearLayer g2;              // classes x hidden

  void validate() const;
};

ModelParams init_model(const FeatureSpec& features, std::uint32_t hidden,
                       std::uint32_t prop_layers, std::uint32_t classes,
                       bool rooted, std::uint64_t seed);

// All parameter arrays in a fixed order (for the optimizer and the
// finite-difference harness).
std::vector<std::vector<double>*> parameter_tensors(ModelParams& p);

// Deterministic and bitwise invariant under vertex relabeling and component
// reordering: every floating-point reduction sums its operands in sorted
// order.
std::vector<double> forward(const ModelParams& p, const BallUnion& u,
                            const ComponentSet& c);

// Rooted readout g(f(C_0), sum_j f(C_j)); requires c.root_component.
std::vector<double> forward_rooted(const ModelParams& p, const BallUnion& u,
                                   const ComponentSet& c);

enum class LossKind : std::uint8_t { CrossEntropy = 0, SquaredError = 1 };

struct LabeledSample {
  BallUnion ball_union;
  ComponentSet components;
  std::uint32_t label = 0;  // class index (cross-entropy)
  double target = 0.0;      // real target (squared error)
};

struct LossGrad {
  double loss = 0.0;
  ModelParams grads;  // same shapes as the parameters
};

// Mean loss over the batch plus (wd/2)*||theta||^2, with gradients by exact
// reverse accumulation through the forward computation.
LossGrad loss_and_grad(const ModelParams& p, std::span<const LabeledSample> batch,
                       double weight_decay = 0.0,
                       LossKind kind = LossKind::CrossEntropy);

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 1e-3;
  std::uint32_t lr_step = 50;   // epochs per decay step
  double lr_decay = 0.5;        // multiplicative factor per step
  std::uint32_t epochs = 100;
  std::uint32_t batch_size = 32;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::CrossEntropy;

  void validate() const;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_losses;
};

// Minibatch SGD with momentum, weight decay and a stepped learning-rate
// schedule; shuffling is seeded, training is bit-deterministic per seed.
TrainResult train(ModelParams p0, std::span<const LabeledSample> data,
                  const TrainConfig& cfg);

struct EvalReport {
  double accuracy = 0.0;
  std::vector<std::vector<std::uint64_t>> confusion;  // [true][predicted]
  std::vector<std::uint64_t> per_graph_queries;
  QueryCounts total_queries;
};

// Majority vote over `votes` independent sample-and-forward passes per
// graph. Graph i uses session seed Rng::derive(seed, i); the oracle query
// count per graph depends only on the sampler parameters and votes, never
// on the size of the graph.
EvalReport evaluate(const ModelParams& p,
                    const std::vector<std::reference_wrapper<const Graph>>& graphs,
                    std::span<const std::uint32_t> labels, BallParams ball,
                    std::uint64_t seed, std::uint32_t votes);

// Versioned little-endian checkpoint of dims + weights.
void save_model(const ModelParams& p, const std::string& path);
ModelParams load_model(const std::string& path);

}  // namespace rbs
