#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "entropic/mdp.hpp"
#include "entropic/rng.hpp"

namespace entropic {

/// Dense feed-forward network: ReLU hidden layers, identity output.
///
/// Parameters live in one flat vector, layer by layer, each layer as its
/// weight matrix (out x in, column-major) followed by its bias. Batches are
/// column-major: one sample per column.
class DenseNet {
 public:
  /// Zero-initialised network with the given layer sizes (input first, output last).
  explicit DenseNet(std::vector<int> sizes);
  /// Weights and biases drawn from U(-sqrt(1/fan_in), sqrt(1/fan_in)).
  static DenseNet random(std::vector<int> sizes, Rng& rng);

  const std::vector<int>& sizes() const noexcept { return sizes_; }
  std::size_t n_layers() const noexcept { return sizes_.size() - 1; }
  Eigen::Index input_size() const noexcept { return sizes_.front(); }
  Eigen::Index output_size() const noexcept { return sizes_.back(); }
  Eigen::Index n_params() const noexcept { return params_.size(); }

  const Vec& params() const noexcept { return params_; }
  /// Replace all parameters; throws ValidationError on a length mismatch.
  void set_params(const Vec& params);
  Vec& mutable_params() noexcept { return params_; }

  Eigen::Map<const Mat> weight(std::size_t layer) const;
  Eigen::Map<const Vec> bias(std::size_t layer) const;
  Eigen::Map<Mat> weight(std::size_t layer);
  Eigen::Map<Vec> bias(std::size_t layer);

  /// Layer inputs and pre-activations kept by forward for backward.
  struct Cache {
    std::vector<Mat> inputs;
    std::vector<Mat> pre;
  };
  struct Gradients {
    /// Gradient of sum(grad_out .* output) over the whole batch, flat layout.
    Vec params;
    /// Same gradient with respect to the input batch.
    Mat input;
  };

  Mat forward(const Mat& x) const;
  Mat forward(const Mat& x, Cache& cache) const;
  Vec forward_one(const Vec& x) const;
  /// Backpropagate grad_out (output_size x batch). ReLU uses subgradient 0 at 0.
  Gradients backward(const Cache& cache, const Mat& grad_out) const;

  bool all_finite() const { return params_.allFinite(); }

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;
  Vec params_;
};

/// Adam moments plus hyperparameters. weight_decay > 0 gives decoupled (AdamW) decay.
struct AdamState {
  Vec m;
  Vec v;
  long step = 0;
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;

  AdamState() = default;
  AdamState(Eigen::Index n, double lr, double weight_decay = 0.0);
};

/// One descent step: params -= lr * mhat / (sqrt(vhat) + eps) (+ decoupled decay).
void adam_step(AdamState& state, Vec& params, const Vec& grads);

/// target <- tau * online + (1 - tau) * target.
void soft_update(Vec& target, const Vec& online, double tau);
void soft_update(DenseNet& target, const DenseNet& online, double tau);

struct GradientCheck {
  /// Whole-vector relative errors ||analytic - numeric|| / max norm.
  double param_error = 0.0;
  double input_error = 0.0;
  /// Worst per-coordinate relative error with an absolute floor of 1e-6.
  double param_max_error = 0.0;
  double input_max_error = 0.0;
  /// Smallest |pre-activation| of a hidden unit; finite differences are exact
  /// only when this exceeds the probe step times the unit's sensitivity.
  double min_abs_pre = 0.0;
};

/// Compare backward against central differences of L = sum(grad_out .* net(x)).
GradientCheck dense_gradient_check(const DenseNet& net, const Mat& x, const Mat& grad_out, double h = 1e-6);

/// Binary snapshot: 8-byte little-endian header length, JSON header
/// {"sizes": [...], "dtype": "float64", "count": n}, then the raw parameters.
void save_net(std::ostream& out, const DenseNet& net);
DenseNet load_net(std::istream& in);
void save_net(const std::filesystem::path& path, const DenseNet& net);
DenseNet load_net(const std::filesystem::path& path);

}  // namespace entropic
