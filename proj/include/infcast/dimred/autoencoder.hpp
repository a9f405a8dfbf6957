#pragma once

#include "infcast/core/random.hpp"
#include "infcast/core/types.hpp"
#include "infcast/dimred/factor_matrix.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace infcast {

struct AutoencoderConfig {
  int depth = 5;  // encoder hidden layers, the last one is the bottleneck
  int iterations = 2000;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
  int checkpoint_every = 50;
};

/// Encoder widths interpolated linearly (rounded) from K down to q.
inline std::vector<Index> encoder_widths(Index k, Index q, int depth) {
  if (depth < 1) throw ValidationError("autoencoder: depth must be >= 1");
  std::vector<Index> w;
  for (int l = 1; l <= depth; ++l) {
    const double v = static_cast<double>(k) + (static_cast<double>(q) - static_cast<double>(k)) * l / depth;
    w.push_back(std::max<Index>(1, static_cast<Index>(std::lround(v))));
  }
  w.back() = q;
  return w;
}

namespace detail {

struct DenseLayer {
  Matrix weight;  // fan_in x fan_out
  Eigen::RowVectorXd bias;
  bool tanh = true;
};

/// Encoder (tanh throughout) followed by a mirrored decoder whose hidden
/// layers are tanh and whose output layer is linear.
class Autoencoder {
 public:
  Autoencoder(Index k, const std::vector<Index>& enc_widths, Rng& rng) : bottleneck_(static_cast<int>(enc_widths.size())) {
    std::vector<Index> sizes{k};
    sizes.insert(sizes.end(), enc_widths.begin(), enc_widths.end());
    for (auto it = enc_widths.rbegin() + 1; it != enc_widths.rend(); ++it) sizes.push_back(*it);
    sizes.push_back(k);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      DenseLayer layer;
      const Index fan_in = sizes[l];
      const Index fan_out = sizes[l + 1];
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      layer.weight.resize(fan_in, fan_out);
      for (Index j = 0; j < fan_out; ++j) {
        for (Index i = 0; i < fan_in; ++i) layer.weight(i, j) = rng.uniform(-limit, limit);
      }
      layer.bias = Eigen::RowVectorXd::Zero(fan_out);
      layer.tanh = (l + 2 < sizes.size());
      layers_.push_back(std::move(layer));
    }
  }

  /// Activations of every layer; element 0 is the input.
  std::vector<Matrix> forward(const Matrix& x) const {
    std::vector<Matrix> acts;
    acts.reserve(layers_.size() + 1);
    acts.push_back(x);
    for (const auto& layer : layers_) {
      Matrix z = acts.back() * layer.weight;
      z.rowwise() += layer.bias;
      if (layer.tanh) z = z.array().tanh().matrix();
      acts.push_back(std::move(z));
    }
    return acts;
  }

  Matrix encode(const Matrix& x) const { return forward(x)[static_cast<std::size_t>(bottleneck_)]; }

  double loss(const Matrix& x) const {
    return (forward(x).back() - x).squaredNorm() / static_cast<double>(x.size());
  }

  /// Gradients of the mean squared reconstruction error.
  std::vector<DenseLayer> gradient(const Matrix& x, double& loss_out) const {
    const auto acts = forward(x);
    Matrix delta = acts.back() - x;
    loss_out = delta.squaredNorm() / static_cast<double>(x.size());
    delta *= 2.0 / static_cast<double>(x.size());
    std::vector<DenseLayer> grads(layers_.size());
    for (std::size_t l = layers_.size(); l-- > 0;) {
      if (layers_[l].tanh) delta = delta.cwiseProduct((1.0 - acts[l + 1].array().square()).matrix());
      grads[l].weight = acts[l].transpose() * delta;
      grads[l].bias = delta.colwise().sum();
      if (l > 0) delta = delta * layers_[l].weight.transpose();
    }
    return grads;
  }

  void step(const std::vector<DenseLayer>& grads, double lr) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      layers_[l].weight.noalias() -= lr * grads[l].weight;
      layers_[l].bias.noalias() -= lr * grads[l].bias;
    }
  }

 private:
  std::vector<DenseLayer> layers_;
  int bottleneck_;
};

}  // namespace detail

struct AutoencoderFit {
  FactorMatrix factors;
  std::vector<Index> widths;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> checkpoint_losses;  // full-batch loss every checkpoint_every iterations
};

/// Full-batch gradient descent on the mean squared reconstruction error.
/// A step that raises the loss is undone and the step size halved; an
/// accepted step grows it by 10%. Bit-reproducible for a fixed seed.
inline AutoencoderFit train_autoencoder(const Matrix& x, Index q, const AutoencoderConfig& cfg = {}) {
  const Index k = x.cols();
  if (q < 1 || q >= k) throw ValidationError("autoencoder: q must lie in [1, K-1]");
  if (!x.allFinite()) throw ValidationError("autoencoder: non-finite input");
  if (cfg.iterations < 0) throw ValidationError("autoencoder: negative iteration budget");

  Rng rng(cfg.seed);
  AutoencoderFit fit;
  fit.widths = encoder_widths(k, q, cfg.depth);
  detail::Autoencoder net(k, fit.widths, rng);

  double loss = net.loss(x);
  if (!std::isfinite(loss)) throw NumericalError("autoencoder: non-finite loss at iteration 0");
  fit.initial_loss = loss;
  fit.checkpoint_losses.push_back(loss);
  double lr = cfg.learning_rate;
  for (int it = 1; it <= cfg.iterations; ++it) {
    double current = 0.0;
    const auto grads = net.gradient(x, current);
    net.step(grads, lr);
    const double trial = net.loss(x);
    if (std::isnan(trial)) throw NumericalError("autoencoder: non-finite loss at iteration " + std::to_string(it));
    if (trial <= current) {
      loss = trial;
      lr *= 1.1;
    } else {
      net.step(grads, -lr);
      lr *= 0.5;
    }
    if (cfg.checkpoint_every > 0 && it % cfg.checkpoint_every == 0) fit.checkpoint_losses.push_back(loss);
    if (lr < 1e-14) break;
  }
  fit.final_loss = net.loss(x);
  fit.factors.method = CompressionMethod::autoencoder;
  fit.factors.values = net.encode(x);
  if (!fit.factors.values.allFinite()) throw NumericalError("autoencoder: non-finite bottleneck");
  return fit;
}

inline FactorMatrix autoencoder(const Matrix& x, Index q, const AutoencoderConfig& cfg = {}) {
  return train_autoencoder(x, q, cfg).factors;
}

}  // namespace infcast
