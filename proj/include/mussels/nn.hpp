#pragma once

// Minimal convolutional network: same-size zero-padded convolutions, ReLU,
// exact reverse-mode gradients, and Adam. Everything runs in double precision.

#include <span>
#include <vector>

#include "mussels/random.hpp"
#include "mussels/tensor.hpp"

namespace mussels::nn {

enum class Activation { relu, none };

// Channel-major stack of real feature maps.
struct FeatureStack {
  long channels = 0;
  long rows = 0;
  long cols = 0;
  std::vector<double> data;

  FeatureStack() = default;
  FeatureStack(long c, long r, long w)
      : channels(c), rows(r), cols(w), data(static_cast<std::size_t>(c * r * w), 0.0) {}

  long plane() const { return rows * cols; }
  double* channel(long c) { return data.data() + c * plane(); }
  double const* channel(long c) const { return data.data() + c * plane(); }
  double& at(long c, long r, long w) { return data[static_cast<std::size_t>((c * rows + r) * cols + w)]; }
  double at(long c, long r, long w) const { return data[static_cast<std::size_t>((c * rows + r) * cols + w)]; }
};

struct ConvLayer {
  long out_ch = 0;
  long in_ch = 0;
  long kh = 3;
  long kw = 3;
  std::vector<double> weights;  // (out_ch, in_ch, kh, kw)
  std::vector<double> bias;     // (out_ch)
  Activation activation = Activation::relu;

  ConvLayer() = default;
  ConvLayer(long out, long in, long kernel_h, long kernel_w, Activation act);

  double& weight(long o, long i, long y, long x)
  {
    return weights[static_cast<std::size_t>(((o * in_ch + i) * kh + y) * kw + x)];
  }
  double weight(long o, long i, long y, long x) const
  {
    return weights[static_cast<std::size_t>(((o * in_ch + i) * kh + y) * kw + x)];
  }
};

// Residual denoiser D(x) = x - CNN(x). Complex shots enter as 2N real
// channels: real parts of all shots, then imaginary parts.
struct DenoiserParams {
  long io_channels = 0;
  std::vector<ConvLayer> layers;

  long n_shots() const { return io_channels / 2; }
  long param_count() const;
  std::vector<std::span<double>> tensors();
  std::vector<std::span<double const>> tensors() const;

  void validate() const;  // throws DimensionError on an inconsistent ladder

  friend bool operator==(DenoiserParams const& a, DenoiserParams const& b);
};

// Hidden widths of the default eight-layer ladder (3x3 + ReLU each); a final
// 1x1 linear layer maps back to 2N channels.
std::vector<long> default_widths();

// Xavier-uniform weights, zero biases.
DenoiserParams make_denoiser(long n_shots, std::span<long const> hidden_widths, Rng& rng);
DenoiserParams zeros_like(DenoiserParams const& params);

FeatureStack conv2d(FeatureStack const& x, ConvLayer const& layer);

FeatureStack to_channels(MultishotImage const& x);
MultishotImage from_channels(FeatureStack const& f);

// Layer inputs of one forward pass (input to layer l is outputs[l]).
struct DenoiserTape {
  std::vector<FeatureStack> activations;
};

MultishotImage denoiser_forward(MultishotImage const& x, DenoiserParams const& params,
                                DenoiserTape* tape = nullptr);

// Backpropagates upstream through a recorded pass; parameter gradients are
// added into grads. Returns the gradient with respect to the input.
MultishotImage denoiser_backward(DenoiserTape const& tape, DenoiserParams const& params,
                                 MultishotImage const& upstream, DenoiserParams& grads);

struct DenoiserGrads {
  MultishotImage input_grad;
  DenoiserParams param_grads;
};

DenoiserGrads denoiser_backward(MultishotImage const& x, DenoiserParams const& params,
                                MultishotImage const& upstream);

struct AdamConfig {
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  long step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

AdamState make_adam_state(std::span<std::span<double> const> params, AdamConfig config = {});

// One bias-corrected Adam update, in place.
void adam_step(std::span<std::span<double> const> params, std::span<std::span<double const> const> grads,
               AdamState& state);

}  // namespace mussels::nn
