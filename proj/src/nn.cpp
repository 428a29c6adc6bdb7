#include "mussels/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mussels/errors.hpp"
#include "mussels/simd.hpp"

namespace mussels::nn {

ConvLayer::ConvLayer(long out, long in, long kernel_h, long kernel_w, Activation act)
    : out_ch(out),
      in_ch(in),
      kh(kernel_h),
      kw(kernel_w),
      weights(static_cast<std::size_t>(out * in * kernel_h * kernel_w), 0.0),
      bias(static_cast<std::size_t>(out), 0.0),
      activation(act)
{
}

long DenoiserParams::param_count() const
{
  long n = 0;
  for (auto const& l : layers) {
    n += static_cast<long>(l.weights.size() + l.bias.size());
  }
  return n;
}

std::vector<std::span<double>> DenoiserParams::tensors()
{
  std::vector<std::span<double>> out;
  for (auto& l : layers) {
    out.emplace_back(l.weights);
    out.emplace_back(l.bias);
  }
  return out;
}

std::vector<std::span<double const>> DenoiserParams::tensors() const
{
  std::vector<std::span<double const>> out;
  for (auto const& l : layers) {
    out.emplace_back(l.weights);
    out.emplace_back(l.bias);
  }
  return out;
}

void DenoiserParams::validate() const
{
  if (io_channels < 2 || io_channels % 2 != 0) {
    throw DimensionError("denoiser: io_channels must be a positive even number");
  }
  if (layers.empty()) {
    throw DimensionError("denoiser: no layers");
  }
  long ch = io_channels;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto const& L = layers[l];
    if (L.in_ch != ch) {
      throw DimensionError("denoiser: layer " + std::to_string(l) + " expects " + std::to_string(L.in_ch) +
                           " channels but receives " + std::to_string(ch));
    }
    if (L.kh < 1 || L.kw < 1 || L.kh % 2 == 0 || L.kw % 2 == 0) {
      throw DimensionError("denoiser: layer " + std::to_string(l) + " kernel extents must be odd");
    }
    if (L.weights.size() != static_cast<std::size_t>(L.out_ch * L.in_ch * L.kh * L.kw) ||
        L.bias.size() != static_cast<std::size_t>(L.out_ch)) {
      throw DimensionError("denoiser: layer " + std::to_string(l) + " parameter sizes are inconsistent");
    }
    ch = L.out_ch;
  }
  if (ch != io_channels || layers.back().activation != Activation::none) {
    throw DimensionError("denoiser: last layer must be linear with io_channels outputs");
  }
}

bool operator==(DenoiserParams const& a, DenoiserParams const& b)
{
  if (a.io_channels != b.io_channels || a.layers.size() != b.layers.size()) {
    return false;
  }
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    auto const& x = a.layers[l];
    auto const& y = b.layers[l];
    if (x.out_ch != y.out_ch || x.in_ch != y.in_ch || x.kh != y.kh || x.kw != y.kw ||
        x.activation != y.activation || x.weights != y.weights || x.bias != y.bias) {
      return false;
    }
  }
  return true;
}

std::vector<long> default_widths() { return {64, 64, 64, 128, 128, 64, 64}; }

DenoiserParams make_denoiser(long n_shots, std::span<long const> hidden_widths, Rng& rng)
{
  if (n_shots < 1) {
    throw DimensionError("make_denoiser: need at least one shot");
  }
  DenoiserParams p;
  p.io_channels = 2 * n_shots;
  long in = p.io_channels;
  auto add = [&](long out, long k, Activation act) {
    ConvLayer L(out, in, k, k, act);
    double const fan_in = static_cast<double>(in * k * k);
    double const fan_out = static_cast<double>(out * k * k);
    double const limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& w : L.weights) {
      w = rng.uniform(-limit, limit);
    }
    p.layers.push_back(std::move(L));
    in = out;
  };
  for (long w : hidden_widths) {
    add(w, 3, Activation::relu);
  }
  add(p.io_channels, 1, Activation::none);
  return p;
}

DenoiserParams zeros_like(DenoiserParams const& params)
{
  DenoiserParams z = params;
  for (auto& l : z.layers) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
  return z;
}

namespace {

FeatureStack pad(FeatureStack const& x, long ph, long pw)
{
  FeatureStack out(x.channels, x.rows + 2 * ph, x.cols + 2 * pw);
  for (long c = 0; c < x.channels; ++c) {
    for (long r = 0; r < x.rows; ++r) {
      std::copy_n(x.channel(c) + r * x.cols, x.cols, out.channel(c) + (r + ph) * out.cols + pw);
    }
  }
  return out;
}

}  // namespace

FeatureStack conv2d(FeatureStack const& x, ConvLayer const& layer)
{
  if (x.channels != layer.in_ch) {
    throw DimensionError("conv2d: input has " + std::to_string(x.channels) + " channels, layer expects " +
                         std::to_string(layer.in_ch));
  }
  auto const& k = simd::kernels();
  long const H = x.rows;
  long const W = x.cols;
  FeatureStack out(layer.out_ch, H, W);
  for (long o = 0; o < layer.out_ch; ++o) {
    std::fill_n(out.channel(o), out.plane(), layer.bias[static_cast<std::size_t>(o)]);
  }
  if (layer.kh == 1 && layer.kw == 1) {
    for (long o = 0; o < layer.out_ch; ++o) {
      for (long i = 0; i < layer.in_ch; ++i) {
        k.axpy(layer.weight(o, i, 0, 0), x.channel(i), out.channel(o), static_cast<std::size_t>(x.plane()));
      }
    }
  } else {
    FeatureStack const xp = pad(x, layer.kh / 2, layer.kw / 2);
    for (long o = 0; o < layer.out_ch; ++o) {
      for (long i = 0; i < layer.in_ch; ++i) {
        for (long ky = 0; ky < layer.kh; ++ky) {
          for (long y = 0; y < H; ++y) {
            double const* src = xp.channel(i) + (y + ky) * xp.cols;
            double* dst = out.channel(o) + y * W;
            if (layer.kw == 3) {
              k.axpy3(layer.weight(o, i, ky, 0), layer.weight(o, i, ky, 1), layer.weight(o, i, ky, 2), src,
                      dst, static_cast<std::size_t>(W));
            } else {
              for (long kx = 0; kx < layer.kw; ++kx) {
                k.axpy(layer.weight(o, i, ky, kx), src + kx, dst, static_cast<std::size_t>(W));
              }
            }
          }
        }
      }
    }
  }
  if (layer.activation == Activation::relu) {
    k.relu(out.data.data(), out.data.size());
  }
  return out;
}

namespace {

// Gradient of one layer. g is the gradient w.r.t. the layer output (after
// activation); it is masked in place by the ReLU derivative.
FeatureStack conv2d_backward(FeatureStack const& x, FeatureStack const& y, ConvLayer const& layer,
                             FeatureStack& g, ConvLayer& grads, bool need_input_grad)
{
  auto const& k = simd::kernels();
  long const H = x.rows;
  long const W = x.cols;
  if (layer.activation == Activation::relu) {
    for (std::size_t p = 0; p < g.data.size(); ++p) {
      if (!(y.data[p] > 0.0)) {
        g.data[p] = 0.0;
      }
    }
  }
  for (long o = 0; o < layer.out_ch; ++o) {
    double s = 0.0;
    double const* go = g.channel(o);
    for (long p = 0; p < g.plane(); ++p) {
      s += go[p];
    }
    grads.bias[static_cast<std::size_t>(o)] += s;
  }
  FeatureStack gin;
  if (need_input_grad) {
    gin = FeatureStack(layer.in_ch, H, W);
  }
  if (layer.kh == 1 && layer.kw == 1) {
    auto const n = static_cast<std::size_t>(x.plane());
    for (long o = 0; o < layer.out_ch; ++o) {
      for (long i = 0; i < layer.in_ch; ++i) {
        grads.weight(o, i, 0, 0) += k.dot(g.channel(o), x.channel(i), n);
        if (need_input_grad) {
          k.axpy(layer.weight(o, i, 0, 0), g.channel(o), gin.channel(i), n);
        }
      }
    }
    return gin;
  }
  long const ph = layer.kh / 2;
  long const pw = layer.kw / 2;
  FeatureStack const xp = pad(x, ph, pw);
  for (long o = 0; o < layer.out_ch; ++o) {
    for (long i = 0; i < layer.in_ch; ++i) {
      for (long ky = 0; ky < layer.kh; ++ky) {
        for (long y0 = 0; y0 < H; ++y0) {
          double const* grow = g.channel(o) + y0 * W;
          double const* xrow = xp.channel(i) + (y0 + ky) * xp.cols;
          if (layer.kw == 3) {
            k.dot3(grow, xrow, static_cast<std::size_t>(W), &grads.weight(o, i, ky, 0));
          } else {
            for (long kx = 0; kx < layer.kw; ++kx) {
              grads.weight(o, i, ky, kx) += k.dot(grow, xrow + kx, static_cast<std::size_t>(W));
            }
          }
        }
      }
    }
  }
  if (need_input_grad) {
    // correlation of the padded output gradient with the flipped kernel
    FeatureStack const gp = pad(g, ph, pw);
    for (long i = 0; i < layer.in_ch; ++i) {
      for (long o = 0; o < layer.out_ch; ++o) {
        for (long ky = 0; ky < layer.kh; ++ky) {
          for (long y0 = 0; y0 < H; ++y0) {
            double const* src = gp.channel(o) + (y0 - ky + 2 * ph) * gp.cols;
            double* dst = gin.channel(i) + y0 * W;
            if (layer.kw == 3) {
              k.axpy3(layer.weight(o, i, ky, 2), layer.weight(o, i, ky, 1), layer.weight(o, i, ky, 0), src,
                      dst, static_cast<std::size_t>(W));
            } else {
              for (long kx = 0; kx < layer.kw; ++kx) {
                k.axpy(layer.weight(o, i, ky, kx), src + 2 * pw - kx, dst, static_cast<std::size_t>(W));
              }
            }
          }
        }
      }
    }
  }
  return gin;
}

}  // namespace

FeatureStack to_channels(MultishotImage const& x)
{
  long const n = x.n_shots();
  FeatureStack f(2 * n, x.rows(), x.cols());
  for (long s = 0; s < n; ++s) {
    auto v = x[s].values();
    double* re = f.channel(s);
    double* im = f.channel(n + s);
    for (std::size_t p = 0; p < v.size(); ++p) {
      re[p] = v[p].real();
      im[p] = v[p].imag();
    }
  }
  return f;
}

MultishotImage from_channels(FeatureStack const& f)
{
  if (f.channels < 2 || f.channels % 2 != 0) {
    throw DimensionError("from_channels: channel count must be even");
  }
  long const n = f.channels / 2;
  MultishotImage x(n, f.rows, f.cols);
  for (long s = 0; s < n; ++s) {
    auto v = x[s].values();
    double const* re = f.channel(s);
    double const* im = f.channel(n + s);
    for (std::size_t p = 0; p < v.size(); ++p) {
      v[p] = {re[p], im[p]};
    }
  }
  return x;
}

MultishotImage denoiser_forward(MultishotImage const& x, DenoiserParams const& params, DenoiserTape* tape)
{
  if (2 * x.n_shots() != params.io_channels) {
    throw DimensionError("denoiser_forward: " + std::to_string(x.n_shots()) + " shots for a network with " +
                         std::to_string(params.io_channels) + " io channels");
  }
  FeatureStack f = to_channels(x);
  if (tape != nullptr) {
    tape->activations.clear();
    tape->activations.push_back(f);
  }
  for (auto const& layer : params.layers) {
    f = conv2d(f, layer);
    if (tape != nullptr) {
      tape->activations.push_back(f);
    }
  }
  return x - from_channels(f);
}

MultishotImage denoiser_backward(DenoiserTape const& tape, DenoiserParams const& params,
                                 MultishotImage const& upstream, DenoiserParams& grads)
{
  if (tape.activations.size() != params.layers.size() + 1) {
    throw DimensionError("denoiser_backward: tape does not match the network");
  }
  // output = x - CNN(x)
  FeatureStack g = to_channels(upstream);
  for (auto& v : g.data) {
    v = -v;
  }
  for (long l = static_cast<long>(params.layers.size()) - 1; l >= 0; --l) {
    auto const idx = static_cast<std::size_t>(l);
    g = conv2d_backward(tape.activations[idx], tape.activations[idx + 1], params.layers[idx], g,
                        grads.layers[idx], true);
  }
  return upstream + from_channels(g);
}

DenoiserGrads denoiser_backward(MultishotImage const& x, DenoiserParams const& params,
                                MultishotImage const& upstream)
{
  DenoiserTape tape;
  denoiser_forward(x, params, &tape);
  DenoiserGrads out;
  out.param_grads = zeros_like(params);
  out.input_grad = denoiser_backward(tape, params, upstream, out.param_grads);
  return out;
}

AdamState make_adam_state(std::span<std::span<double> const> params, AdamConfig config)
{
  AdamState s;
  s.config = config;
  for (auto const& p : params) {
    s.m.emplace_back(p.size(), 0.0);
    s.v.emplace_back(p.size(), 0.0);
  }
  return s;
}

void adam_step(std::span<std::span<double> const> params, std::span<std::span<double const> const> grads,
               AdamState& state)
{
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw DimensionError("adam_step: parameter, gradient and state lists differ in length");
  }
  state.step += 1;
  auto const& c = state.config;
  double const t = static_cast<double>(state.step);
  double const bc1 = 1.0 - std::pow(c.beta1, t);
  double const bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k];
    auto g = grads[k];
    auto& m = state.m[k];
    auto& v = state.v[k];
    if (p.size() != g.size() || p.size() != m.size()) {
      throw DimensionError("adam_step: tensor " + std::to_string(k) + " shape mismatch");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      double const mh = m[i] / bc1;
      double const vh = v[i] / bc2;
      p[i] -= c.step_size * mh / (std::sqrt(vh) + c.eps);
    }
  }
}

}  // namespace mussels::nn
