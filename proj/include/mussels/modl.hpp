#pragma once

// Unrolled model-based networks: alternate learned denoisers (k-space D_k,
// optionally image-domain D_I) with conjugate-gradient data consistency.
// Network weights are shared across unrolls.

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "mussels/forward_model.hpp"
#include "mussels/nn.hpp"
#include "mussels/solvers.hpp"

namespace mussels {

enum class UnrollMode { kspace_only, hybrid };

std::string_view to_string(UnrollMode mode);
UnrollMode parse_unroll_mode(std::string_view name);

struct UnrollConfig {
  int n_unrolls = 3;
  int cg_iters = 5;
  double lambda1 = 0.01;
  double lambda2 = 0.05;
  UnrollMode mode = UnrollMode::hybrid;

  void validate() const;  // throws ConfigError
  // Weight of the image prior actually used (0 in kspace-only mode).
  double image_weight() const { return mode == UnrollMode::hybrid ? lambda2 : 0.0; }
};

struct ModlParams {
  nn::DenoiserParams dk;
  nn::DenoiserParams di;

  long param_count() const { return dk.param_count() + di.param_count(); }
  std::vector<std::span<double>> tensors();
  std::vector<std::span<double const>> tensors() const;

  friend bool operator==(ModlParams const&, ModlParams const&) = default;
};

ModlParams make_modl_params(long n_shots, std::span<long const> hidden_widths, std::uint64_t seed);
ModlParams zeros_like(ModlParams const& params);

// ifft2c . D_k . fft2c; the CNN sees all 2N k-space channels jointly.
MultishotImage dk_apply(MultishotImage const& rho, nn::DenoiserParams const& params,
                        nn::DenoiserTape* tape = nullptr);

// (A^H A + (l1 + l2) I)^-1 (A^H y + l1 eta + l2 zeta), CG warm-started at eta.
MultishotImage dc_layer(AcquisitionOperator const& op, MultishotImage const& ahy, MultishotImage const& eta,
                        MultishotImage const& zeta, double lambda1, double lambda2, int cg_iters,
                        CgTape* tape = nullptr);

// Everything the backward pass needs from one unrolled forward evaluation.
struct UnrollTape {
  struct Step {
    nn::DenoiserTape dk;
    nn::DenoiserTape di;
    CgTape cg;
  };
  std::vector<Step> steps;
};

MultishotImage unrolled_forward(KspaceData const& y, AcquisitionOperator const& op, ModlParams const& params,
                                UnrollConfig const& cfg, UnrollTape* tape = nullptr);

// Forward pass with a separate parameter set per unroll (length n_unrolls).
// With identical copies it equals unrolled_forward.
MultishotImage unrolled_forward_untied(KspaceData const& y, AcquisitionOperator const& op,
                                       std::span<ModlParams const> per_unroll, UnrollConfig const& cfg,
                                       UnrollTape* tape = nullptr);

// Gradients of a real loss w.r.t. each unroll's parameter copy, given the loss
// gradient w.r.t. the network output.
std::vector<ModlParams> unrolled_backward_untied(UnrollTape const& tape, AcquisitionOperator const& op,
                                                 std::span<ModlParams const> per_unroll,
                                                 UnrollConfig const& cfg, MultishotImage const& loss_grad);

// Shared-parameter gradient: the sum of the per-unroll contributions.
ModlParams unrolled_backward(UnrollTape const& tape, AcquisitionOperator const& op, ModlParams const& params,
                             UnrollConfig const& cfg, MultishotImage const& loss_grad);

// Mean squared error over complex samples, and its gradient.
double mse_loss(MultishotImage const& out, MultishotImage const& truth);
MultishotImage mse_loss_grad(MultishotImage const& out, MultishotImage const& truth);

struct TrainingExample {
  KspaceData y;
  MultishotImage truth;
  AcquisitionOperator op;
};

struct TrainConfig {
  int epochs = 30;
  int batch_size = 4;
  nn::AdamConfig adam;
  std::uint64_t seed = 0;
};

struct EpochLoss {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ModlParams params;
  std::vector<EpochLoss> history;  // epoch 0 is the untrained evaluation
};

double mean_loss(std::span<TrainingExample const> data, ModlParams const& params, UnrollConfig const& cfg);

// Adam over minibatch MSE. Throws NumericalError if a loss goes non-finite;
// on_epoch (optional) sees the parameters after every completed epoch.
TrainResult train_modl(std::span<TrainingExample const> train, std::span<TrainingExample const> val,
                       ModlParams params, UnrollConfig const& cfg, TrainConfig const& tcfg,
                       std::function<void(int, ModlParams const&, std::vector<EpochLoss> const&)> const&
                           on_epoch = {});

}  // namespace mussels
