#include "mussels/modl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mussels/errors.hpp"

namespace mussels {

std::string_view to_string(UnrollMode mode) { return mode == UnrollMode::hybrid ? "hybrid" : "kspace-only"; }

UnrollMode parse_unroll_mode(std::string_view name)
{
  if (name == "hybrid") {
    return UnrollMode::hybrid;
  }
  if (name == "kspace-only") {
    return UnrollMode::kspace_only;
  }
  throw ConfigError("unknown unroll mode '" + std::string(name) + "'");
}

void UnrollConfig::validate() const
{
  if (n_unrolls < 1 || cg_iters < 1) {
    throw ConfigError("unroll: n_unrolls and cg_iters must be at least 1");
  }
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) {
    throw ConfigError("unroll: lambda1 and lambda2 must be non-negative");
  }
  if (mode == UnrollMode::hybrid && !(lambda1 > 0.0 && lambda2 > 0.0)) {
    throw ConfigError("unroll: hybrid mode needs lambda1 > 0 and lambda2 > 0");
  }
}

std::vector<std::span<double>> ModlParams::tensors()
{
  auto out = dk.tensors();
  auto more = di.tensors();
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

std::vector<std::span<double const>> ModlParams::tensors() const
{
  auto out = dk.tensors();
  auto more = di.tensors();
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

ModlParams make_modl_params(long n_shots, std::span<long const> hidden_widths, std::uint64_t seed)
{
  Rng dk_rng = Rng::stream(seed, "init/dk");
  Rng di_rng = Rng::stream(seed, "init/di");
  return {nn::make_denoiser(n_shots, hidden_widths, dk_rng), nn::make_denoiser(n_shots, hidden_widths, di_rng)};
}

ModlParams zeros_like(ModlParams const& params) { return {nn::zeros_like(params.dk), nn::zeros_like(params.di)}; }

MultishotImage dk_apply(MultishotImage const& rho, nn::DenoiserParams const& params, nn::DenoiserTape* tape)
{
  return ifft2c(nn::denoiser_forward(fft2c(rho), params, tape));
}

MultishotImage dc_layer(AcquisitionOperator const& op, MultishotImage const& ahy, MultishotImage const& eta,
                        MultishotImage const& zeta, double lambda1, double lambda2, int cg_iters, CgTape* tape)
{
  double const shift = lambda1 + lambda2;
  MultishotImage rhs = ahy;
  if (lambda1 != 0.0) {
    axpy(lambda1, eta, rhs);
  }
  if (lambda2 != 0.0) {
    axpy(lambda2, zeta, rhs);
  }
  LinearOperator const normal = [&](MultishotImage const& x) { return normal_op(op, x, shift); };
  return conjugate_gradient(normal, rhs, eta, cg_iters, 0.0, tape).x;
}

MultishotImage unrolled_forward_untied(KspaceData const& y, AcquisitionOperator const& op,
                                       std::span<ModlParams const> per_unroll, UnrollConfig const& cfg,
                                       UnrollTape* tape)
{
  cfg.validate();
  if (static_cast<int>(per_unroll.size()) != cfg.n_unrolls) {
    throw DimensionError("unrolled_forward: expected one parameter set per unroll");
  }
  bool const hybrid = cfg.mode == UnrollMode::hybrid;
  double const l2 = cfg.image_weight();
  MultishotImage const ahy = apply_AH(op, y);
  if (tape != nullptr) {
    tape->steps.assign(static_cast<std::size_t>(cfg.n_unrolls), {});
  }
  MultishotImage rho = ahy;
  for (int n = 0; n < cfg.n_unrolls; ++n) {
    auto const& p = per_unroll[static_cast<std::size_t>(n)];
    auto* step = tape != nullptr ? &tape->steps[static_cast<std::size_t>(n)] : nullptr;
    MultishotImage const eta = dk_apply(rho, p.dk, step != nullptr ? &step->dk : nullptr);
    MultishotImage zeta;
    if (hybrid) {
      zeta = nn::denoiser_forward(rho, p.di, step != nullptr ? &step->di : nullptr);
    }
    rho = dc_layer(op, ahy, eta, zeta, cfg.lambda1, l2, cfg.cg_iters, step != nullptr ? &step->cg : nullptr);
    if (!all_finite(rho)) {
      throw NumericalError("unrolled_forward: non-finite iterate after unroll " + std::to_string(n + 1));
    }
  }
  return rho;
}

MultishotImage unrolled_forward(KspaceData const& y, AcquisitionOperator const& op, ModlParams const& params,
                                UnrollConfig const& cfg, UnrollTape* tape)
{
  cfg.validate();
  std::vector<ModlParams> tied(static_cast<std::size_t>(cfg.n_unrolls), params);
  return unrolled_forward_untied(y, op, tied, cfg, tape);
}

std::vector<ModlParams> unrolled_backward_untied(UnrollTape const& tape, AcquisitionOperator const& op,
                                                 std::span<ModlParams const> per_unroll,
                                                 UnrollConfig const& cfg, MultishotImage const& loss_grad)
{
  cfg.validate();
  if (static_cast<int>(tape.steps.size()) != cfg.n_unrolls ||
      static_cast<int>(per_unroll.size()) != cfg.n_unrolls) {
    throw DimensionError("unrolled_backward: tape or parameter list does not match n_unrolls");
  }
  bool const hybrid = cfg.mode == UnrollMode::hybrid;
  double const l1 = cfg.lambda1;
  double const l2 = cfg.image_weight();
  LinearOperator const normal = [&](MultishotImage const& x) { return normal_op(op, x, l1 + l2); };

  std::vector<ModlParams> grads;
  grads.reserve(per_unroll.size());
  for (auto const& p : per_unroll) {
    grads.push_back(zeros_like(p));
  }
  MultishotImage rho_bar = loss_grad;
  for (int n = cfg.n_unrolls - 1; n >= 0; --n) {
    auto const idx = static_cast<std::size_t>(n);
    auto const& step = tape.steps[idx];
    CgAdjoint const adj = conjugate_gradient_backward(normal, step.cg, rho_bar);
    // rhs = A^H y + l1 eta + l2 zeta, x0 = eta
    MultishotImage eta_bar = adj.x0_grad;
    axpy(l1, adj.rhs_grad, eta_bar);
    MultishotImage prev = ifft2c(nn::denoiser_backward(step.dk, per_unroll[idx].dk, fft2c(eta_bar), grads[idx].dk));
    if (hybrid) {
      MultishotImage const zeta_bar = l2 * adj.rhs_grad;
      axpy(1.0, nn::denoiser_backward(step.di, per_unroll[idx].di, zeta_bar, grads[idx].di), prev);
    }
    rho_bar = std::move(prev);
  }
  return grads;
}

namespace {

void accumulate(ModlParams& into, ModlParams const& g, double w = 1.0)
{
  auto dst = into.tensors();
  auto src = g.tensors();
  for (std::size_t t = 0; t < dst.size(); ++t) {
    for (std::size_t i = 0; i < dst[t].size(); ++i) {
      dst[t][i] += w * src[t][i];
    }
  }
}

}  // namespace

ModlParams unrolled_backward(UnrollTape const& tape, AcquisitionOperator const& op, ModlParams const& params,
                             UnrollConfig const& cfg, MultishotImage const& loss_grad)
{
  std::vector<ModlParams> tied(static_cast<std::size_t>(cfg.n_unrolls), params);
  auto const per = unrolled_backward_untied(tape, op, tied, cfg, loss_grad);
  ModlParams total = zeros_like(params);
  for (auto const& g : per) {
    accumulate(total, g);
  }
  return total;
}

double mse_loss(MultishotImage const& out, MultishotImage const& truth)
{
  MultishotImage const d = out - truth;
  return norm_sq(d) / static_cast<double>(d.size());
}

MultishotImage mse_loss_grad(MultishotImage const& out, MultishotImage const& truth)
{
  MultishotImage d = out - truth;
  scale(d, 2.0 / static_cast<double>(d.size()));
  return d;
}

double mean_loss(std::span<TrainingExample const> data, ModlParams const& params, UnrollConfig const& cfg)
{
  if (data.empty()) {
    return 0.0;
  }
  double s = 0.0;
  for (auto const& ex : data) {
    s += mse_loss(unrolled_forward(ex.y, ex.op, params, cfg), ex.truth);
  }
  return s / static_cast<double>(data.size());
}

TrainResult train_modl(std::span<TrainingExample const> train, std::span<TrainingExample const> val,
                       ModlParams params, UnrollConfig const& cfg, TrainConfig const& tcfg,
                       std::function<void(int, ModlParams const&, std::vector<EpochLoss> const&)> const& on_epoch)
{
  cfg.validate();
  if (tcfg.epochs < 0 || tcfg.batch_size < 1) {
    throw ConfigError("train: epochs must be >= 0 and batch_size >= 1");
  }
  TrainResult res;
  res.history.push_back({0, mean_loss(train, params, cfg), mean_loss(val, params, cfg)});
  if (tcfg.epochs == 0 || train.empty()) {
    res.params = std::move(params);
    return res;
  }
  auto ptensors = params.tensors();
  nn::AdamState adam = nn::make_adam_state(ptensors, tcfg.adam);
  std::vector<std::size_t> order(train.size());
  std::vector<ModlParams> tied(static_cast<std::size_t>(cfg.n_unrolls));

  for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle = Rng::stream(tcfg.seed, "train/shuffle/" + std::to_string(epoch));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.below(i)]);
    }
    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(tcfg.batch_size)) {
      std::size_t const stop = std::min(order.size(), start + static_cast<std::size_t>(tcfg.batch_size));
      double const w = 1.0 / static_cast<double>(stop - start);
      std::fill(tied.begin(), tied.end(), params);
      ModlParams grad = zeros_like(params);
      double batch_loss = 0.0;
      for (std::size_t b = start; b < stop; ++b) {
        auto const& ex = train[order[b]];
        UnrollTape tape;
        MultishotImage const out = unrolled_forward_untied(ex.y, ex.op, tied, cfg, &tape);
        double const loss = mse_loss(out, ex.truth);
        if (!std::isfinite(loss)) {
          throw NumericalError("train_modl: non-finite loss in epoch " + std::to_string(epoch));
        }
        batch_loss += w * loss;
        for (auto const& g : unrolled_backward_untied(tape, ex.op, tied, cfg, mse_loss_grad(out, ex.truth))) {
          accumulate(grad, g, w);
        }
      }
      auto const gt = static_cast<ModlParams const&>(grad).tensors();
      nn::adam_step(ptensors, gt, adam);
      loss_sum += batch_loss;
      ++batches;
    }
    double const val_loss = mean_loss(val, params, cfg);
    double const train_loss = loss_sum / batches;
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      throw NumericalError("train_modl: non-finite loss in epoch " + std::to_string(epoch));
    }
    res.history.push_back({epoch, train_loss, val_loss});
    if (on_epoch) {
      on_epoch(epoch, params, res.history);
    }
  }
  res.params = std::move(params);
  return res;
}

}  // namespace mussels
