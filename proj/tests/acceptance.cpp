// Acceptance suite: one PASS/FAIL line per criterion. With arguments, runs
// only the listed criteria (e.g. `mussels_acceptance 1 4 9`).

#include <sys/wait.h>

#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "mussels/commands.hpp"
#include "mussels/hankel.hpp"
#include "mussels/metrics.hpp"
#include "mussels/modl.hpp"
#include "mussels/nn.hpp"
#include "mussels/run_config.hpp"
#include "mussels/simulate.hpp"
#include "mussels/solvers.hpp"
#include "support.hpp"

using namespace mussels;
using namespace testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(char const* f, auto... args)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::MatrixXcd random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng)
{
  Eigen::MatrixXcd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) {
      m(i, j) = random_cplx(rng);
    }
  }
  return m;
}

// 1. <A x, y> = <x, A^H y> and <T(z), M> = <z, T^H(M)>.
Outcome adjoint_suite()
{
  Rng rng(101);
  long const counts[] = {1, 2, 4};
  std::pair<long, long> const grids[] = {{8, 8}, {16, 16}, {15, 9}};
  double worst_a = 0.0;
  double worst_t = 0.0;
  for (int t = 0; t < 100; ++t) {
    long const n = counts[t % 3];
    long const c = counts[(t / 3) % 3];
    auto const [rows, cols] = grids[(t / 9) % 3];
    AcquisitionOperator const op = random_op(n, c, rows, cols, rng);
    MultishotImage const x = random_multishot(n, rows, cols, rng);
    KspaceData const y = random_kspace(op, rng);
    double const gap = std::abs(inner(apply_A(op, x), y) - inner(x, apply_AH(op, y)));
    worst_a = std::max(worst_a, gap / (norm(x) * std::sqrt(norm_sq(y))));

    FilterSupport const sup{3, 3};
    HankelLift const tz = lift(x, sup);
    Eigen::MatrixXcd const m = random_matrix(tz.matrix.rows(), tz.matrix.cols(), rng);
    cplx const lhs = (tz.matrix.adjoint() * m).trace();
    cplx const rhs = inner(x, lift_adjoint(m, rows, cols, sup, n));
    worst_t = std::max(worst_t, std::abs(lhs - rhs) / (tz.matrix.norm() * m.norm()));
  }
  return {worst_a <= 1e-10 && worst_t <= 1e-10,
          fmt("100 instances, max relative gap A %.1e, lift %.1e", worst_a, worst_t)};
}

// z_i = fft2c(rho phi_i) with phi_i supported on the central 3x3 of k-space.
MultishotImage annihilable(long n, long rows, long cols, Rng& rng)
{
  ComplexImage const rho = random_image(rows, cols, rng);
  std::vector<ComplexImage> shots;
  for (long i = 0; i < n; ++i) {
    ComplexImage spec(rows, cols);
    for (long u = -1; u <= 1; ++u) {
      for (long v = -1; v <= 1; ++v) {
        spec(rows / 2 + u, cols / 2 + v) = random_cplx(rng);
      }
    }
    ComplexImage phi = ifft2c(spec);
    for (std::size_t k = 0; k < phi.size(); ++k) {
      phi.values()[k] *= rho.values()[k];
    }
    shots.push_back(fft2c(phi));
  }
  return MultishotImage(std::move(shots));
}

// 2. Lifts of phase-related shots are rank deficient.
Outcome annihilation_suite()
{
  Rng rng(202);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    long const n = t < 10 ? 2 : 4;
    MultishotImage const z = annihilable(n, 16, 16, rng);
    Eigen::VectorXd const s = Eigen::BDCSVD<Eigen::MatrixXcd>(lift(z, {3, 3}).matrix).singularValues();
    worst = std::max(worst, s(s.size() - 1) / s(0));
  }
  return {worst <= 1e-9, fmt("20 instances (N = 2, 4), max sigma_min/sigma_max %.1e", worst)};
}

// 3. compute_Q identities, majorization and eps refinement.
Outcome irls_identities()
{
  Rng rng(303);
  FilterSupport const sup{3, 3};
  bool ok = true;
  double worst_spec = 0.0;
  double worst_frob = 0.0;
  for (double eps : {1e-2, 1.0}) {
    for (long n : {1L, 2L, 4L}) {
      MultishotImage const z = random_multishot(n, 8, 8, rng);
      Eigen::MatrixXcd const q = compute_Q(z, sup, eps).q;
      Eigen::MatrixXcd const q2 = q * q;
      Eigen::MatrixXcd inv4 = (q2 * q2).inverse() - eps * Eigen::MatrixXcd::Identity(q.rows(), q.cols());
      inv4 = 0.5 * (inv4 + inv4.adjoint()).eval();
      Eigen::VectorXd const a = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(inv4).eigenvalues();
      Eigen::VectorXd const b = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(gram(z, sup)).eigenvalues();
      worst_spec = std::max(worst_spec, (a - b).cwiseAbs().maxCoeff() / b.maxCoeff());
    }
  }
  for (double eps : {1e-6, 1e-4, 1e-2, 1.0}) {
    for (long n : {1L, 2L, 4L}) {
      MultishotImage const z = random_multishot(n, 8, 8, rng);
      HankelLift const t = lift(z, sup);
      Eigen::VectorXd const s = Eigen::BDCSVD<Eigen::MatrixXcd>(t.matrix).singularValues();
      double ref = 0.0;
      for (double v : s) {
        ref += v * v / std::sqrt(v * v + eps);
      }
      double const tq = (t.matrix * compute_Q(z, sup, eps).q).squaredNorm();
      worst_frob = std::max(worst_frob, std::abs(tq - ref) / ref);
    }
  }
  ok = worst_spec <= 1e-9 && worst_frob <= 1e-9;

  int majorized = 0;
  for (int t = 0; t < 50; ++t) {
    long const n = long{1} << (t % 3);
    MultishotImage z = random_multishot(n, 8, 8, rng);
    scale(z, std::pow(10.0, rng.uniform(-3.0, 2.0)));
    double const eps = std::pow(10.0, -2.0 * (1 + t % 3));
    double const tq = (lift(z, sup).matrix * compute_Q(z, sup, eps).q).squaredNorm();
    double const slack = static_cast<double>(n * sup.size()) * std::sqrt(eps);
    majorized += nuclear_norm(z, sup) <= tq + slack ? 1 : 0;
  }
  ok = ok && majorized == 50;

  int monotone = 0;
  for (int t = 0; t < 10; ++t) {
    MultishotImage const z = random_multishot(2, 8, 8, rng);
    double const nuc = nuclear_norm(z, sup);
    double prev = std::numeric_limits<double>::infinity();
    bool mono = true;
    for (double eps : {1e-2, 1e-4, 1e-6}) {
      double const gap = nuc - (lift(z, sup).matrix * compute_Q(z, sup, eps).q).squaredNorm();
      mono = mono && gap < prev;
      prev = gap;
    }
    monotone += mono ? 1 : 0;
  }
  ok = ok && monotone == 10;
  return {ok, fmt("spectral %.1e, |TQ|^2 %.1e, majorized %d/50, eps-monotone %d/10", worst_spec, worst_frob,
                  majorized, monotone)};
}

// 4. Desk-scale IRLS gain over zero-filled and objective descent.
Outcome irls_desk()
{
  SimSpec spec;
  spec.seed = 0;
  Acquisition const acq = simulate_acquisition(gen_phantom(spec.rows, spec.cols, spec.seed), spec);
  SolverConfig const cfg;
  IrlsResult const res = irls_mussels(acq.y, acq.op, {3, 3}, cfg);
  double const gain = report(acq.truth, res.rho).mean_psnr - report(acq.truth, apply_AH(acq.op, acq.y)).mean_psnr;
  double worst = 0.0;
  auto const& rec = res.trace.records;
  for (std::size_t k = 1; k < rec.size(); ++k) {
    worst = std::max(worst, (rec[k].objective - rec[k - 1].objective) / rec[k - 1].objective);
  }
  return {gain >= 6.0 && worst <= 1e-6,
          fmt("64x64, N = 4, C = 4: gain %.2f dB (need 6), max relative objective rise %.1e", gain, worst)};
}

// Max over entries of |fd - analytic| relative to max |fd|, per tensor.
double fd_check(std::span<double> values, std::span<double const> analytic, std::function<double()> const& loss)
{
  double const h = 1e-6;
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double const v = values[i];
    values[i] = v + h;
    double const lp = loss();
    values[i] = v - h;
    double const lm = loss();
    values[i] = v;
    double const fd = (lp - lm) / (2 * h);
    err = std::max(err, std::abs(fd - analytic[i]));
    ref = std::max(ref, std::abs(fd));
  }
  return ref > 0.0 ? err / ref : err;
}

void perturb(std::vector<std::span<double>> const& tensors, double s, Rng& rng)
{
  for (auto t : tensors) {
    for (auto& v : t) {
      v += s * rng.normal();
    }
  }
}

// 5. Denoiser and unrolled-network gradients vs central differences.
Outcome gradient_suite()
{
  Rng rng(505);
  std::vector<long> const widths{4, 4};
  nn::DenoiserParams p = nn::make_denoiser(2, widths, rng);
  perturb(p.tensors(), 0.1, rng);
  MultishotImage x = random_multishot(2, 6, 6, rng);
  MultishotImage const w = random_multishot(2, 6, 6, rng);
  nn::DenoiserGrads const g = nn::denoiser_backward(x, p, w);
  auto dloss = [&] { return inner(w, nn::denoiser_forward(x, p)).real(); };
  double worst_nn = 0.0;
  auto pt = p.tensors();
  auto gt = g.param_grads.tensors();
  for (std::size_t k = 0; k < pt.size(); ++k) {
    worst_nn = std::max(worst_nn, fd_check(pt[k], gt[k], dloss));
  }
  for (long s = 0; s < 2; ++s) {
    auto* xs = reinterpret_cast<double*>(x[s].values().data());
    auto const* gs = reinterpret_cast<double const*>(g.input_grad[s].values().data());
    worst_nn = std::max(worst_nn, fd_check({xs, 2 * x[s].size()}, {gs, 2 * x[s].size()}, dloss));
  }

  double worst_modl = 0.0;
  for (auto mode : {UnrollMode::kspace_only, UnrollMode::hybrid}) {
    SimSpec spec;
    spec.rows = 8;
    spec.cols = 8;
    spec.n_shots = 2;
    spec.n_coils = 2;
    spec.seed = 55;
    Acquisition const acq = simulate_acquisition(gen_phantom(8, 8, spec.seed), spec);
    std::vector<long> const mw{3};
    ModlParams mp = make_modl_params(2, mw, 56);
    perturb(mp.tensors(), 0.05, rng);
    UnrollConfig cfg;
    cfg.n_unrolls = 1;
    cfg.mode = mode;
    UnrollTape tape;
    MultishotImage const out = unrolled_forward(acq.y, acq.op, mp, cfg, &tape);
    ModlParams const mg = unrolled_backward(tape, acq.op, mp, cfg, mse_loss_grad(out, acq.truth));
    auto mloss = [&] { return mse_loss(unrolled_forward(acq.y, acq.op, mp, cfg), acq.truth); };
    auto mt = mp.tensors();
    auto mgt = mg.tensors();
    std::size_t const n_used = mode == UnrollMode::hybrid ? mt.size() : mp.dk.tensors().size();
    for (std::size_t k = 0; k < n_used; ++k) {
      worst_modl = std::max(worst_modl, fd_check(mt[k], mgt[k], mloss));
    }
  }
  return {worst_nn <= 1e-5 && worst_modl <= 1e-4,
          fmt("denoiser %.1e (tol 1e-5), unrolled kspace/hybrid %.1e (tol 1e-4)", worst_nn, worst_modl)};
}

// 6. Fixed point, depth-independent parameters, DC layer vs dense solve.
Outcome modl_structure()
{
  Rng rng(606);
  // noiseless, fully sampled single-shot data
  AcquisitionOperator const full = random_op(1, 2, 8, 8, rng);
  MultishotImage const truth1 = random_multishot(1, 8, 8, rng);
  KspaceData const y1 = apply_A(full, truth1);
  std::vector<long> const widths{4, 4};
  ModlParams const zero = zeros_like(make_modl_params(1, widths, 6));
  double worst_fixed = 0.0;
  for (auto mode : {UnrollMode::kspace_only, UnrollMode::hybrid}) {
    MultishotImage one;
    for (int depth : {1, 3}) {
      UnrollConfig cfg;
      cfg.mode = mode;
      cfg.n_unrolls = depth;
      MultishotImage const out = unrolled_forward(y1, full, zero, cfg);
      worst_fixed = std::max(worst_fixed, rel_diff(out, truth1));
      if (depth == 1) {
        one = out;
      } else {
        worst_fixed = std::max(worst_fixed, rel_diff(out, one));
      }
    }
  }

  AcquisitionOperator const op = random_op(2, 2, 8, 8, rng);
  MultishotImage const truth = random_multishot(2, 8, 8, rng);
  KspaceData const y = apply_A(op, truth);

  ModlParams const p = make_modl_params(2, widths, 7);
  bool same_count = true;
  for (int depth : {1, 2, 3, 5}) {
    UnrollConfig cfg;
    cfg.n_unrolls = depth;
    UnrollTape tape;
    MultishotImage const out = unrolled_forward(y, op, p, cfg, &tape);
    same_count = same_count &&
                 unrolled_backward(tape, op, p, cfg, mse_loss_grad(out, truth)).param_count() == p.param_count();
  }

  MultishotImage const ahy = apply_AH(op, random_kspace(op, rng));
  MultishotImage const eta = random_multishot(2, 8, 8, rng);
  MultishotImage const zeta = random_multishot(2, 8, 8, rng);
  Eigen::MatrixXcd const m = assemble([&](MultishotImage const& v) { return normal_op(op, v, 0.06); }, 2, 8, 8);
  Eigen::VectorXcd const ref = m.ldlt().solve(to_vector(ahy) + 0.01 * to_vector(eta) + 0.05 * to_vector(zeta));
  double const dense = (to_vector(dc_layer(op, ahy, eta, zeta, 0.01, 0.05, 60)) - ref).cwiseAbs().maxCoeff();

  return {worst_fixed <= 1e-8 && same_count && dense <= 1e-7,
          fmt("fixed point %.1e, parameter count %s, DC vs dense %.1e", worst_fixed,
              same_count ? "constant" : "varies", dense)};
}

// Shared toy experiment for criteria 7 and 8.
struct Toy {
  RunConfig cfg;
  std::vector<TrainingExample> train;
  std::vector<TrainingExample> val;
  std::vector<RealImage> test_magnitudes;
  std::vector<std::uint64_t> test_seeds;
  std::map<UnrollMode, Checkpoint> nets;
  std::map<UnrollMode, TrainResult> runs;
};

constexpr long kToyTrain = 200;
constexpr long kToyVal = 20;
constexpr long kToyTest = 50;

TrainingExample toy_example(Toy const& toy, RealImage const& magnitude, std::uint64_t seed, double sigma)
{
  SimSpec spec = toy.cfg.sim;
  spec.seed = seed;
  spec.sigma = sigma;
  Acquisition acq = simulate_acquisition(magnitude, spec);
  return {std::move(acq.y), std::move(acq.truth), std::move(acq.op)};
}

Toy build_toy()
{
  Toy toy;
  toy.cfg.seed = 0;
  toy.cfg.sim.rows = 48;
  toy.cfg.sim.cols = 48;
  toy.cfg.sim.n_shots = 4;
  toy.cfg.sim.n_coils = 4;
  toy.cfg.sim.sigma = 0.001;
  toy.cfg.network.hidden_widths.assign(7, 8);
  for (long k = 0; k < kToyTrain + kToyVal + kToyTest; ++k) {
    std::uint64_t const seed = example_seed(toy.cfg.seed, k);
    RealImage magnitude = gen_phantom(48, 48, seed);
    if (k < kToyTrain + kToyVal) {
      (k < kToyTrain ? toy.train : toy.val).push_back(toy_example(toy, magnitude, seed, toy.cfg.sim.sigma));
    } else {
      toy.test_magnitudes.push_back(std::move(magnitude));
      toy.test_seeds.push_back(seed);
    }
  }
  for (auto mode : {UnrollMode::kspace_only, UnrollMode::hybrid}) {
    auto const t0 = Clock::now();
    UnrollConfig unroll = toy.cfg.unroll;
    unroll.mode = mode;
    ModlParams init = make_modl_params(4, toy.cfg.network.hidden_widths, init_seed(toy.cfg.seed));
    TrainConfig const tcfg{toy.cfg.train.epochs, toy.cfg.train.batch_size, toy.cfg.train.adam,
                           train_seed(toy.cfg.seed)};
    auto progress = [&](int epoch, ModlParams const&, std::vector<EpochLoss> const& h) {
      std::printf("  [train %s] epoch %2d  train %.4e  val %.4e  (%.0f s)\n", std::string(to_string(mode)).c_str(),
                  epoch, h.back().train_loss, h.back().val_loss, seconds_since(t0));
      std::fflush(stdout);
    };
    TrainResult res = train_modl(toy.train, toy.val, std::move(init), unroll, tcfg, progress);
    toy.nets[mode] = Checkpoint{unroll, toy.cfg.network.hidden_widths, res.params};
    toy.runs[mode] = std::move(res);
  }
  return toy;
}

struct MethodScore {
  double psnr = 0.0;
  double ssim = 0.0;
};

std::map<Method, MethodScore> score_test_set(Toy const& toy, double sigma, std::vector<Method> const& methods)
{
  std::map<Method, MethodScore> out;
  for (std::size_t k = 0; k < toy.test_magnitudes.size(); ++k) {
    TrainingExample const ex = toy_example(toy, toy.test_magnitudes[k], toy.test_seeds[k], sigma);
    for (Method m : methods) {
      Checkpoint const* ckpt = nullptr;
      if (m == Method::modl_kspace) {
        ckpt = &toy.nets.at(UnrollMode::kspace_only);
      } else if (m == Method::modl_hybrid) {
        ckpt = &toy.nets.at(UnrollMode::hybrid);
      }
      MetricReport const r = report(ex.truth, reconstruct(m, ex, toy.cfg, ckpt));
      out[m].psnr += r.mean_psnr / static_cast<double>(toy.test_magnitudes.size());
      out[m].ssim += r.mean_ssim / static_cast<double>(toy.test_magnitudes.size());
    }
  }
  return out;
}

// 7. Toy end-to-end training.
Outcome toy_training(Toy const& toy)
{
  auto const& kh = toy.runs.at(UnrollMode::hybrid).history;
  auto const& kk = toy.runs.at(UnrollMode::kspace_only).history;
  bool const decreased = kh.back().train_loss < kh.front().train_loss && kk.back().train_loss < kk.front().train_loss;
  auto const s = score_test_set(toy, toy.cfg.sim.sigma, {Method::zero_filled, Method::modl_kspace, Method::modl_hybrid});
  double const zf = s.at(Method::zero_filled).psnr;
  double const ks = s.at(Method::modl_kspace).psnr;
  double const hy = s.at(Method::modl_hybrid).psnr;
  return {decreased && hy > zf && hy >= ks,
          fmt("train loss hybrid %.3e -> %.3e, kspace %.3e -> %.3e; held-out PSNR zero-filled %.2f, "
              "kspace %.2f, hybrid %.2f dB",
              kh.front().train_loss, kh.back().train_loss, kk.front().train_loss, kk.back().train_loss, zf, ks, hy)};
}

// 8. Mean PSNR and SSIM fall as the noise level rises, for every method.
Outcome noise_monotonicity(Toy const& toy)
{
  std::vector<Method> const methods{Method::zero_filled, Method::irls, Method::modl_kspace, Method::modl_hybrid};
  std::vector<std::map<Method, MethodScore>> per_sigma;
  for (double sigma : {0.001, 0.002, 0.003}) {
    per_sigma.push_back(score_test_set(toy, sigma, methods));
  }
  bool ok = true;
  std::string detail;
  for (Method m : methods) {
    bool mono = true;
    for (std::size_t k = 1; k < per_sigma.size(); ++k) {
      mono = mono && per_sigma[k].at(m).psnr < per_sigma[k - 1].at(m).psnr &&
             per_sigma[k].at(m).ssim < per_sigma[k - 1].at(m).ssim;
    }
    ok = ok && mono;
    detail += fmt("%s%s %.4f/%.4f/%.4f dB, SSIM %.4f/%.4f/%.4f", detail.empty() ? "" : "; ",
                  std::string(to_string(m)).c_str(), per_sigma[0].at(m).psnr, per_sigma[1].at(m).psnr,
                  per_sigma[2].at(m).psnr, per_sigma[0].at(m).ssim, per_sigma[1].at(m).ssim, per_sigma[2].at(m).ssim);
    if (!mono) {
      detail += " (not monotone)";
    }
  }
  return {ok, detail};
}

std::string slurp(fs::path const& p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

bool same_tree(fs::path const& a, fs::path const& b)
{
  std::set<std::string> na;
  std::set<std::string> nb;
  for (auto const& e : fs::directory_iterator(a)) {
    na.insert(e.path().filename().string());
  }
  for (auto const& e : fs::directory_iterator(b)) {
    nb.insert(e.path().filename().string());
  }
  return na == nb && std::ranges::all_of(na, [&](auto const& n) { return slurp(a / n) == slurp(b / n); });
}

int run_cli(std::string const& args)
{
  std::string const cmd = std::string(MUSSELS_CLI) + " " + args + " >/dev/null 2>&1";
  int const status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 9. Every command re-run from its echoed config reproduces its outputs.
Outcome reproducibility()
{
  fs::path const dir = fs::temp_directory_path() / fmt("mussels_acceptance_%d", static_cast<int>(::getpid()));
  fs::create_directories(dir);
  RunConfig cfg;
  cfg.seed = 11;
  cfg.sim.rows = 24;
  cfg.sim.cols = 24;
  cfg.sim.sigma = 0.001;
  cfg.n_examples = 4;
  cfg.solver.outer_iters = 5;
  cfg.network.hidden_widths = {4, 4};
  cfg.train.epochs = 2;
  save_run_config(dir / "cfg.json", cfg);
  std::string const base = "--config " + (dir / "cfg.json").string();
  std::string const data = (dir / "data").string();
  std::string const ckpt = " --checkpoint " + (dir / "train" / "checkpoint.json").string();

  struct Cmd {
    std::string name;
    std::string first;
    std::string rerun;  // arguments besides --config and --out
  };
  std::vector<Cmd> const cmds{
      {"data", "simulate " + base, "simulate"},
      {"irls", "reconstruct " + base + " " + data + " --method irls", "reconstruct --method irls"},
      {"train", "train " + base + " " + data, "train"},
      {"evaluate", "evaluate " + base + " " + data + " --method zero-filled --method modl-hybrid" + ckpt,
       "evaluate --method zero-filled --method modl-hybrid" + ckpt},
  };
  int identical = 0;
  std::string failed;
  for (auto const& c : cmds) {
    fs::path const a = dir / c.name;
    fs::path const b = dir / (c.name + "_rerun");
    bool const ran = run_cli(c.first + " --out " + a.string()) == 0 &&
                     run_cli(c.rerun + " --config " + (a / "config.json").string() + " --out " + b.string()) == 0;
    if (ran && same_tree(a, b)) {
      ++identical;
    } else {
      failed += " " + c.name;
    }
  }
  fs::remove_all(dir);
  return {identical == static_cast<int>(cmds.size()),
          fmt("%d/%zu commands bit-identical on rerun", identical, cmds.size()) +
              (failed.empty() ? "" : ", differing:" + failed)};
}

}  // namespace

int main(int argc, char** argv)
{
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) {
    selected.insert(std::atoi(argv[k]));
  }
  auto want = [&](int c) { return selected.empty() || selected.contains(c); };

  std::optional<Toy> toy;
  auto toy_ref = [&]() -> Toy const& {
    if (!toy) {
      toy = build_toy();
    }
    return *toy;
  };

  std::vector<std::pair<char const*, std::function<Outcome()>>> const criteria{
      {"adjoint suite", adjoint_suite},
      {"annihilation suite", annihilation_suite},
      {"IRLS identities", irls_identities},
      {"IRLS desk reconstruction", irls_desk},
      {"gradient suite", gradient_suite},
      {"MoDL structure", modl_structure},
      {"toy training", [&] { return toy_training(toy_ref()); }},
      {"noise monotonicity", [&] { return noise_monotonicity(toy_ref()); }},
      {"reproducibility", reproducibility},
  };

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    int const id = static_cast<int>(k) + 1;
    if (!want(id)) {
      continue;
    }
    auto const t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (std::exception const& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("criterion %d %s: %s  %s  [%.1f s]\n", id, criteria[k].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
