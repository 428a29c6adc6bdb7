#include "mussels/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "mussels/errors.hpp"

namespace mussels {

CgResult conjugate_gradient(LinearOperator const& op, MultishotImage const& rhs, MultishotImage x0,
                            int max_iters, double tol, CgTape* tape)
{
  if (!x0.same_shape(rhs)) {
    throw DimensionError("conjugate_gradient: x0 and rhs differ in shape");
  }
  if (!(tol >= 0.0)) {
    throw ConfigError("conjugate_gradient: tolerance must be non-negative");
  }
  CgResult res;
  res.x = std::move(x0);
  MultishotImage r = rhs - op(res.x);
  MultishotImage p = r;
  double rs = norm_sq(r);
  double const target = tol * norm(rhs);
  if (!std::isfinite(rs)) {
    throw NumericalError("conjugate_gradient: non-finite residual at iteration 0");
  }
  res.residual_norms.push_back(std::sqrt(rs));
  if (tape != nullptr) {
    *tape = CgTape{};
    tape->r.push_back(r);
    tape->p.push_back(p);
    tape->rs.push_back(rs);
  }
  res.converged = std::sqrt(rs) <= target;
  for (int k = 0; k < max_iters && !res.converged && rs > 0.0; ++k) {
    MultishotImage q = op(p);
    double const den = inner(p, q).real();
    if (!std::isfinite(den)) {
      throw NumericalError("conjugate_gradient: non-finite curvature at iteration " + std::to_string(k + 1));
    }
    if (den <= 0.0) {
      break;
    }
    double const alpha = rs / den;
    axpy(alpha, p, res.x);
    axpy(-alpha, q, r);
    double const rs_next = norm_sq(r);
    if (!std::isfinite(rs_next)) {
      throw NumericalError("conjugate_gradient: non-finite residual at iteration " + std::to_string(k + 1));
    }
    double const beta = rs_next / rs;
    scale(p, beta);
    axpy(1.0, r, p);
    rs = rs_next;
    res.residual_norms.push_back(std::sqrt(rs));
    ++res.iterations;
    res.converged = std::sqrt(rs) <= target;
    if (tape != nullptr) {
      tape->q.push_back(std::move(q));
      tape->den.push_back(den);
      tape->alpha.push_back(alpha);
      tape->beta.push_back(beta);
      tape->r.push_back(r);
      tape->p.push_back(p);
      tape->rs.push_back(rs);
    }
  }
  return res;
}

CgAdjoint conjugate_gradient_backward(LinearOperator const& op, CgTape const& tape,
                                      MultishotImage const& x_grad)
{
  int const K = tape.iterations();
  // x_{k+1} = x_k + alpha_k p_k, so the x adjoint is the same at every step.
  MultishotImage const& xb = x_grad;
  MultishotImage rb = zeros_like(x_grad);  // adjoint of r_{k+1}
  MultishotImage pb = zeros_like(x_grad);  // adjoint of p_{k+1}
  double rsb = 0.0;                         // adjoint of rs_{k+1}
  for (int k = K - 1; k >= 0; --k) {
    auto const& r_next = tape.r[static_cast<std::size_t>(k + 1)];
    auto const& pk = tape.p[static_cast<std::size_t>(k)];
    auto const& qk = tape.q[static_cast<std::size_t>(k)];
    double const rs_k = tape.rs[static_cast<std::size_t>(k)];
    double const rs_next = tape.rs[static_cast<std::size_t>(k + 1)];
    double const alpha = tape.alpha[static_cast<std::size_t>(k)];
    double const beta = tape.beta[static_cast<std::size_t>(k)];
    double const den = tape.den[static_cast<std::size_t>(k)];

    // p_{k+1} = r_{k+1} + beta p_k
    axpy(1.0, pb, rb);
    double const betab = inner(pk, pb).real();
    MultishotImage pkb = beta * pb;
    // beta = rs_{k+1} / rs_k
    rsb += betab / rs_k;
    double rskb = -betab * rs_next / (rs_k * rs_k);
    // rs_{k+1} = |r_{k+1}|^2
    axpy(2.0 * rsb, r_next, rb);
    // r_{k+1} = r_k - alpha q_k
    MultishotImage qkb = (-alpha) * rb;
    double alphab = -inner(qk, rb).real();
    // x_{k+1} = x_k + alpha p_k
    axpy(alpha, xb, pkb);
    alphab += inner(pk, xb).real();
    // alpha = rs_k / den
    rskb += alphab / den;
    double const denb = -alphab * rs_k / (den * den);
    // den = Re<p_k, q_k>
    axpy(denb, qk, pkb);
    axpy(denb, pk, qkb);
    // q_k = op(p_k), op Hermitian
    axpy(1.0, op(qkb), pkb);

    pb = std::move(pkb);
    rsb = rskb;
    // rb already holds the adjoint of r_k (r_{k+1} depends on r_k with unit weight)
  }
  // p_0 = r_0, rs_0 = |r_0|^2, r_0 = rhs - op(x0)
  axpy(1.0, pb, rb);
  axpy(2.0 * rsb, tape.r.front(), rb);
  CgAdjoint adj;
  adj.x0_grad = xb - op(rb);
  adj.rhs_grad = std::move(rb);
  return adj;
}

FilterBank compute_Q(MultishotImage const& zhat, FilterSupport support, double eps)
{
  if (!(eps > 0.0)) {
    throw ConfigError("compute_Q: eps must be positive");
  }
  Eigen::MatrixXcd const g = gram(zhat, support);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
  if (es.info() != Eigen::Success) {
    throw NumericalError("compute_Q: eigendecomposition of the Gram matrix failed");
  }
  Eigen::VectorXd w = es.eigenvalues();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w(i) = std::pow(std::max(w(i), 0.0) + eps, -0.25);
  }
  FilterBank q;
  q.support = support;
  q.n_shots = zhat.n_shots();
  q.q = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  return q;
}

double nuclear_norm(MultishotImage const& zhat, FilterSupport support)
{
  HankelLift const h = lift(zhat, support);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(h.matrix);
  return svd.singularValues().sum();
}

std::string_view to_string(ZUpdateMode mode)
{
  return mode == ZUpdateMode::exact_cg ? "exact-cg" : "residual-approx";
}

ZUpdateMode parse_z_update_mode(std::string_view name)
{
  if (name == "exact-cg") {
    return ZUpdateMode::exact_cg;
  }
  if (name == "residual-approx") {
    return ZUpdateMode::residual_approx;
  }
  throw ConfigError("unknown z_update_mode '" + std::string(name) + "'");
}

void SolverConfig::validate() const
{
  if (!(beta > 0.0) || !(lam > 0.0) || !(eps > 0.0)) {
    throw ConfigError("solver: beta, lam and eps must be positive");
  }
  if (outer_iters < 1 || cg_iters < 1) {
    throw ConfigError("solver: outer_iters and cg_iters must be at least 1");
  }
  if (!(cg_tol > 0.0)) {
    throw ConfigError("solver: cg_tol must be positive");
  }
}

CostRecord evaluate_cost(KspaceData const& y, AcquisitionOperator const& op, FilterSupport support,
                         double lam, MultishotImage const& rho)
{
  KspaceData r = apply_A(op, rho);
  for (long i = 0; i < r.n_shots(); ++i) {
    for (long j = 0; j < r.n_coils(); ++j) {
      auto dst = r.at(i, j).values();
      auto src = y.at(i, j).values();
      auto const& m = op.shot_masks()[i];
      for (std::size_t p = 0; p < dst.size(); ++p) {
        dst[p] -= m.bits[p] != 0 ? src[p] : cplx{};
      }
    }
  }
  CostRecord c;
  c.data_residual = norm_sq(r);
  c.nuclear_norm = nuclear_norm(fft2c(rho), support);
  c.objective = c.data_residual + lam * c.nuclear_norm;
  return c;
}

IrlsResult irls_mussels(KspaceData const& y, AcquisitionOperator const& op, FilterSupport support,
                        SolverConfig const& cfg)
{
  cfg.validate();
  validate_support(support, op.rows(), op.cols());
  MultishotImage const ahy = apply_AH(op, y);
  IrlsResult res;
  if (norm_sq(y) == 0.0) {
    res.rho = ahy;
    res.trace.records.assign(static_cast<std::size_t>(cfg.outer_iters + 1), CostRecord{});
    return res;
  }

  double const ratio = cfg.lam / cfg.beta;
  LinearOperator const dc_op = [&](MultishotImage const& x) { return normal_op(op, x, cfg.beta); };

  MultishotImage rho = ahy;
  MultishotImage z = fft2c(rho);
  FilterBank q = compute_Q(z, support, cfg.eps);
  res.trace.records.push_back(evaluate_cost(y, op, support, cfg.lam, rho));

  for (int n = 0; n < cfg.outer_iters; ++n) {
    // rho-update: (A^H A + beta I) rho = A^H y + beta ifft2c(z)
    MultishotImage rhs = ahy;
    axpy(cfg.beta, ifft2c(z), rhs);
    rho = conjugate_gradient(dc_op, rhs, std::move(rho), cfg.cg_iters, cfg.cg_tol).x;
    MultishotImage const rho_hat = fft2c(rho);

    // z-update against the current filterbank
    if (cfg.z_update_mode == ZUpdateMode::residual_approx) {
      z = residual_project(rho_hat, q, ratio);
    } else {
      LinearOperator const den_op = [&](MultishotImage const& v) {
        return regularized_filterbank_normal(v, q, ratio);
      };
      z = conjugate_gradient(den_op, rho_hat, rho_hat, cfg.cg_iters, cfg.cg_tol).x;
    }
    if (!all_finite(z)) {
      throw NumericalError("irls_mussels: non-finite k-space iterate at outer iteration " + std::to_string(n + 1));
    }

    q = compute_Q(z, support, cfg.eps);
    res.trace.records.push_back(evaluate_cost(y, op, support, cfg.lam, rho));
  }
  res.rho = std::move(rho);
  return res;
}

}  // namespace mussels
