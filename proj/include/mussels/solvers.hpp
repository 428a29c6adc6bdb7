#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "mussels/forward_model.hpp"
#include "mussels/hankel.hpp"
#include "mussels/tensor.hpp"

namespace mussels {

using LinearOperator = std::function<MultishotImage(MultishotImage const&)>;

// Intermediate iterates of one CG run, kept for reverse-mode differentiation.
struct CgTape {
  std::vector<MultishotImage> r;  // residuals r_0..r_K
  std::vector<MultishotImage> p;  // search directions p_0..p_K
  std::vector<MultishotImage> q;  // op(p_k), k < K
  std::vector<double> rs;         // |r_k|^2
  std::vector<double> den;        // Re<p_k, op(p_k)>
  std::vector<double> alpha;
  std::vector<double> beta;

  int iterations() const { return static_cast<int>(alpha.size()); }
};

struct CgResult {
  MultishotImage x;
  std::vector<double> residual_norms;  // |rhs - op(x_k)|, k = 0..iterations
  int iterations = 0;
  bool converged = false;
};

// Conjugate gradients for a Hermitian positive semidefinite operator. Stops
// when |r| <= tol |rhs|, on an exactly zero residual or curvature, or after
// max_iters. Throws NumericalError naming the iteration on non-finite values.
CgResult conjugate_gradient(LinearOperator const& op, MultishotImage const& rhs, MultishotImage x0,
                            int max_iters, double tol, CgTape* tape = nullptr);

struct CgAdjoint {
  MultishotImage rhs_grad;
  MultishotImage x0_grad;
};

// Exact vector-Jacobian product of the recorded CG iterations with respect to
// rhs and x0 (the operator has no trainable parameters).
CgAdjoint conjugate_gradient_backward(LinearOperator const& op, CgTape const& tape,
                                      MultishotImage const& x_grad);

// Q = (T^H T + eps I)^(-1/4), via eigendecomposition of the Gram matrix.
FilterBank compute_Q(MultishotImage const& zhat, FilterSupport support, double eps);

double nuclear_norm(MultishotImage const& zhat, FilterSupport support);

enum class ZUpdateMode { exact_cg, residual_approx };

std::string_view to_string(ZUpdateMode mode);
ZUpdateMode parse_z_update_mode(std::string_view name);

struct SolverConfig {
  double beta = 1e-3;
  double lam = 1e-4;
  double eps = 1e-4;
  int outer_iters = 80;
  int cg_iters = 10;
  double cg_tol = 1e-10;
  ZUpdateMode z_update_mode = ZUpdateMode::residual_approx;

  void validate() const;  // throws ConfigError
};

struct CostRecord {
  double data_residual = 0.0;  // |A(rho) - y|^2
  double nuclear_norm = 0.0;   // |T(fft2c(rho))|_*
  double objective = 0.0;      // data_residual + lam * nuclear_norm
};

struct CostTrace {
  std::vector<CostRecord> records;  // initial iterate, then one per outer iteration
};

struct IrlsResult {
  MultishotImage rho;
  CostTrace trace;
};

CostRecord evaluate_cost(KspaceData const& y, AcquisitionOperator const& op, FilterSupport support,
                         double lam, MultishotImage const& rho);

// IRLS-MUSSELS: alternating data-consistency CG, filterbank denoising of the
// k-space iterate, and weight update. Starts from rho_0 = A^H y and
// z_0 = fft2c(rho_0).
IrlsResult irls_mussels(KspaceData const& y, AcquisitionOperator const& op, FilterSupport support,
                        SolverConfig const& cfg);

}  // namespace mussels
