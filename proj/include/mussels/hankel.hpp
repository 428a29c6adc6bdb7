#pragma once

// Block-Hankel lifting of multishot k-space and the multichannel filterbank
// view of the same products.
//
// Conventions: a filter of support rows x cols is indexed by tap (u, v); the
// lift has one row per position (a, b) where the support fits inside the grid
// (the erosion of the grid by the support) and one column per (shot, u, v):
//
//   T[(a, b), (i, u, v)] = zhat_i[a + rows - 1 - u, b + cols - 1 - v]
//
// so T(zhat) * s is the sum over shots of valid 2D convolutions zhat_i * s_i.
// Column index: i * |support| + u * cols + v.

#include <Eigen/Dense>
#include <vector>

#include "mussels/tensor.hpp"

namespace mussels {

struct FilterSupport {
  long rows = 3;
  long cols = 3;

  long size() const { return rows * cols; }
};

// Throws DimensionError for even/non-positive extents or a support that does
// not fit in the grid.
void validate_support(FilterSupport support, long grid_rows, long grid_cols);

struct HankelLift {
  Eigen::MatrixXcd matrix;
  long grid_rows = 0;
  long grid_cols = 0;
  FilterSupport support;
  long n_shots = 0;

  long valid_rows() const { return grid_rows - support.rows + 1; }
  long valid_cols() const { return grid_cols - support.cols + 1; }
};

// Columns q_1..q_K, each split into N sub-filters of length |support|.
struct FilterBank {
  Eigen::MatrixXcd q;
  FilterSupport support;
  long n_shots = 0;

  long n_filters() const { return q.cols(); }
  cplx tap(long filter, long shot, long u, long v) const
  {
    return q(shot * support.size() + u * support.cols + v, filter);
  }
};

HankelLift lift(MultishotImage const& zhat, FilterSupport support);

MultishotImage lift_adjoint(Eigen::MatrixXcd const& m, long grid_rows, long grid_cols,
                            FilterSupport support, long n_shots);

// T(zhat)^H T(zhat), shape (N|support|, N|support|).
Eigen::MatrixXcd gram(MultishotImage const& zhat, FilterSupport support);

// Response k = sum_i valid-conv(zhat_i, q_ki); each response has the valid
// (eroded) shape. Equals lift(zhat).matrix * q column by column.
std::vector<ComplexImage> apply_filterbank(MultishotImage const& zhat, FilterBank const& q);

// G(Q)^H: flipped, conjugated filters scattered back onto the full grid.
MultishotImage filterbank_adjoint(std::vector<ComplexImage> const& responses, FilterBank const& q,
                                  long grid_rows, long grid_cols);

// zhat - weight * G(Q)^H G(Q) zhat
MultishotImage residual_project(MultishotImage const& zhat, FilterBank const& q, double weight);

// I + weight * G(Q)^H G(Q) applied to zhat.
MultishotImage regularized_filterbank_normal(MultishotImage const& zhat, FilterBank const& q,
                                             double weight);

}  // namespace mussels
