#pragma once

// Shared helpers for the unit tests: random instances and independent
// reference computations (brute-force DFT, dense operator assembly).

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "mussels/forward_model.hpp"
#include "mussels/random.hpp"
#include "mussels/tensor.hpp"

namespace testing {

using mussels::cplx;
using mussels::ComplexImage;
using mussels::MultishotImage;
using mussels::Rng;

inline cplx random_cplx(Rng& rng) { return {rng.normal(), rng.normal()}; }

inline ComplexImage random_image(long rows, long cols, Rng& rng)
{
  ComplexImage img(rows, cols);
  for (auto& z : img.values()) {
    z = random_cplx(rng);
  }
  return img;
}

inline MultishotImage random_multishot(long n, long rows, long cols, Rng& rng)
{
  std::vector<ComplexImage> shots;
  for (long i = 0; i < n; ++i) {
    shots.push_back(random_image(rows, cols, rng));
  }
  return MultishotImage(std::move(shots));
}

inline mussels::CoilMaps random_coils(long n_coils, long rows, long cols, Rng& rng)
{
  std::vector<ComplexImage> maps;
  for (long j = 0; j < n_coils; ++j) {
    maps.push_back(random_image(rows, cols, rng));
  }
  for (long k = 0; k < rows * cols; ++k) {
    double s = 0.0;
    for (auto const& m : maps) {
      s += std::norm(m.values()[static_cast<std::size_t>(k)]);
    }
    for (auto& m : maps) {
      m.values()[static_cast<std::size_t>(k)] /= std::sqrt(s);
    }
  }
  return mussels::CoilMaps(std::move(maps));
}

inline mussels::CoilMaps unit_coil(long rows, long cols)
{
  ComplexImage one(rows, cols);
  for (auto& z : one.values()) {
    z = 1.0;
  }
  return mussels::CoilMaps({one});
}

// Row l goes to shot l mod n.
inline mussels::ShotMasks interleaved_masks(long n, long rows, long cols)
{
  std::vector<mussels::Mask> masks(static_cast<std::size_t>(n), mussels::Mask(rows, cols));
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      masks[static_cast<std::size_t>(r % n)].bits[static_cast<std::size_t>(r * cols + c)] = 1;
    }
  }
  return mussels::ShotMasks(std::move(masks));
}

inline mussels::AcquisitionOperator random_op(long n, long c, long rows, long cols, Rng& rng)
{
  return mussels::AcquisitionOperator(random_coils(c, rows, cols, rng), interleaved_masks(n, rows, cols));
}

inline mussels::KspaceData random_kspace(mussels::AcquisitionOperator const& op, Rng& rng)
{
  mussels::KspaceData y(op.n_shots(), op.n_coils(), op.rows(), op.cols());
  for (long i = 0; i < op.n_shots(); ++i) {
    for (long j = 0; j < op.n_coils(); ++j) {
      y.at(i, j) = random_image(op.rows(), op.cols(), rng);
    }
  }
  return mussels::project_to_masks(op, y);
}

// Direct double-sum DFT with the e^{+i k.r} kernel, centered at floor(n/2),
// scaled by 1/sqrt(rows * cols). sign = -1 gives the inverse.
inline ComplexImage dft_oracle(ComplexImage const& x, int sign = +1)
{
  long const R = x.rows();
  long const C = x.cols();
  ComplexImage out(R, C);
  double const scale = 1.0 / std::sqrt(static_cast<double>(R * C));
  for (long kr = 0; kr < R; ++kr) {
    for (long kc = 0; kc < C; ++kc) {
      cplx s{};
      for (long r = 0; r < R; ++r) {
        for (long c = 0; c < C; ++c) {
          double const ph = 2.0 * std::numbers::pi *
                            (static_cast<double>((kr - R / 2) * (r - R / 2)) / static_cast<double>(R) +
                             static_cast<double>((kc - C / 2) * (c - C / 2)) / static_cast<double>(C));
          s += x(r, c) * std::polar(1.0, sign * ph);
        }
      }
      out(kr, kc) = scale * s;
    }
  }
  return out;
}

inline Eigen::VectorXcd to_vector(MultishotImage const& x)
{
  Eigen::VectorXcd v(static_cast<Eigen::Index>(x.size()));
  Eigen::Index k = 0;
  for (auto const& s : x.shots()) {
    for (auto z : s.values()) {
      v(k++) = z;
    }
  }
  return v;
}

inline MultishotImage from_vector(Eigen::VectorXcd const& v, long n, long rows, long cols)
{
  MultishotImage x(n, rows, cols);
  Eigen::Index k = 0;
  for (long i = 0; i < n; ++i) {
    for (auto& z : x[i].values()) {
      z = v(k++);
    }
  }
  return x;
}

// Dense matrix of a linear map on multishot images, column by column.
inline Eigen::MatrixXcd assemble(std::function<MultishotImage(MultishotImage const&)> const& f, long n, long rows,
                                 long cols)
{
  Eigen::Index const dim = n * rows * cols;
  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
    e(k) = 1.0;
    m.col(k) = to_vector(f(from_vector(e, n, rows, cols)));
  }
  return m;
}

inline double max_abs_diff(MultishotImage const& a, MultishotImage const& b)
{
  double m = 0.0;
  for (long i = 0; i < a.n_shots(); ++i) {
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      m = std::max(m, std::abs(a[i].values()[k] - b[i].values()[k]));
    }
  }
  return m;
}

inline double rel_diff(MultishotImage const& a, MultishotImage const& b)
{
  return mussels::norm(a - b) / std::max(mussels::norm(b), 1e-300);
}

}  // namespace testing
