#include "mussels/hankel.hpp"

#include <string>

#include "mussels/errors.hpp"
#include "mussels/simd.hpp"

namespace mussels {

void validate_support(FilterSupport support, long grid_rows, long grid_cols)
{
  if (support.rows < 1 || support.cols < 1 || support.rows % 2 == 0 || support.cols % 2 == 0) {
    throw DimensionError("filter support must have odd positive extents, got " +
                         std::to_string(support.rows) + "x" + std::to_string(support.cols));
  }
  if (support.rows > grid_rows || support.cols > grid_cols) {
    throw DimensionError("filter support " + std::to_string(support.rows) + "x" +
                         std::to_string(support.cols) + " does not fit in grid " +
                         std::to_string(grid_rows) + "x" + std::to_string(grid_cols));
  }
}

HankelLift lift(MultishotImage const& zhat, FilterSupport support)
{
  validate_support(support, zhat.rows(), zhat.cols());
  HankelLift h;
  h.grid_rows = zhat.rows();
  h.grid_cols = zhat.cols();
  h.support = support;
  h.n_shots = zhat.n_shots();
  long const vr = h.valid_rows();
  long const vc = h.valid_cols();
  long const taps = support.size();
  h.matrix.resize(vr * vc, zhat.n_shots() * taps);
  for (long i = 0; i < zhat.n_shots(); ++i) {
    auto const& z = zhat[i];
    for (long u = 0; u < support.rows; ++u) {
      for (long v = 0; v < support.cols; ++v) {
        long const col = i * taps + u * support.cols + v;
        for (long a = 0; a < vr; ++a) {
          for (long b = 0; b < vc; ++b) {
            h.matrix(a * vc + b, col) = z(a + support.rows - 1 - u, b + support.cols - 1 - v);
          }
        }
      }
    }
  }
  return h;
}

MultishotImage lift_adjoint(Eigen::MatrixXcd const& m, long grid_rows, long grid_cols,
                            FilterSupport support, long n_shots)
{
  validate_support(support, grid_rows, grid_cols);
  long const vr = grid_rows - support.rows + 1;
  long const vc = grid_cols - support.cols + 1;
  long const taps = support.size();
  if (m.rows() != vr * vc || m.cols() != n_shots * taps) {
    throw DimensionError("lift_adjoint: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " + std::to_string(vr * vc) + "x" +
                         std::to_string(n_shots * taps));
  }
  MultishotImage out(n_shots, grid_rows, grid_cols);
  for (long i = 0; i < n_shots; ++i) {
    auto& z = out[i];
    for (long u = 0; u < support.rows; ++u) {
      for (long v = 0; v < support.cols; ++v) {
        long const col = i * taps + u * support.cols + v;
        for (long a = 0; a < vr; ++a) {
          for (long b = 0; b < vc; ++b) {
            z(a + support.rows - 1 - u, b + support.cols - 1 - v) += m(a * vc + b, col);
          }
        }
      }
    }
  }
  return out;
}

Eigen::MatrixXcd gram(MultishotImage const& zhat, FilterSupport support)
{
  HankelLift const h = lift(zhat, support);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(h.matrix.cols(), h.matrix.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(h.matrix.adjoint());
  return g.selfadjointView<Eigen::Lower>();
}

namespace {

void require_bank(MultishotImage const& zhat, FilterBank const& q)
{
  validate_support(q.support, zhat.rows(), zhat.cols());
  if (q.n_shots != zhat.n_shots() || q.q.rows() != q.n_shots * q.support.size()) {
    throw DimensionError("filterbank: " + std::to_string(q.q.rows()) + " filter rows do not split into " +
                         std::to_string(zhat.n_shots()) + " sub-filters of length " +
                         std::to_string(q.support.size()));
  }
}

}  // namespace

std::vector<ComplexImage> apply_filterbank(MultishotImage const& zhat, FilterBank const& q)
{
  require_bank(zhat, q);
  auto const& k = simd::kernels();
  long const vr = zhat.rows() - q.support.rows + 1;
  long const vc = zhat.cols() - q.support.cols + 1;
  std::vector<ComplexImage> responses(static_cast<std::size_t>(q.n_filters()), ComplexImage(vr, vc));
  for (long f = 0; f < q.n_filters(); ++f) {
    auto& out = responses[static_cast<std::size_t>(f)];
    for (long i = 0; i < zhat.n_shots(); ++i) {
      auto const& z = zhat[i];
      for (long u = 0; u < q.support.rows; ++u) {
        for (long v = 0; v < q.support.cols; ++v) {
          cplx const c = q.tap(f, i, u, v);
          if (c == cplx{}) {
            continue;
          }
          for (long a = 0; a < vr; ++a) {
            k.caxpy(c, z.data() + (a + q.support.rows - 1 - u) * z.cols() + (q.support.cols - 1 - v), &out(a, 0),
                    static_cast<std::size_t>(vc));
          }
        }
      }
    }
  }
  return responses;
}

MultishotImage filterbank_adjoint(std::vector<ComplexImage> const& responses, FilterBank const& q,
                                  long grid_rows, long grid_cols)
{
  validate_support(q.support, grid_rows, grid_cols);
  long const vr = grid_rows - q.support.rows + 1;
  long const vc = grid_cols - q.support.cols + 1;
  if (static_cast<long>(responses.size()) != q.n_filters()) {
    throw DimensionError("filterbank_adjoint: response count does not match filter count");
  }
  for (auto const& r : responses) {
    if (r.rows() != vr || r.cols() != vc) {
      throw DimensionError("filterbank_adjoint: response shape does not match the valid grid");
    }
  }
  auto const& k = simd::kernels();
  MultishotImage out(q.n_shots, grid_rows, grid_cols);
  for (long f = 0; f < q.n_filters(); ++f) {
    auto const& resp = responses[static_cast<std::size_t>(f)];
    for (long i = 0; i < q.n_shots; ++i) {
      auto& z = out[i];
      for (long u = 0; u < q.support.rows; ++u) {
        for (long v = 0; v < q.support.cols; ++v) {
          cplx const c = std::conj(q.tap(f, i, u, v));
          if (c == cplx{}) {
            continue;
          }
          for (long a = 0; a < vr; ++a) {
            k.caxpy(c, resp.data() + a * vc, &z(a + q.support.rows - 1 - u, q.support.cols - 1 - v),
                    static_cast<std::size_t>(vc));
          }
        }
      }
    }
  }
  return out;
}

MultishotImage residual_project(MultishotImage const& zhat, FilterBank const& q, double weight)
{
  if (!(weight >= 0.0)) {
    throw DimensionError("residual_project: weight must be non-negative");
  }
  if (weight == 0.0) {
    require_bank(zhat, q);
    return zhat;
  }
  MultishotImage const gg = filterbank_adjoint(apply_filterbank(zhat, q), q, zhat.rows(), zhat.cols());
  MultishotImage out = zhat;
  axpy(-weight, gg, out);
  return out;
}

MultishotImage regularized_filterbank_normal(MultishotImage const& zhat, FilterBank const& q,
                                             double weight)
{
  MultishotImage out = zhat;
  if (weight != 0.0) {
    axpy(weight, filterbank_adjoint(apply_filterbank(zhat, q), q, zhat.rows(), zhat.cols()), out);
  }
  return out;
}

}  // namespace mussels
