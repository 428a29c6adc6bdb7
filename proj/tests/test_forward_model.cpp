#include <doctest.h>

#include <numbers>

#include "mussels/errors.hpp"
#include "mussels/forward_model.hpp"
#include "support.hpp"

using namespace mussels;
using namespace testing;

TEST_CASE("coil maps must be SOS-normalized")
{
  ComplexImage a(2, 2);
  for (auto& z : a.values()) {
    z = 1.0;
  }
  CHECK_NOTHROW(CoilMaps({a}));
  ComplexImage b = a;
  b(1, 1) = 1.0 + 1e-5;
  CHECK_THROWS_AS(CoilMaps({b}), DimensionError);
  CHECK_THROWS_AS(CoilMaps({a, a}), DimensionError);
  CHECK_THROWS_AS(CoilMaps(std::vector<ComplexImage>{}), DimensionError);
}

TEST_CASE("shot masks must be disjoint and cover the grid")
{
  CHECK_NOTHROW(interleaved_masks(3, 6, 4));
  Mask full(2, 2, 1);
  Mask empty(2, 2, 0);
  CHECK_NOTHROW(ShotMasks({full, empty}));
  CHECK_THROWS_AS(ShotMasks({full, full}), DimensionError);
  CHECK_THROWS_AS(ShotMasks({empty}), DimensionError);
  CHECK_THROWS_AS(ShotMasks({full, Mask(2, 3, 0)}), DimensionError);
  CHECK_THROWS_AS(AcquisitionOperator(unit_coil(4, 4), interleaved_masks(2, 4, 5)), DimensionError);
}

TEST_CASE("single unit coil with full sampling reduces to the FFT")
{
  Rng rng(2);
  AcquisitionOperator const op(unit_coil(6, 5), interleaved_masks(1, 6, 5));
  MultishotImage const rho = random_multishot(1, 6, 5, rng);
  KspaceData const y = apply_A(op, rho);
  CHECK(y.at(0, 0) == fft2c(rho[0]));
  MultishotImage const back = apply_AH(op, y);
  CHECK(max_abs_diff(back, rho) < 1e-12);
  CHECK(apply_AH(op, y)[0] == ifft2c(y.at(0, 0)));
  CHECK(max_abs_diff(normal_op(op, rho, 0.0), rho) < 1e-12);
}

TEST_CASE("zero inputs map to zero")
{
  Rng rng(4);
  AcquisitionOperator const op = random_op(2, 3, 6, 6, rng);
  MultishotImage const zero(2, 6, 6);
  CHECK(norm_sq(apply_A(op, zero)) == 0.0);
  CHECK(norm_sq(apply_AH(op, KspaceData(2, 3, 6, 6))) == 0.0);
  CHECK(norm_sq(normal_op(op, zero, 0.0)) == 0.0);
}

TEST_CASE("apply_A matches the discrete forward-model double sum")
{
  Rng rng(8);
  long const R = 8;
  long const C = 8;
  AcquisitionOperator const op = random_op(2, 2, R, C, rng);
  MultishotImage const rho = random_multishot(2, R, C, rng);
  KspaceData const y = apply_A(op, rho);
  double err = 0.0;
  for (long i = 0; i < 2; ++i) {
    for (long j = 0; j < 2; ++j) {
      for (long kr = 0; kr < R; ++kr) {
        for (long kc = 0; kc < C; ++kc) {
          if (!op.shot_masks()[i](kr, kc)) {
            CHECK(y.at(i, j)(kr, kc) == cplx{});
            continue;
          }
          cplx s{};
          for (long r = 0; r < R; ++r) {
            for (long c = 0; c < C; ++c) {
              double const ph = 2.0 * std::numbers::pi *
                                (static_cast<double>((kr - R / 2) * (r - R / 2)) / R +
                                 static_cast<double>((kc - C / 2) * (c - C / 2)) / C);
              s += rho[i](r, c) * op.coil_maps()[j](r, c) * std::polar(1.0, ph);
            }
          }
          err = std::max(err, std::abs(y.at(i, j)(kr, kc) - s / 8.0));
        }
      }
    }
  }
  CHECK(err < 1e-10);
}

TEST_CASE("apply_A and apply_AH are adjoint across shot, coil and grid choices")
{
  Rng rng(13);
  for (long n : {1L, 2L, 4L}) {
    for (long c : {1L, 2L, 4L}) {
      for (auto [rows, cols] : {std::pair{8L, 8L}, std::pair{16L, 16L}, std::pair{15L, 9L}}) {
        AcquisitionOperator const op = random_op(n, c, rows, cols, rng);
        MultishotImage const x = random_multishot(n, rows, cols, rng);
        KspaceData const y = random_kspace(op, rng);
        cplx const lhs = inner(apply_A(op, x), y);
        cplx const rhs = inner(x, apply_AH(op, y));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * norm(x) * std::sqrt(norm_sq(y)));
      }
    }
  }
}

TEST_CASE("mask projection is idempotent under apply_A")
{
  Rng rng(21);
  AcquisitionOperator const op = random_op(3, 2, 9, 7, rng);
  KspaceData y(3, 2, 9, 7);
  for (long i = 0; i < 3; ++i) {
    for (long j = 0; j < 2; ++j) {
      y.at(i, j) = random_image(9, 7, rng);
    }
  }
  KspaceData const p = project_to_masks(op, y);
  CHECK(project_to_masks(op, p) == p);
  MultishotImage const x = random_multishot(3, 9, 7, rng);
  KspaceData const ax = apply_A(op, x);
  CHECK(project_to_masks(op, ax) == ax);
  // A^H ignores off-mask samples
  CHECK(max_abs_diff(apply_AH(op, y), apply_AH(op, p)) < 1e-13);
}

TEST_CASE("normal operator: dense assembly is Hermitian with spectrum above the shift")
{
  Rng rng(17);
  AcquisitionOperator const op = random_op(2, 2, 8, 8, rng);
  for (double shift : {0.0, 0.3}) {
    Eigen::MatrixXcd const m = assemble([&](MultishotImage const& x) { return normal_op(op, x, shift); }, 2, 8, 8);
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m);
    CHECK(eig.eigenvalues().minCoeff() >= shift - 1e-10);
    CHECK(eig.eigenvalues().maxCoeff() <= 1.0 + shift + 1e-10);
  }
  for (int t = 0; t < 5; ++t) {
    MultishotImage const x = random_multishot(2, 8, 8, rng);
    CHECK(inner(normal_op(op, x, 0.7), x).real() >= 0.7 * norm_sq(x) - 1e-10);
  }
  CHECK_THROWS_AS(normal_op(op, random_multishot(2, 8, 8, rng), -1.0), DimensionError);
}

TEST_CASE("shape mismatches are rejected")
{
  Rng rng(9);
  AcquisitionOperator const op = random_op(2, 2, 6, 6, rng);
  CHECK_THROWS_AS(apply_A(op, random_multishot(3, 6, 6, rng)), DimensionError);
  CHECK_THROWS_AS(apply_A(op, random_multishot(2, 6, 5, rng)), DimensionError);
  CHECK_THROWS_AS(apply_AH(op, KspaceData(2, 3, 6, 6)), DimensionError);
}
