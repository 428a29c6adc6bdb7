#include <doctest.h>

#include "mussels/errors.hpp"
#include "mussels/tensor.hpp"
#include "support.hpp"

using namespace mussels;
using testing::random_image;

TEST_CASE("fft2c of zeros is zero")
{
  ComplexImage z(4, 4);
  CHECK(fft2c(z) == z);
  CHECK(ifft2c(z) == z);
}

TEST_CASE("centered impulse transforms to a constant 1/n spectrum and back")
{
  ComplexImage delta(8, 8);
  delta(4, 4) = 1.0;
  ComplexImage const spec = fft2c(delta);
  for (auto z : spec.values()) {
    CHECK(std::abs(z - cplx(0.125, 0.0)) < 1e-15);
  }
  ComplexImage flat(8, 8);
  for (auto& z : flat.values()) {
    z = 0.125;
  }
  ComplexImage const back = ifft2c(flat);
  for (long r = 0; r < 8; ++r) {
    for (long c = 0; c < 8; ++c) {
      CHECK(std::abs(back(r, c) - (r == 4 && c == 4 ? cplx(1.0) : cplx(0.0))) < 1e-15);
    }
  }
}

TEST_CASE("fft2c matches a direct double-sum DFT on even and odd grids")
{
  Rng rng(3);
  for (auto [rows, cols] : {std::pair{16L, 16L}, std::pair{15L, 9L}, std::pair{7L, 10L}}) {
    CAPTURE(rows);
    CAPTURE(cols);
    ComplexImage const x = random_image(rows, cols, rng);
    ComplexImage const fast = fft2c(x);
    ComplexImage const ref = testing::dft_oracle(x, +1);
    double err = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      err = std::max(err, std::abs(fast.values()[k] - ref.values()[k]));
    }
    CHECK(err < 1e-12);
    CHECK(std::sqrt(norm_sq(ref)) == doctest::Approx(std::sqrt(norm_sq(x))).epsilon(1e-12));

    ComplexImage const inv = ifft2c(x);
    ComplexImage const iref = testing::dft_oracle(x, -1);
    err = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      err = std::max(err, std::abs(inv.values()[k] - iref.values()[k]));
    }
    CHECK(err < 1e-12);
  }
}

TEST_CASE("round trip, Parseval, adjointness and linearity")
{
  Rng rng(5);
  ComplexImage const x = random_image(32, 32, rng);
  ComplexImage const back = ifft2c(fft2c(x));
  double err = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    err = std::max(err, std::abs(back.values()[k] - x.values()[k]));
  }
  CHECK(err < 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    long const rows = 5 + static_cast<long>(rng.below(12));
    long const cols = 5 + static_cast<long>(rng.below(12));
    ComplexImage const a = random_image(rows, cols, rng);
    ComplexImage const b = random_image(rows, cols, rng);
    double const na = norm_sq(a);
    CHECK(std::abs(norm_sq(fft2c(a)) - na) <= 1e-10 * na);
    cplx const lhs = inner(fft2c(a), b);
    cplx const rhs = inner(a, ifft2c(b));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::sqrt(na * norm_sq(b)));

    cplx const alpha{0.3, -2.0};
    cplx const beta{-1.5, 0.25};
    ComplexImage comb(rows, cols);
    for (std::size_t k = 0; k < comb.size(); ++k) {
      comb.values()[k] = alpha * a.values()[k] + beta * b.values()[k];
    }
    ComplexImage const fa = fft2c(a);
    ComplexImage const fb = fft2c(b);
    ComplexImage const fc = fft2c(comb);
    double lin = 0.0;
    for (std::size_t k = 0; k < comb.size(); ++k) {
      lin = std::max(lin, std::abs(fc.values()[k] - alpha * fa.values()[k] - beta * fb.values()[k]));
    }
    CHECK(lin < 1e-12);
  }
}

TEST_CASE("multishot container invariants")
{
  CHECK_THROWS_AS(MultishotImage(std::vector<ComplexImage>{}), DimensionError);
  CHECK_THROWS_AS(MultishotImage({ComplexImage(2, 2), ComplexImage(2, 3)}), DimensionError);
  CHECK_THROWS_AS(ComplexImage(2, 2, std::vector<cplx>(3)), DimensionError);
  Rng rng(1);
  MultishotImage const x = testing::random_multishot(3, 4, 5, rng);
  MultishotImage const y = testing::random_multishot(3, 4, 5, rng);
  CHECK(x.n_shots() == 3);
  CHECK(x.size() == 60);
  CHECK(norm_sq(x - x) == 0.0);
  CHECK(std::abs(inner(x, y) - std::conj(inner(y, x))) < 1e-12);
  CHECK_THROWS_AS(inner(x, testing::random_multishot(2, 4, 5, rng)), DimensionError);
  MultishotImage z = y;
  axpy(cplx(2.0, 0.0), x, z);
  CHECK(testing::max_abs_diff(z, y + cplx(2.0, 0.0) * x) < 1e-14);
  CHECK(all_finite(x));
  z[0](0, 0) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_FALSE(all_finite(z));
}

TEST_CASE("root-sum-of-squares combines shots")
{
  MultishotImage x(2, 1, 1);
  x[0](0, 0) = {3.0, 0.0};
  x[1](0, 0) = {0.0, 4.0};
  CHECK(sos(x)(0, 0) == doctest::Approx(5.0));
  CHECK(magnitude(x[1])(0, 0) == doctest::Approx(4.0));
}
