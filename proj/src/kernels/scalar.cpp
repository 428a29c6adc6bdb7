#include "mussels/simd.hpp"

#include <algorithm>

namespace mussels::simd {
namespace {

void axpy(double a, double const* x, double* y, std::size_t n)
{
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += a * x[i];
  }
}

void axpy3(double w0, double w1, double w2, double const* x, double* y, std::size_t n)
{
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += w0 * x[i] + w1 * x[i + 1] + w2 * x[i + 2];
  }
}

double dot(double const* x, double const* y, std::size_t n)
{
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += x[i] * y[i];
  }
  return s;
}

void dot3(double const* g, double const* x, std::size_t n, double* acc)
{
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s0 += g[i] * x[i];
    s1 += g[i] * x[i + 1];
    s2 += g[i] * x[i + 2];
  }
  acc[0] += s0;
  acc[1] += s1;
  acc[2] += s2;
}

void relu(double* x, std::size_t n)
{
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::max(x[i], 0.0);
  }
}

void caxpy(cplx a, cplx const* x, cplx* y, std::size_t n)
{
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += a * x[i];
  }
}

cplx cdot(cplx const* x, cplx const* y, std::size_t n)
{
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

void cmul(cplx const* a, cplx const* b, cplx* out, std::size_t n)
{
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {a[i].real() * b[i].real() - a[i].imag() * b[i].imag(),
              a[i].real() * b[i].imag() + a[i].imag() * b[i].real()};
  }
}

void cmul_conj_acc(cplx const* a, cplx const* b, cplx* out, std::size_t n)
{
  for (std::size_t i = 0; i < n; ++i) {
    out[i] += cplx{a[i].real() * b[i].real() + a[i].imag() * b[i].imag(),
                   a[i].real() * b[i].imag() - a[i].imag() * b[i].real()};
  }
}

}  // namespace

KernelTable const& scalar_kernels()
{
  static KernelTable const table{Isa::scalar, "scalar", axpy, axpy3, dot, dot3, relu,
                                 caxpy,       cdot,     cmul, cmul_conj_acc};
  return table;
}

}  // namespace mussels::simd
