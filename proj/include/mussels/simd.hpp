#pragma once

// Runtime-dispatched arithmetic kernels. Every routine has a portable scalar
// reference implementation; an AVX2/FMA variant is compiled on x86-64 and
// selected when the CPU supports it. Set MUSSELS_ISA=scalar to force the
// reference path.

#include <complex>
#include <cstddef>
#include <string_view>

namespace mussels::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;

  // y[i] += a * x[i]
  void (*axpy)(double a, double const* x, double* y, std::size_t n);
  // y[i] += w0 * x[i] + w1 * x[i + 1] + w2 * x[i + 2]
  void (*axpy3)(double w0, double w1, double w2, double const* x, double* y, std::size_t n);
  // sum x[i] * y[i]
  double (*dot)(double const* x, double const* y, std::size_t n);
  // acc[k] += sum g[i] * x[i + k] for k = 0, 1, 2
  void (*dot3)(double const* g, double const* x, std::size_t n, double* acc);
  // x[i] = max(x[i], 0)
  void (*relu)(double* x, std::size_t n);

  // y[i] += a * x[i]
  void (*caxpy)(cplx a, cplx const* x, cplx* y, std::size_t n);
  // sum conj(x[i]) * y[i]
  cplx (*cdot)(cplx const* x, cplx const* y, std::size_t n);
  // out[i] = a[i] * b[i]
  void (*cmul)(cplx const* a, cplx const* b, cplx* out, std::size_t n);
  // out[i] += conj(a[i]) * b[i]
  void (*cmul_conj_acc)(cplx const* a, cplx const* b, cplx* out, std::size_t n);
};

KernelTable const& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the features.
KernelTable const* avx2_kernels();

// Selected once per process.
KernelTable const& kernels();

}  // namespace mussels::simd
