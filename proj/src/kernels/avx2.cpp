// Compiled with -mavx2 -mfma; only reached after a CPU feature check.
#include <immintrin.h>

#include "mussels/simd.hpp"

namespace mussels::simd {
namespace {

inline double hsum(__m256d v)
{
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void axpy(double a, double const* x, double* y, std::size_t n)
{
  __m256d const va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d y0 = _mm256_loadu_pd(y + i);
    __m256d y1 = _mm256_loadu_pd(y + i + 4);
    y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), y0);
    y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), y1);
    _mm256_storeu_pd(y + i, y0);
    _mm256_storeu_pd(y + i + 4, y1);
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) {
    y[i] += a * x[i];
  }
}

void axpy3(double w0, double w1, double w2, double const* x, double* y, std::size_t n)
{
  __m256d const a0 = _mm256_set1_pd(w0);
  __m256d const a1 = _mm256_set1_pd(w1);
  __m256d const a2 = _mm256_set1_pd(w2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_loadu_pd(y + i);
    acc = _mm256_fmadd_pd(a0, _mm256_loadu_pd(x + i), acc);
    acc = _mm256_fmadd_pd(a1, _mm256_loadu_pd(x + i + 1), acc);
    acc = _mm256_fmadd_pd(a2, _mm256_loadu_pd(x + i + 2), acc);
    _mm256_storeu_pd(y + i, acc);
  }
  for (; i < n; ++i) {
    y[i] += w0 * x[i] + w1 * x[i + 1] + w2 * x[i + 2];
  }
}

double dot(double const* x, double const* y, std::size_t n)
{
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) {
    s += x[i] * y[i];
  }
  return s;
}

void dot3(double const* g, double const* x, std::size_t n, double* acc)
{
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d const vg = _mm256_loadu_pd(g + i);
    s0 = _mm256_fmadd_pd(vg, _mm256_loadu_pd(x + i), s0);
    s1 = _mm256_fmadd_pd(vg, _mm256_loadu_pd(x + i + 1), s1);
    s2 = _mm256_fmadd_pd(vg, _mm256_loadu_pd(x + i + 2), s2);
  }
  double t0 = hsum(s0), t1 = hsum(s1), t2 = hsum(s2);
  for (; i < n; ++i) {
    t0 += g[i] * x[i];
    t1 += g[i] * x[i + 1];
    t2 += g[i] * x[i + 2];
  }
  acc[0] += t0;
  acc[1] += t1;
  acc[2] += t2;
}

void relu(double* x, std::size_t n)
{
  __m256d const zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  }
  for (; i < n; ++i) {
    x[i] = x[i] > 0.0 ? x[i] : 0.0;
  }
}

// Complex arrays are interleaved (re, im) pairs; one __m256d holds two values.

void caxpy(cplx a, cplx const* x, cplx* y, std::size_t n)
{
  auto const* xd = reinterpret_cast<double const*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  __m256d const re = _mm256_set1_pd(a.real());
  __m256d const im = _mm256_setr_pd(-a.imag(), a.imag(), -a.imag(), a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d const vx = _mm256_loadu_pd(xd + 2 * i);
    __m256d const sw = _mm256_permute_pd(vx, 0b0101);
    __m256d acc = _mm256_loadu_pd(yd + 2 * i);
    acc = _mm256_fmadd_pd(vx, re, acc);
    acc = _mm256_fmadd_pd(sw, im, acc);
    _mm256_storeu_pd(yd + 2 * i, acc);
  }
  for (; i < n; ++i) {
    y[i] += a * x[i];
  }
}

cplx cdot(cplx const* x, cplx const* y, std::size_t n)
{
  auto const* xd = reinterpret_cast<double const*>(x);
  auto const* yd = reinterpret_cast<double const*>(y);
  __m256d sre = _mm256_setzero_pd();
  __m256d sim = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d const vx = _mm256_loadu_pd(xd + 2 * i);
    __m256d const vy = _mm256_loadu_pd(yd + 2 * i);
    sre = _mm256_fmadd_pd(vx, vy, sre);
    sim = _mm256_fmadd_pd(vx, _mm256_permute_pd(vy, 0b0101), sim);
  }
  alignas(32) double a[4];
  alignas(32) double b[4];
  _mm256_store_pd(a, sre);
  _mm256_store_pd(b, sim);
  double re = (a[0] + a[1]) + (a[2] + a[3]);
  double im = (b[0] - b[1]) + (b[2] - b[3]);
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

void cmul(cplx const* a, cplx const* b, cplx* out, std::size_t n)
{
  auto const* ad = reinterpret_cast<double const*>(a);
  auto const* bd = reinterpret_cast<double const*>(b);
  auto* od = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d const va = _mm256_loadu_pd(ad + 2 * i);
    __m256d const vb = _mm256_loadu_pd(bd + 2 * i);
    __m256d const are = _mm256_movedup_pd(va);
    __m256d const aim = _mm256_permute_pd(va, 0b1111);
    __m256d const bsw = _mm256_permute_pd(vb, 0b0101);
    _mm256_storeu_pd(od + 2 * i, _mm256_fmaddsub_pd(are, vb, _mm256_mul_pd(aim, bsw)));
  }
  for (; i < n; ++i) {
    out[i] = {a[i].real() * b[i].real() - a[i].imag() * b[i].imag(),
              a[i].real() * b[i].imag() + a[i].imag() * b[i].real()};
  }
}

void cmul_conj_acc(cplx const* a, cplx const* b, cplx* out, std::size_t n)
{
  auto const* ad = reinterpret_cast<double const*>(a);
  auto const* bd = reinterpret_cast<double const*>(b);
  auto* od = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d const va = _mm256_loadu_pd(ad + 2 * i);
    __m256d const vb = _mm256_loadu_pd(bd + 2 * i);
    __m256d const are = _mm256_movedup_pd(va);
    __m256d const aim = _mm256_permute_pd(va, 0b1111);
    __m256d const bsw = _mm256_permute_pd(vb, 0b0101);
    __m256d const prod = _mm256_fmsubadd_pd(are, vb, _mm256_mul_pd(aim, bsw));
    _mm256_storeu_pd(od + 2 * i, _mm256_add_pd(_mm256_loadu_pd(od + 2 * i), prod));
  }
  for (; i < n; ++i) {
    out[i] += cplx{a[i].real() * b[i].real() + a[i].imag() * b[i].imag(),
                   a[i].real() * b[i].imag() - a[i].imag() * b[i].real()};
  }
}

}  // namespace

KernelTable const& avx2_table()
{
  static KernelTable const table{Isa::avx2, "avx2", axpy, axpy3, dot, dot3, relu,
                                 caxpy,     cdot,   cmul, cmul_conj_acc};
  return table;
}

}  // namespace mussels::simd
