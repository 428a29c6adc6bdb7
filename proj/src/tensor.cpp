#include "mussels/tensor.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "mussels/errors.hpp"
#include "mussels/simd.hpp"

namespace mussels {

ComplexImage::ComplexImage(long rows, long cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols))
{
  if (rows < 0 || cols < 0) {
    throw DimensionError("ComplexImage: negative extent");
  }
}

ComplexImage::ComplexImage(long rows, long cols, std::vector<cplx> values)
    : rows_(rows), cols_(cols), data_(std::move(values))
{
  if (rows < 0 || cols < 0 || data_.size() != static_cast<std::size_t>(rows * cols)) {
    throw DimensionError("ComplexImage: value count does not match shape");
  }
}

MultishotImage::MultishotImage(long n_shots, long rows, long cols)
{
  if (n_shots < 1) {
    throw DimensionError("MultishotImage: need at least one shot");
  }
  shots_.assign(static_cast<std::size_t>(n_shots), ComplexImage(rows, cols));
}

MultishotImage::MultishotImage(std::vector<ComplexImage> shots) : shots_(std::move(shots))
{
  if (shots_.empty()) {
    throw DimensionError("MultishotImage: need at least one shot");
  }
  for (auto const& s : shots_) {
    if (!s.same_shape(shots_.front())) {
      throw DimensionError("MultishotImage: shots differ in shape");
    }
  }
}

bool MultishotImage::same_shape(MultishotImage const& other) const
{
  return n_shots() == other.n_shots() && rows() == other.rows() && cols() == other.cols();
}

MultishotImage zeros_like(MultishotImage const& x)
{
  return MultishotImage(x.n_shots(), x.rows(), x.cols());
}

namespace {

void require_same(MultishotImage const& x, MultishotImage const& y, char const* what)
{
  if (!x.same_shape(y)) {
    throw DimensionError(std::string(what) + ": multishot shapes differ");
  }
}

}  // namespace

cplx inner(ComplexImage const& x, ComplexImage const& y)
{
  if (!x.same_shape(y)) {
    throw DimensionError("inner: image shapes differ");
  }
  return simd::kernels().cdot(x.data(), y.data(), x.size());
}

double norm_sq(ComplexImage const& x)
{
  return simd::kernels().cdot(x.data(), x.data(), x.size()).real();
}

cplx inner(MultishotImage const& x, MultishotImage const& y)
{
  require_same(x, y, "inner");
  cplx s = 0.0;
  for (long i = 0; i < x.n_shots(); ++i) {
    s += simd::kernels().cdot(x[i].data(), y[i].data(), x[i].size());
  }
  return s;
}

double norm_sq(MultishotImage const& x)
{
  double s = 0.0;
  for (long i = 0; i < x.n_shots(); ++i) {
    s += norm_sq(x[i]);
  }
  return s;
}

double norm(MultishotImage const& x) { return std::sqrt(norm_sq(x)); }

void axpy(cplx a, MultishotImage const& x, MultishotImage& y)
{
  require_same(x, y, "axpy");
  for (long i = 0; i < x.n_shots(); ++i) {
    simd::kernels().caxpy(a, x[i].data(), y[i].data(), x[i].size());
  }
}

void scale(MultishotImage& x, cplx a)
{
  for (long i = 0; i < x.n_shots(); ++i) {
    for (auto& v : x[i].values()) {
      v *= a;
    }
  }
}

MultishotImage operator+(MultishotImage const& x, MultishotImage const& y)
{
  MultishotImage out = x;
  axpy(1.0, y, out);
  return out;
}

MultishotImage operator-(MultishotImage const& x, MultishotImage const& y)
{
  MultishotImage out = x;
  axpy(-1.0, y, out);
  return out;
}

MultishotImage operator*(cplx a, MultishotImage const& x)
{
  MultishotImage out = x;
  scale(out, a);
  return out;
}

bool all_finite(MultishotImage const& x)
{
  for (long i = 0; i < x.n_shots(); ++i) {
    for (auto v : x[i].values()) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        return false;
      }
    }
  }
  return true;
}

namespace {

// FFTW planning is not thread-safe; execution through the new-array interface
// is. Plans are created once per (shape, direction) on fftw_malloc'd buffers
// and never destroyed. FFTW_ESTIMATE keeps plan choice, and therefore
// rounding, identical from run to run.
fftw_plan plan_for(long rows, long cols, int sign)
{
  static std::mutex mutex;
  static std::map<std::tuple<long, long, int>, fftw_plan> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_tuple(rows, cols, sign);
  auto it = cache.find(key);
  if (it != cache.end()) {
    return it->second;
  }
  auto const n = static_cast<std::size_t>(rows * cols);
  auto* a = fftw_alloc_complex(n);
  auto* b = fftw_alloc_complex(n);
  fftw_plan p = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), a, b, sign, FFTW_ESTIMATE);
  fftw_free(a);
  fftw_free(b);
  cache.emplace(key, p);
  return p;
}

struct FftwBuffer {
  fftw_complex* ptr = nullptr;
  std::size_t size = 0;

  ~FftwBuffer() { fftw_free(ptr); }
  cplx* get(std::size_t n)
  {
    if (n > size) {
      fftw_free(ptr);
      ptr = fftw_alloc_complex(n);
      size = n;
    }
    return reinterpret_cast<cplx*>(ptr);
  }
};

// dst[(r + dr) mod R][(c + dc) mod C] = a * src[r][c]
void circshift(cplx const* src, cplx* dst, long R, long C, long dr, long dc, double a)
{
  for (long r = 0; r < R; ++r) {
    cplx const* in = src + r * C;
    cplx* out = dst + ((r + dr) % R) * C;
    long const split = C - dc;  // source columns [0, split) land at [dc, C)
    for (long c = 0; c < split; ++c) {
      out[c + dc] = a * in[c];
    }
    for (long c = split; c < C; ++c) {
      out[c - split] = a * in[c];
    }
  }
}

ComplexImage centered_dft(ComplexImage const& in, int sign)
{
  long const R = in.rows();
  long const C = in.cols();
  if (in.size() == 0) {
    return in;
  }
  thread_local FftwBuffer src_buf;
  thread_local FftwBuffer dst_buf;
  cplx* buf = src_buf.get(in.size());
  cplx* spec = dst_buf.get(in.size());
  // move the centered origin (floor(n/2)) to index 0, transform, move it back
  circshift(in.data(), buf, R, C, R - R / 2, C - C / 2, 1.0);
  fftw_execute_dft(plan_for(R, C, sign), reinterpret_cast<fftw_complex*>(buf), reinterpret_cast<fftw_complex*>(spec));
  ComplexImage out(R, C);
  circshift(spec, out.data(), R, C, R / 2, C / 2, 1.0 / std::sqrt(static_cast<double>(R * C)));
  return out;
}

}  // namespace

// FFTW_BACKWARD carries the e^{+i} kernel.
ComplexImage fft2c(ComplexImage const& img) { return centered_dft(img, FFTW_BACKWARD); }

ComplexImage ifft2c(ComplexImage const& spec) { return centered_dft(spec, FFTW_FORWARD); }

MultishotImage fft2c(MultishotImage const& x)
{
  std::vector<ComplexImage> out;
  out.reserve(static_cast<std::size_t>(x.n_shots()));
  for (auto const& s : x.shots()) {
    out.push_back(fft2c(s));
  }
  return MultishotImage(std::move(out));
}

MultishotImage ifft2c(MultishotImage const& x)
{
  std::vector<ComplexImage> out;
  out.reserve(static_cast<std::size_t>(x.n_shots()));
  for (auto const& s : x.shots()) {
    out.push_back(ifft2c(s));
  }
  return MultishotImage(std::move(out));
}

RealImage magnitude(ComplexImage const& img)
{
  RealImage out(img.rows(), img.cols());
  for (std::size_t i = 0; i < img.size(); ++i) {
    out.data[i] = std::abs(img.values()[i]);
  }
  return out;
}

RealImage sos(MultishotImage const& x)
{
  RealImage out(x.rows(), x.cols());
  for (auto const& s : x.shots()) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out.data[i] += std::norm(s.values()[i]);
    }
  }
  for (auto& v : out.data) {
    v = std::sqrt(v);
  }
  return out;
}

}  // namespace mussels
