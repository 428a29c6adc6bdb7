#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mussels {

using cplx = std::complex<double>;

// Row-major complex 2D array. Holds both image-domain and k-space data.
class ComplexImage {
 public:
  ComplexImage() = default;
  ComplexImage(long rows, long cols);
  ComplexImage(long rows, long cols, std::vector<cplx> values);

  long rows() const { return rows_; }
  long cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  cplx& operator()(long r, long c) { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
  cplx operator()(long r, long c) const { return data_[static_cast<std::size_t>(r * cols_ + c)]; }

  std::span<cplx> values() { return data_; }
  std::span<cplx const> values() const { return data_; }
  cplx* data() { return data_.data(); }
  cplx const* data() const { return data_.data(); }

  bool same_shape(ComplexImage const& other) const
  {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(ComplexImage const&, ComplexImage const&) = default;

 private:
  long rows_ = 0;
  long cols_ = 0;
  std::vector<cplx> data_;
};

// Row-major real 2D array (magnitude images, masks).
struct RealImage {
  long rows = 0;
  long cols = 0;
  std::vector<double> data;

  RealImage() = default;
  RealImage(long r, long c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r * c), fill) {}

  double& operator()(long r, long c) { return data[static_cast<std::size_t>(r * cols + c)]; }
  double operator()(long r, long c) const { return data[static_cast<std::size_t>(r * cols + c)]; }
};

// N shot images of one shape; the unknown of every solver.
class MultishotImage {
 public:
  MultishotImage() = default;
  MultishotImage(long n_shots, long rows, long cols);
  explicit MultishotImage(std::vector<ComplexImage> shots);

  long n_shots() const { return static_cast<long>(shots_.size()); }
  long rows() const { return shots_.empty() ? 0 : shots_.front().rows(); }
  long cols() const { return shots_.empty() ? 0 : shots_.front().cols(); }
  std::size_t size() const { return shots_.size() * (shots_.empty() ? 0 : shots_.front().size()); }

  ComplexImage& operator[](long i) { return shots_[static_cast<std::size_t>(i)]; }
  ComplexImage const& operator[](long i) const { return shots_[static_cast<std::size_t>(i)]; }

  std::vector<ComplexImage> const& shots() const { return shots_; }

  bool same_shape(MultishotImage const& other) const;

  friend bool operator==(MultishotImage const&, MultishotImage const&) = default;

 private:
  std::vector<ComplexImage> shots_;
};

MultishotImage zeros_like(MultishotImage const& x);

// Vector-space operations used by the iterative solvers. Shapes must agree.
cplx inner(MultishotImage const& x, MultishotImage const& y);  // sum conj(x) y
double norm_sq(MultishotImage const& x);
double norm(MultishotImage const& x);
void axpy(cplx a, MultishotImage const& x, MultishotImage& y);  // y += a x
void scale(MultishotImage& x, cplx a);
MultishotImage operator+(MultishotImage const& x, MultishotImage const& y);
MultishotImage operator-(MultishotImage const& x, MultishotImage const& y);
MultishotImage operator*(cplx a, MultishotImage const& x);

cplx inner(ComplexImage const& x, ComplexImage const& y);
double norm_sq(ComplexImage const& x);
bool all_finite(MultishotImage const& x);

// Centered, orthonormal 2D DFT with the e^{+i k.r} kernel. Index floor(n/2)
// is the origin in both domains.
ComplexImage fft2c(ComplexImage const& img);
ComplexImage ifft2c(ComplexImage const& spec);
MultishotImage fft2c(MultishotImage const& x);
MultishotImage ifft2c(MultishotImage const& x);

RealImage magnitude(ComplexImage const& img);
// Root-sum-of-squares over shots.
RealImage sos(MultishotImage const& x);

}  // namespace mussels
