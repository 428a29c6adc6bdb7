#pragma once

// Image quality on magnitudes. Complex inputs are reduced by modulus first.

#include <vector>

#include "mussels/tensor.hpp"

namespace mussels {

// Ceiling of psnr; returned for identical images and round-off level errors.
inline constexpr double kPsnrSentinel = 300.0;

// 10 log10(max(x)^2 / MSE(x, y)). x is the reference and must not be all zero.
double psnr(RealImage const& x, RealImage const& y);
double psnr(ComplexImage const& x, ComplexImage const& y);

// Mean local SSIM: 11x11 Gaussian window (std 1.5) over valid positions,
// K1 = 0.01, K2 = 0.03, dynamic range max(x). Images smaller than the window
// use a single window cropped to the image.
double ssim(RealImage const& x, RealImage const& y);
double ssim(ComplexImage const& x, ComplexImage const& y);

struct MetricReport {
  std::vector<double> psnr;
  std::vector<double> ssim;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
};

MetricReport report(MultishotImage const& truth, MultishotImage const& recon);

}  // namespace mussels
