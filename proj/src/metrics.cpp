#include "mussels/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mussels/errors.hpp"

namespace mussels {

namespace {

void require_same_shape(RealImage const& x, RealImage const& y, char const* what)
{
  if (x.rows != y.rows || x.cols != y.cols) {
    throw DimensionError(std::string(what) + ": image shapes differ");
  }
  if (x.data.empty()) {
    throw DimensionError(std::string(what) + ": empty image");
  }
}

double max_of(RealImage const& x) { return *std::max_element(x.data.begin(), x.data.end()); }

std::vector<double> gaussian_window(long n)
{
  constexpr double sigma = 1.5;
  std::vector<double> w(static_cast<std::size_t>(n));
  double const mid = 0.5 * static_cast<double>(n - 1);
  double s = 0.0;
  for (long k = 0; k < n; ++k) {
    double const d = static_cast<double>(k) - mid;
    w[static_cast<std::size_t>(k)] = std::exp(-d * d / (2.0 * sigma * sigma));
    s += w[static_cast<std::size_t>(k)];
  }
  for (double& v : w) {
    v /= s;
  }
  return w;
}

// Valid separable filtering of a rows x cols plane.
std::vector<double> filter_valid(std::vector<double> const& src, long rows, long cols, std::vector<double> const& wr,
                                 std::vector<double> const& wc)
{
  long const kr = static_cast<long>(wr.size());
  long const kc = static_cast<long>(wc.size());
  long const orows = rows - kr + 1;
  long const ocols = cols - kc + 1;
  std::vector<double> tmp(static_cast<std::size_t>(rows * ocols), 0.0);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < ocols; ++c) {
      double s = 0.0;
      for (long k = 0; k < kc; ++k) {
        s += wc[static_cast<std::size_t>(k)] * src[static_cast<std::size_t>(r * cols + c + k)];
      }
      tmp[static_cast<std::size_t>(r * ocols + c)] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(orows * ocols), 0.0);
  for (long r = 0; r < orows; ++r) {
    for (long c = 0; c < ocols; ++c) {
      double s = 0.0;
      for (long k = 0; k < kr; ++k) {
        s += wr[static_cast<std::size_t>(k)] * tmp[static_cast<std::size_t>((r + k) * ocols + c)];
      }
      out[static_cast<std::size_t>(r * ocols + c)] = s;
    }
  }
  return out;
}

}  // namespace

double psnr(RealImage const& x, RealImage const& y)
{
  require_same_shape(x, y, "psnr");
  double const peak = max_of(x);
  if (!(peak > 0.0)) {
    throw DimensionError("psnr: reference image has no positive maximum");
  }
  double se = 0.0;
  for (std::size_t k = 0; k < x.data.size(); ++k) {
    double const d = x.data[k] - y.data[k];
    se += d * d;
  }
  if (se == 0.0) {
    return kPsnrSentinel;
  }
  double const mse = se / static_cast<double>(x.data.size());
  return std::min(kPsnrSentinel, 10.0 * std::log10(peak * peak / mse));
}

double psnr(ComplexImage const& x, ComplexImage const& y) { return psnr(magnitude(x), magnitude(y)); }

double ssim(RealImage const& x, RealImage const& y)
{
  require_same_shape(x, y, "ssim");
  double range = max_of(x);
  if (!(range > 0.0)) {
    range = 1.0;
  }
  double const c1 = (0.01 * range) * (0.01 * range);
  double const c2 = (0.03 * range) * (0.03 * range);
  auto const wr = gaussian_window(std::min(11L, x.rows));
  auto const wc = gaussian_window(std::min(11L, x.cols));

  std::vector<double> xx(x.data.size());
  std::vector<double> yy(x.data.size());
  std::vector<double> xy(x.data.size());
  for (std::size_t k = 0; k < x.data.size(); ++k) {
    xx[k] = x.data[k] * x.data[k];
    yy[k] = y.data[k] * y.data[k];
    xy[k] = x.data[k] * y.data[k];
  }
  auto const mx = filter_valid(x.data, x.rows, x.cols, wr, wc);
  auto const my = filter_valid(y.data, x.rows, x.cols, wr, wc);
  auto const sxx = filter_valid(xx, x.rows, x.cols, wr, wc);
  auto const syy = filter_valid(yy, x.rows, x.cols, wr, wc);
  auto const sxy = filter_valid(xy, x.rows, x.cols, wr, wc);

  double total = 0.0;
  for (std::size_t k = 0; k < mx.size(); ++k) {
    double const vx = sxx[k] - mx[k] * mx[k];
    double const vy = syy[k] - my[k] * my[k];
    double const cxy = sxy[k] - mx[k] * my[k];
    double const num = (2.0 * mx[k] * my[k] + c1) * (2.0 * cxy + c2);
    double const den = (mx[k] * mx[k] + my[k] * my[k] + c1) * (vx + vy + c2);
    total += num / den;
  }
  return total / static_cast<double>(mx.size());
}

double ssim(ComplexImage const& x, ComplexImage const& y) { return ssim(magnitude(x), magnitude(y)); }

MetricReport report(MultishotImage const& truth, MultishotImage const& recon)
{
  if (truth.n_shots() != recon.n_shots()) {
    throw DimensionError("report: truth has " + std::to_string(truth.n_shots()) + " shots, reconstruction has " +
                         std::to_string(recon.n_shots()));
  }
  MetricReport rep;
  for (long i = 0; i < truth.n_shots(); ++i) {
    RealImage const a = magnitude(truth[i]);
    RealImage const b = magnitude(recon[i]);
    rep.psnr.push_back(psnr(a, b));
    rep.ssim.push_back(ssim(a, b));
  }
  double sp = 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < rep.psnr.size(); ++i) {
    sp += rep.psnr[i];
    ss += rep.ssim[i];
  }
  if (!rep.psnr.empty()) {
    rep.mean_psnr = sp / static_cast<double>(rep.psnr.size());
    rep.mean_ssim = ss / static_cast<double>(rep.ssim.size());
  }
  return rep;
}

}  // namespace mussels
