#include "mussels/forward_model.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "mussels/errors.hpp"
#include "mussels/simd.hpp"

namespace mussels {

CoilMaps::CoilMaps(std::vector<ComplexImage> maps) : maps_(std::move(maps))
{
  if (maps_.empty()) {
    throw DimensionError("CoilMaps: need at least one coil");
  }
  auto const& first = maps_.front();
  for (auto const& m : maps_) {
    if (!m.same_shape(first)) {
      throw DimensionError("CoilMaps: coil maps differ in shape");
    }
  }
  for (std::size_t p = 0; p < first.size(); ++p) {
    double s = 0.0;
    for (auto const& m : maps_) {
      s += std::norm(m.values()[p]);
    }
    if (!(std::abs(s - 1.0) <= kSosTolerance)) {
      throw DimensionError("CoilMaps: sum of squares at pixel " + std::to_string(p) + " is " +
                           std::to_string(s) + ", expected 1");
    }
  }
}

std::size_t Mask::count() const
{
  std::size_t n = 0;
  for (auto b : bits) {
    n += b != 0;
  }
  return n;
}

ShotMasks::ShotMasks(std::vector<Mask> masks) : masks_(std::move(masks))
{
  if (masks_.empty()) {
    throw DimensionError("ShotMasks: need at least one shot");
  }
  auto const& first = masks_.front();
  for (auto const& m : masks_) {
    if (m.rows != first.rows || m.cols != first.cols ||
        m.bits.size() != static_cast<std::size_t>(m.rows * m.cols)) {
      throw DimensionError("ShotMasks: masks differ in shape");
    }
  }
  for (std::size_t p = 0; p < first.bits.size(); ++p) {
    int hits = 0;
    for (auto const& m : masks_) {
      hits += m.bits[p] != 0;
    }
    if (hits == 0) {
      throw DimensionError("ShotMasks: k-space sample " + std::to_string(p) + " is not covered by any shot");
    }
    if (hits > 1) {
      throw DimensionError("ShotMasks: k-space sample " + std::to_string(p) + " is sampled by more than one shot");
    }
  }
}

KspaceData::KspaceData(long n_shots, long n_coils, long rows, long cols)
    : n_shots_(n_shots),
      n_coils_(n_coils),
      rows_(rows),
      cols_(cols),
      samples_(static_cast<std::size_t>(n_shots * n_coils), ComplexImage(rows, cols))
{
  if (n_shots < 1 || n_coils < 1) {
    throw DimensionError("KspaceData: need at least one shot and one coil");
  }
}

namespace {

void require_conforming(KspaceData const& x, KspaceData const& y)
{
  if (x.n_shots() != y.n_shots() || x.n_coils() != y.n_coils() || x.rows() != y.rows() ||
      x.cols() != y.cols()) {
    throw DimensionError("KspaceData: shapes differ");
  }
}

void require_conforming(AcquisitionOperator const& op, MultishotImage const& rho)
{
  if (rho.n_shots() != op.n_shots() || rho.rows() != op.rows() || rho.cols() != op.cols()) {
    throw DimensionError("AcquisitionOperator: image stack is " + std::to_string(rho.n_shots()) + "x" +
                         std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()) +
                         ", operator expects " + std::to_string(op.n_shots()) + "x" +
                         std::to_string(op.rows()) + "x" + std::to_string(op.cols()));
  }
}

void require_conforming(AcquisitionOperator const& op, KspaceData const& y)
{
  if (y.n_shots() != op.n_shots() || y.n_coils() != op.n_coils() || y.rows() != op.rows() ||
      y.cols() != op.cols()) {
    throw DimensionError("AcquisitionOperator: k-space data does not match operator");
  }
}

void apply_mask(Mask const& m, ComplexImage& img)
{
  auto v = img.values();
  for (std::size_t p = 0; p < v.size(); ++p) {
    if (m.bits[p] == 0) {
      v[p] = 0.0;
    }
  }
}

}  // namespace

cplx inner(KspaceData const& x, KspaceData const& y)
{
  require_conforming(x, y);
  cplx s = 0.0;
  for (long i = 0; i < x.n_shots(); ++i) {
    for (long j = 0; j < x.n_coils(); ++j) {
      s += inner(x.at(i, j), y.at(i, j));
    }
  }
  return s;
}

double norm_sq(KspaceData const& x) { return inner(x, x).real(); }

AcquisitionOperator::AcquisitionOperator(CoilMaps coil_maps, ShotMasks shot_masks)
    : coil_maps_(std::move(coil_maps)), shot_masks_(std::move(shot_masks))
{
  if (coil_maps_.n_coils() == 0 || shot_masks_.n_shots() == 0) {
    throw DimensionError("AcquisitionOperator: empty coil maps or masks");
  }
  if (coil_maps_.rows() != shot_masks_.rows() || coil_maps_.cols() != shot_masks_.cols()) {
    throw DimensionError("AcquisitionOperator: coil map grid and mask grid differ");
  }
}

KspaceData apply_A(AcquisitionOperator const& op, MultishotImage const& rho)
{
  require_conforming(op, rho);
  auto const& k = simd::kernels();
  KspaceData y(op.n_shots(), op.n_coils(), op.rows(), op.cols());
  ComplexImage weighted(op.rows(), op.cols());
  for (long i = 0; i < op.n_shots(); ++i) {
    for (long j = 0; j < op.n_coils(); ++j) {
      k.cmul(op.coil_maps()[j].data(), rho[i].data(), weighted.data(), weighted.size());
      ComplexImage spec = fft2c(weighted);
      apply_mask(op.shot_masks()[i], spec);
      y.at(i, j) = std::move(spec);
    }
  }
  return y;
}

MultishotImage apply_AH(AcquisitionOperator const& op, KspaceData const& y)
{
  require_conforming(op, y);
  auto const& k = simd::kernels();
  MultishotImage out(op.n_shots(), op.rows(), op.cols());
  for (long i = 0; i < op.n_shots(); ++i) {
    for (long j = 0; j < op.n_coils(); ++j) {
      ComplexImage masked = y.at(i, j);
      apply_mask(op.shot_masks()[i], masked);
      ComplexImage img = ifft2c(masked);
      k.cmul_conj_acc(op.coil_maps()[j].data(), img.data(), out[i].data(), img.size());
    }
  }
  return out;
}

MultishotImage normal_op(AcquisitionOperator const& op, MultishotImage const& rho, double shift)
{
  if (!(shift >= 0.0)) {
    throw DimensionError("normal_op: shift must be non-negative");
  }
  require_conforming(op, rho);
  auto const& k = simd::kernels();
  MultishotImage out(op.n_shots(), op.rows(), op.cols());
  ComplexImage weighted(op.rows(), op.cols());
  for (long i = 0; i < op.n_shots(); ++i) {
    for (long j = 0; j < op.n_coils(); ++j) {
      k.cmul(op.coil_maps()[j].data(), rho[i].data(), weighted.data(), weighted.size());
      ComplexImage spec = fft2c(weighted);
      apply_mask(op.shot_masks()[i], spec);
      ComplexImage img = ifft2c(spec);
      k.cmul_conj_acc(op.coil_maps()[j].data(), img.data(), out[i].data(), img.size());
    }
    if (shift != 0.0) {
      k.caxpy(shift, rho[i].data(), out[i].data(), rho[i].size());
    }
  }
  return out;
}

KspaceData project_to_masks(AcquisitionOperator const& op, KspaceData y)
{
  require_conforming(op, y);
  for (long i = 0; i < y.n_shots(); ++i) {
    for (long j = 0; j < y.n_coils(); ++j) {
      apply_mask(op.shot_masks()[i], y.at(i, j));
    }
  }
  return y;
}

}  // namespace mussels
