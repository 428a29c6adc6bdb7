#pragma once

#include <cstdint>
#include <vector>

#include "mussels/tensor.hpp"

namespace mussels {

// Coil sensitivities s_j, root-sum-of-squares normalized to 1 at every pixel.
class CoilMaps {
 public:
  static constexpr double kSosTolerance = 1e-6;

  CoilMaps() = default;
  // Throws DimensionError when shapes differ or the SOS deviates by more than
  // kSosTolerance. Maps are never renormalized here.
  explicit CoilMaps(std::vector<ComplexImage> maps);

  long n_coils() const { return static_cast<long>(maps_.size()); }
  long rows() const { return maps_.front().rows(); }
  long cols() const { return maps_.front().cols(); }
  ComplexImage const& operator[](long j) const { return maps_[static_cast<std::size_t>(j)]; }
  std::vector<ComplexImage> const& maps() const { return maps_; }

 private:
  std::vector<ComplexImage> maps_;
};

// Binary k-space sampling pattern of one shot.
struct Mask {
  long rows = 0;
  long cols = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(long r, long c, std::uint8_t fill = 0)
      : rows(r), cols(c), bits(static_cast<std::size_t>(r * c), fill) {}
  bool operator()(long r, long c) const { return bits[static_cast<std::size_t>(r * cols + c)] != 0; }
  std::size_t count() const;
};

// Per-shot masks Theta_i; pairwise disjoint with a union covering the grid.
class ShotMasks {
 public:
  ShotMasks() = default;
  explicit ShotMasks(std::vector<Mask> masks);

  long n_shots() const { return static_cast<long>(masks_.size()); }
  long rows() const { return masks_.front().rows; }
  long cols() const { return masks_.front().cols; }
  Mask const& operator[](long i) const { return masks_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<Mask> masks_;
};

// Full-grid k-space for N shots by C coils; zero off each shot's mask.
class KspaceData {
 public:
  KspaceData() = default;
  KspaceData(long n_shots, long n_coils, long rows, long cols);

  long n_shots() const { return n_shots_; }
  long n_coils() const { return n_coils_; }
  long rows() const { return rows_; }
  long cols() const { return cols_; }

  ComplexImage& at(long shot, long coil) { return samples_[index(shot, coil)]; }
  ComplexImage const& at(long shot, long coil) const { return samples_[index(shot, coil)]; }

  friend bool operator==(KspaceData const&, KspaceData const&) = default;

 private:
  std::size_t index(long shot, long coil) const
  {
    return static_cast<std::size_t>(shot * n_coils_ + coil);
  }

  long n_shots_ = 0;
  long n_coils_ = 0;
  long rows_ = 0;
  long cols_ = 0;
  std::vector<ComplexImage> samples_;
};

cplx inner(KspaceData const& x, KspaceData const& y);
double norm_sq(KspaceData const& x);

// Multi-coil multishot SENSE operator. Immutable once built.
class AcquisitionOperator {
 public:
  AcquisitionOperator(CoilMaps coil_maps, ShotMasks shot_masks);

  CoilMaps const& coil_maps() const { return coil_maps_; }
  ShotMasks const& shot_masks() const { return shot_masks_; }
  long n_shots() const { return shot_masks_.n_shots(); }
  long n_coils() const { return coil_maps_.n_coils(); }
  long rows() const { return coil_maps_.rows(); }
  long cols() const { return coil_maps_.cols(); }

 private:
  CoilMaps coil_maps_;
  ShotMasks shot_masks_;
};

// samples[i][j] = mask_i . fft2c(s_j . rho_i)
KspaceData apply_A(AcquisitionOperator const& op, MultishotImage const& rho);
// shot i = sum_j conj(s_j) . ifft2c(mask_i . y[i][j])
MultishotImage apply_AH(AcquisitionOperator const& op, KspaceData const& y);
// A^H A rho + shift rho
MultishotImage normal_op(AcquisitionOperator const& op, MultishotImage const& rho, double shift);

// Zeroes every sample outside the shot's mask.
KspaceData project_to_masks(AcquisitionOperator const& op, KspaceData y);

}  // namespace mussels
