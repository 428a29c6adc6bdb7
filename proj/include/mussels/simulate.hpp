#pragma once

// Synthetic multishot acquisitions: random piecewise-constant phantoms,
// bandlimited unit-magnitude phase errors, smooth coil maps, interleaved shot
// masks and complex Gaussian noise. Every draw comes from a named stream of
// SimSpec::seed.

#include <cstdint>
#include <vector>

#include "mussels/forward_model.hpp"
#include "mussels/hankel.hpp"
#include "mussels/tensor.hpp"

namespace mussels {

struct SimSpec {
  long rows = 64;
  long cols = 64;
  long n_shots = 4;
  long n_coils = 4;
  FilterSupport phase_support{3, 3};
  double sigma = 0.0;  // std of the real and of the imaginary part of each noise sample
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct PhaseMap {
  ComplexImage values;  // |values| = 1 everywhere
};

// The bandlimited complex field before pointwise normalization.
ComplexImage phase_field(SimSpec const& spec, long shot_index);
PhaseMap gen_phase(SimSpec const& spec, long shot_index);

CoilMaps gen_coil_maps(SimSpec const& spec);

// Phase-encode line l (row index) belongs to shot l mod N.
ShotMasks gen_shot_masks(SimSpec const& spec);

// Random ellipse phantom with values in [0, 1] and maximum 1.
RealImage gen_phantom(long rows, long cols, std::uint64_t seed);

struct Acquisition {
  KspaceData y;
  MultishotImage truth;
  AcquisitionOperator op;
  std::vector<PhaseMap> phases;
};

Acquisition simulate_acquisition(RealImage const& magnitude, SimSpec const& spec);

// Same pipeline with explicit phases, coils and masks. Noise is drawn from the
// "noise" stream of seed, so acquisitions that differ only in sigma share one
// noise realization.
Acquisition simulate_acquisition(RealImage const& magnitude, std::vector<PhaseMap> phases, CoilMaps coils,
                                 ShotMasks masks, double sigma, std::uint64_t seed);

}  // namespace mussels
