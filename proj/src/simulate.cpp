#include "mussels/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mussels/errors.hpp"
#include "mussels/random.hpp"

namespace mussels {

void SimSpec::validate() const
{
  if (rows < 1 || cols < 1) {
    throw ConfigError("sim: grid must be at least 1x1");
  }
  if (n_shots < 1 || n_coils < 1) {
    throw ConfigError("sim: n_shots and n_coils must be at least 1");
  }
  if (n_shots > rows) {
    throw ConfigError("sim: n_shots exceeds the number of phase-encode lines");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sim: sigma must be finite and non-negative");
  }
  try {
    validate_support(phase_support, rows, cols);
  } catch (DimensionError const& e) {
    throw ConfigError(std::string("sim: phase support: ") + e.what());
  }
}

ComplexImage phase_field(SimSpec const& spec, long shot_index)
{
  spec.validate();
  Rng rng = Rng::stream(spec.seed, "phase/shot-" + std::to_string(shot_index));
  ComplexImage spectrum(spec.rows, spec.cols);
  long const r0 = spec.rows / 2 - spec.phase_support.rows / 2;
  long const c0 = spec.cols / 2 - spec.phase_support.cols / 2;
  for (long u = 0; u < spec.phase_support.rows; ++u) {
    for (long v = 0; v < spec.phase_support.cols; ++v) {
      double const re = rng.normal();
      double const im = rng.normal();
      spectrum(r0 + u, c0 + v) = {re, im};
    }
  }
  return ifft2c(spectrum);
}

PhaseMap gen_phase(SimSpec const& spec, long shot_index)
{
  ComplexImage g = phase_field(spec, shot_index);
  for (auto& z : g.values()) {
    double const a = std::abs(z);
    z = a > 0.0 ? z / a : cplx{1.0, 0.0};
  }
  return {std::move(g)};
}

CoilMaps gen_coil_maps(SimSpec const& spec)
{
  spec.validate();
  double const cy = 0.5 * static_cast<double>(spec.rows - 1);
  double const cx = 0.5 * static_cast<double>(spec.cols - 1);
  double const width = 0.6 * static_cast<double>(std::max(spec.rows, spec.cols));
  std::vector<ComplexImage> maps;
  for (long j = 0; j < spec.n_coils; ++j) {
    double const theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(spec.n_coils);
    double const py = cy + 0.5 * static_cast<double>(spec.rows) * std::sin(theta);
    double const px = cx + 0.5 * static_cast<double>(spec.cols) * std::cos(theta);
    cplx const phase = std::polar(1.0, theta);
    ComplexImage m(spec.rows, spec.cols);
    for (long r = 0; r < spec.rows; ++r) {
      for (long c = 0; c < spec.cols; ++c) {
        double const dy = static_cast<double>(r) - py;
        double const dx = static_cast<double>(c) - px;
        m(r, c) = phase * std::exp(-(dy * dy + dx * dx) / (2.0 * width * width));
      }
    }
    maps.push_back(std::move(m));
  }
  for (long r = 0; r < spec.rows; ++r) {
    for (long c = 0; c < spec.cols; ++c) {
      double s = 0.0;
      for (auto const& m : maps) {
        s += std::norm(m(r, c));
      }
      double const inv = 1.0 / std::sqrt(s);
      for (auto& m : maps) {
        m(r, c) *= inv;
      }
    }
  }
  return CoilMaps(std::move(maps));
}

ShotMasks gen_shot_masks(SimSpec const& spec)
{
  spec.validate();
  std::vector<Mask> masks(static_cast<std::size_t>(spec.n_shots), Mask(spec.rows, spec.cols));
  for (long line = 0; line < spec.rows; ++line) {
    auto& m = masks[static_cast<std::size_t>(line % spec.n_shots)];
    for (long c = 0; c < spec.cols; ++c) {
      m.bits[static_cast<std::size_t>(line * spec.cols + c)] = 1;
    }
  }
  return ShotMasks(std::move(masks));
}

RealImage gen_phantom(long rows, long cols, std::uint64_t seed)
{
  if (rows < 1 || cols < 1) {
    throw DimensionError("gen_phantom: grid must be at least 1x1");
  }
  Rng rng = Rng::stream(seed, "phantom");
  struct Ellipse {
    double y, x, a, b, angle, value;
  };
  std::vector<Ellipse> ellipses;
  // head outline, then a slightly darker interior, then random features
  double const tilt = rng.uniform(-0.2, 0.2);
  double const ha = rng.uniform(0.75, 0.9);
  double const hb = rng.uniform(0.6, 0.75);
  ellipses.push_back({0.0, 0.0, ha, hb, tilt, 1.0});
  ellipses.push_back({0.0, 0.0, 0.9 * ha, 0.88 * hb, tilt, -0.6});
  int const features = 4 + static_cast<int>(rng.below(5));
  for (int k = 0; k < features; ++k) {
    Ellipse e{};
    e.y = rng.uniform(-0.5, 0.5) * ha;
    e.x = rng.uniform(-0.5, 0.5) * hb;
    e.a = rng.uniform(0.05, 0.3);
    e.b = rng.uniform(0.05, 0.3);
    e.angle = rng.uniform(0.0, std::numbers::pi);
    e.value = rng.uniform(-0.2, 0.5);
    ellipses.push_back(e);
  }
  RealImage img(rows, cols);
  for (long r = 0; r < rows; ++r) {
    double const y = 2.0 * (static_cast<double>(r) + 0.5) / static_cast<double>(rows) - 1.0;
    for (long c = 0; c < cols; ++c) {
      double const x = 2.0 * (static_cast<double>(c) + 0.5) / static_cast<double>(cols) - 1.0;
      double v = 0.0;
      for (auto const& e : ellipses) {
        double const cs = std::cos(e.angle);
        double const sn = std::sin(e.angle);
        double const yy = cs * (y - e.y) + sn * (x - e.x);
        double const xx = -sn * (y - e.y) + cs * (x - e.x);
        if ((yy * yy) / (e.a * e.a) + (xx * xx) / (e.b * e.b) <= 1.0) {
          v += e.value;
        }
      }
      img(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  double peak = 0.0;
  for (double v : img.data) {
    peak = std::max(peak, v);
  }
  if (peak > 0.0) {
    for (double& v : img.data) {
      v /= peak;
    }
  }
  return img;
}

Acquisition simulate_acquisition(RealImage const& magnitude, std::vector<PhaseMap> phases, CoilMaps coils,
                                 ShotMasks masks, double sigma, std::uint64_t seed)
{
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("simulate_acquisition: sigma must be finite and non-negative");
  }
  if (static_cast<long>(phases.size()) != masks.n_shots()) {
    throw DimensionError("simulate_acquisition: one phase map per shot required");
  }
  for (double v : magnitude.data) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DimensionError("simulate_acquisition: magnitude must be finite and non-negative");
    }
  }
  AcquisitionOperator op(std::move(coils), std::move(masks));
  if (magnitude.rows != op.rows() || magnitude.cols != op.cols()) {
    throw DimensionError("simulate_acquisition: magnitude shape does not match the coil maps");
  }
  MultishotImage truth(op.n_shots(), op.rows(), op.cols());
  for (long i = 0; i < op.n_shots(); ++i) {
    auto const& phi = phases[static_cast<std::size_t>(i)].values;
    if (phi.rows() != op.rows() || phi.cols() != op.cols()) {
      throw DimensionError("simulate_acquisition: phase map " + std::to_string(i) + " has the wrong shape");
    }
    auto dst = truth[i].values();
    auto src = phi.values();
    for (std::size_t k = 0; k < dst.size(); ++k) {
      dst[k] = magnitude.data[k] * src[k];
    }
  }
  KspaceData y = apply_A(op, truth);
  if (sigma > 0.0) {
    Rng noise = Rng::stream(seed, "noise");
    for (long i = 0; i < op.n_shots(); ++i) {
      auto const& mask = op.shot_masks()[i];
      for (long j = 0; j < op.n_coils(); ++j) {
        auto samples = y.at(i, j).values();
        for (std::size_t k = 0; k < samples.size(); ++k) {
          if (mask.bits[k] != 0) {
            double const re = noise.normal();
            double const im = noise.normal();
            samples[k] += sigma * cplx{re, im};
          }
        }
      }
    }
  }
  return {std::move(y), std::move(truth), std::move(op), std::move(phases)};
}

Acquisition simulate_acquisition(RealImage const& magnitude, SimSpec const& spec)
{
  spec.validate();
  std::vector<PhaseMap> phases;
  for (long i = 0; i < spec.n_shots; ++i) {
    phases.push_back(gen_phase(spec, i));
  }
  return simulate_acquisition(magnitude, std::move(phases), gen_coil_maps(spec), gen_shot_masks(spec),
                              spec.sigma, spec.seed);
}

}  // namespace mussels
