#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mussels {

// Deterministic generator. Independent streams are derived from one run seed
// and a name ("phase/shot-2", "noise", ...), so adding a consumer never
// perturbs the draws of another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng stream(std::uint64_t seed, std::string_view name);
  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view name);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();   // standard normal, Box-Muller
  std::uint64_t below(std::uint64_t n);  // uniform on [0, n)

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mussels
