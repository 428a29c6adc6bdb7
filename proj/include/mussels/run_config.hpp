#pragma once

// One JSON document holding every tunable of a run. Missing keys take their
// defaults; unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mussels/hankel.hpp"
#include "mussels/modl.hpp"
#include "mussels/simulate.hpp"
#include "mussels/solvers.hpp"

namespace mussels {

struct NetworkConfig {
  std::vector<long> hidden_widths = nn::default_widths();
};

struct TrainSection {
  int epochs = 30;
  int batch_size = 4;
  nn::AdamConfig adam;
  double val_fraction = 0.1;
};

struct RunConfig {
  std::uint64_t seed = 0;
  SimSpec sim;  // sim.seed is ignored; per-example seeds derive from seed
  SolverConfig solver;
  FilterSupport filter_support{3, 3};
  UnrollConfig unroll;
  NetworkConfig network;
  TrainSection train;
  long n_examples = 2;
  std::string dataset_path;
  std::string checkpoint_path;

  void validate() const;  // throws ConfigError
};

nlohmann::json to_json(RunConfig const& cfg);
RunConfig run_config_from_json(nlohmann::json const& doc);  // throws ConfigError
RunConfig load_run_config(std::filesystem::path const& path);
void save_run_config(std::filesystem::path const& path, RunConfig const& cfg);

// Seeds for the independent parts of a run.
std::uint64_t example_seed(std::uint64_t run_seed, long index);
std::uint64_t init_seed(std::uint64_t run_seed);
std::uint64_t train_seed(std::uint64_t run_seed);

}  // namespace mussels
