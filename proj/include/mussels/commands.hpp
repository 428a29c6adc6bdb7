#pragma once

// Dataset and checkpoint persistence plus the four CLI commands. Every command
// writes its resolved config to <out>/config.json.

#include <filesystem>
#include <string>
#include <vector>

#include "mussels/metrics.hpp"
#include "mussels/modl.hpp"
#include "mussels/run_config.hpp"

namespace mussels {

// Dataset layout: manifest.json, config.json and per-example ArrayFiles
// exNNN_{truth,y,coils,masks,phases,magnitude}.
struct DatasetExample {
  long index = 0;
  TrainingExample data;
};

std::vector<DatasetExample> load_dataset(std::filesystem::path const& dir);

struct Checkpoint {
  UnrollConfig unroll;
  std::vector<long> hidden_widths;
  ModlParams params;
};

// JSON header at path; layer payloads are ArrayFiles beside it.
void save_checkpoint(std::filesystem::path const& path, Checkpoint const& ckpt);
Checkpoint load_checkpoint(std::filesystem::path const& path);

enum class Method { zero_filled, irls, modl_kspace, modl_hybrid };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);  // throws ConfigError

// Reconstructs one example. modl methods need a checkpoint whose unroll mode
// matches the method.
MultishotImage reconstruct(Method method, TrainingExample const& ex, RunConfig const& cfg,
                           Checkpoint const* ckpt = nullptr);

void cmd_simulate(RunConfig const& cfg, std::filesystem::path const& out);
// Uses cfg.dataset_path and, for modl methods, cfg.checkpoint_path.
void cmd_reconstruct(RunConfig const& cfg, Method method, std::filesystem::path const& out);
void cmd_train(RunConfig const& cfg, std::filesystem::path const& out);
// Runs every listed method and writes metrics.csv plus summary.csv (mean and
// standard deviation per method). Each checkpoint serves the modl method of
// its own mode.
void cmd_evaluate(RunConfig const& cfg, std::vector<Method> const& methods,
                  std::vector<std::filesystem::path> const& checkpoints, std::filesystem::path const& out);

}  // namespace mussels
