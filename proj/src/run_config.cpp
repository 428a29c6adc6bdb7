#include "mussels/run_config.hpp"

#include <fstream>
#include <set>

#include "mussels/errors.hpp"
#include "mussels/random.hpp"

namespace mussels {

using nlohmann::json;

void RunConfig::validate() const
{
  sim.validate();
  solver.validate();
  unroll.validate();
  if (filter_support.rows < 1 || filter_support.cols < 1 || filter_support.rows % 2 == 0 ||
      filter_support.cols % 2 == 0) {
    throw ConfigError("solver.filter_support: extents must be odd and positive");
  }
  if (network.hidden_widths.empty()) {
    throw ConfigError("network.hidden_widths: at least one hidden layer required");
  }
  for (long w : network.hidden_widths) {
    if (w < 1) {
      throw ConfigError("network.hidden_widths: widths must be positive");
    }
  }
  if (train.epochs < 0 || train.batch_size < 1) {
    throw ConfigError("train: epochs must be >= 0 and batch_size >= 1");
  }
  if (!(train.adam.step_size > 0.0) || !(train.adam.beta1 >= 0.0 && train.adam.beta1 < 1.0) ||
      !(train.adam.beta2 >= 0.0 && train.adam.beta2 < 1.0) || !(train.adam.eps >= 0.0)) {
    throw ConfigError("train: invalid Adam hyperparameters");
  }
  if (!(train.val_fraction >= 0.0 && train.val_fraction < 1.0)) {
    throw ConfigError("train.val_fraction: must lie in [0, 1)");
  }
  if (n_examples < 1) {
    throw ConfigError("dataset.n_examples: must be at least 1");
  }
}

json to_json(RunConfig const& cfg)
{
  return {
      {"seed", cfg.seed},
      {"sim",
       {{"rows", cfg.sim.rows},
        {"cols", cfg.sim.cols},
        {"n_shots", cfg.sim.n_shots},
        {"n_coils", cfg.sim.n_coils},
        {"phase_support", {cfg.sim.phase_support.rows, cfg.sim.phase_support.cols}},
        {"sigma", cfg.sim.sigma}}},
      {"solver",
       {{"beta", cfg.solver.beta},
        {"lam", cfg.solver.lam},
        {"eps", cfg.solver.eps},
        {"outer_iters", cfg.solver.outer_iters},
        {"cg_iters", cfg.solver.cg_iters},
        {"cg_tol", cfg.solver.cg_tol},
        {"z_update", std::string(to_string(cfg.solver.z_update_mode))},
        {"filter_support", {cfg.filter_support.rows, cfg.filter_support.cols}}}},
      {"unroll",
       {{"n_unrolls", cfg.unroll.n_unrolls},
        {"cg_iters", cfg.unroll.cg_iters},
        {"lambda1", cfg.unroll.lambda1},
        {"lambda2", cfg.unroll.lambda2},
        {"mode", std::string(to_string(cfg.unroll.mode))}}},
      {"network", {{"hidden_widths", cfg.network.hidden_widths}}},
      {"train",
       {{"epochs", cfg.train.epochs},
        {"batch_size", cfg.train.batch_size},
        {"step_size", cfg.train.adam.step_size},
        {"beta1", cfg.train.adam.beta1},
        {"beta2", cfg.train.adam.beta2},
        {"eps", cfg.train.adam.eps},
        {"val_fraction", cfg.train.val_fraction}}},
      {"dataset", {{"n_examples", cfg.n_examples}}},
      {"paths", {{"dataset", cfg.dataset_path}, {"checkpoint", cfg.checkpoint_path}}},
  };
}

namespace {

// Reads keys of one object, rejecting any key not consumed by a reader.
class Section {
 public:
  Section(json const& doc, std::string path) : doc_(doc), path_(std::move(path))
  {
    if (!doc_.is_object()) {
      throw ConfigError(where() + ": expected an object");
    }
  }

  template <class T>
  void read(char const* key, T& out)
  {
    seen_.insert(key);
    if (!doc_.contains(key)) {
      return;
    }
    try {
      out = doc_.at(key).get<T>();
    } catch (json::exception const&) {
      throw ConfigError(where(key) + ": wrong type");
    }
  }

  void read_support(char const* key, FilterSupport& out)
  {
    std::vector<long> v{out.rows, out.cols};
    read(key, v);
    if (v.size() != 2) {
      throw ConfigError(where(key) + ": expected [rows, cols]");
    }
    out = {v[0], v[1]};
  }

  Section sub(char const* key)
  {
    seen_.insert(key);
    static json const empty = json::object();
    return Section(doc_.contains(key) ? doc_.at(key) : empty, where(key));
  }

  void finish() const
  {
    for (auto const& [key, value] : doc_.items()) {
      if (!seen_.contains(key)) {
        throw ConfigError(where(key.c_str()) + ": unknown key");
      }
    }
  }

 private:
  std::string where(char const* key = nullptr) const
  {
    std::string p = path_.empty() ? std::string("config") : path_;
    if (key == nullptr) {
      return p;
    }
    return path_.empty() ? std::string(key) : path_ + "." + key;
  }

  json const& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig run_config_from_json(json const& doc)
{
  RunConfig cfg;
  Section root(doc, "");
  root.read("seed", cfg.seed);
  {
    Section s = root.sub("sim");
    s.read("rows", cfg.sim.rows);
    s.read("cols", cfg.sim.cols);
    s.read("n_shots", cfg.sim.n_shots);
    s.read("n_coils", cfg.sim.n_coils);
    s.read_support("phase_support", cfg.sim.phase_support);
    s.read("sigma", cfg.sim.sigma);
    s.finish();
  }
  {
    Section s = root.sub("solver");
    s.read("beta", cfg.solver.beta);
    s.read("lam", cfg.solver.lam);
    s.read("eps", cfg.solver.eps);
    s.read("outer_iters", cfg.solver.outer_iters);
    s.read("cg_iters", cfg.solver.cg_iters);
    s.read("cg_tol", cfg.solver.cg_tol);
    std::string mode(to_string(cfg.solver.z_update_mode));
    s.read("z_update", mode);
    cfg.solver.z_update_mode = parse_z_update_mode(mode);
    s.read_support("filter_support", cfg.filter_support);
    s.finish();
  }
  {
    Section s = root.sub("unroll");
    s.read("n_unrolls", cfg.unroll.n_unrolls);
    s.read("cg_iters", cfg.unroll.cg_iters);
    s.read("lambda1", cfg.unroll.lambda1);
    s.read("lambda2", cfg.unroll.lambda2);
    std::string mode(to_string(cfg.unroll.mode));
    s.read("mode", mode);
    cfg.unroll.mode = parse_unroll_mode(mode);
    s.finish();
  }
  {
    Section s = root.sub("network");
    s.read("hidden_widths", cfg.network.hidden_widths);
    s.finish();
  }
  {
    Section s = root.sub("train");
    s.read("epochs", cfg.train.epochs);
    s.read("batch_size", cfg.train.batch_size);
    s.read("step_size", cfg.train.adam.step_size);
    s.read("beta1", cfg.train.adam.beta1);
    s.read("beta2", cfg.train.adam.beta2);
    s.read("eps", cfg.train.adam.eps);
    s.read("val_fraction", cfg.train.val_fraction);
    s.finish();
  }
  {
    Section s = root.sub("dataset");
    s.read("n_examples", cfg.n_examples);
    s.finish();
  }
  {
    Section s = root.sub("paths");
    s.read("dataset", cfg.dataset_path);
    s.read("checkpoint", cfg.checkpoint_path);
    s.finish();
  }
  root.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(std::filesystem::path const& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (json::parse_error const& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return run_config_from_json(doc);
}

void save_run_config(std::filesystem::path const& path, RunConfig const& cfg)
{
  std::ofstream out(path, std::ios::trunc);
  out << to_json(cfg).dump(2) << '\n';
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

std::uint64_t example_seed(std::uint64_t run_seed, long index)
{
  return Rng::derive_seed(run_seed, "example/" + std::to_string(index));
}

std::uint64_t init_seed(std::uint64_t run_seed) { return Rng::derive_seed(run_seed, "init"); }

std::uint64_t train_seed(std::uint64_t run_seed) { return Rng::derive_seed(run_seed, "train"); }

}  // namespace mussels
