// mussels: simulate, reconstruct, train and evaluate from the command line.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>

#include "mussels/commands.hpp"
#include "mussels/errors.hpp"

namespace fs = std::filesystem;
using namespace mussels;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string dataset;
  std::vector<std::string> methods;
  std::vector<std::string> checkpoints;
};

RunConfig resolve(Options const& o)
{
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.seed) {
    cfg.seed = *o.seed;
  }
  if (!o.dataset.empty()) {
    cfg.dataset_path = o.dataset;
  }
  if (o.checkpoints.size() == 1) {
    cfg.checkpoint_path = o.checkpoints.front();
  }
  cfg.validate();
  return cfg;
}

int run(int argc, char** argv)
{
  CLI::App app{"Multishot diffusion MRI reconstruction with structured low-rank and unrolled-network solvers"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool takes_dataset) {
    sub->add_option("--config", o.config, "run configuration (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "override the run seed");
    sub->add_option("--out", o.out, "output directory")->required();
    if (takes_dataset) {
      sub->add_option("dataset", o.dataset, "dataset directory (default: paths.dataset)");
    }
  };
  auto* simulate = app.add_subcommand("simulate", "generate a simulated dataset");
  common(simulate, false);
  auto* recon = app.add_subcommand("reconstruct", "reconstruct a dataset and score it");
  common(recon, true);
  recon->add_option("--method", o.methods, "irls | modl-kspace | modl-hybrid | zero-filled")
      ->required()
      ->expected(1);
  recon->add_option("--checkpoint", o.checkpoints, "trained network (modl methods)")->expected(1);
  auto* train = app.add_subcommand("train", "train an unrolled network on a dataset");
  common(train, true);
  auto* evaluate = app.add_subcommand("evaluate", "compare several methods on a dataset");
  common(evaluate, true);
  evaluate->add_option("--method", o.methods, "methods to run (repeatable; default zero-filled and irls)");
  evaluate->add_option("--checkpoint", o.checkpoints, "trained networks (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig const cfg = resolve(o);
    fs::path const out = o.out;
    if (simulate->parsed()) {
      cmd_simulate(cfg, out);
    } else if (recon->parsed()) {
      cmd_reconstruct(cfg, parse_method(o.methods.front()), out);
    } else if (train->parsed()) {
      cmd_train(cfg, out);
    } else if (evaluate->parsed()) {
      std::vector<Method> methods;
      for (auto const& m : o.methods) {
        methods.push_back(parse_method(m));
      }
      if (methods.empty()) {
        methods = {Method::zero_filled, Method::irls};
      }
      std::vector<fs::path> ckpts(o.checkpoints.begin(), o.checkpoints.end());
      if (ckpts.empty() && !cfg.checkpoint_path.empty()) {
        ckpts.emplace_back(cfg.checkpoint_path);
      }
      cmd_evaluate(cfg, methods, ckpts, out);
    }
  } catch (ConfigError const& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (NumericalError const& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (DimensionError const& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (FormatError const& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (fs::filesystem_error const& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
