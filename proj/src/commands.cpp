#include "mussels/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mussels/array_file.hpp"
#include "mussels/errors.hpp"

namespace mussels {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::string num(double v, char const* fmt = "%.6f")
{
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string example_stem(long index)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "ex%03ld", index);
  return buf;
}

json read_json(fs::path const& path, char const* what)
{
  std::ifstream in(path);
  if (!in) {
    throw FormatError(std::string(what) + ": cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (json::parse_error const& e) {
    throw FormatError(std::string(what) + ": invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(fs::path const& path, json const& doc)
{
  std::ofstream out(path, std::ios::trunc);
  out << doc.dump(2) << '\n';
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

void write_text(fs::path const& path, std::string const& text)
{
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  out << text;
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

template <class T>
T field(json const& doc, char const* key, char const* what)
{
  if (!doc.is_object() || !doc.contains(key)) {
    throw FormatError(std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (json::exception const&) {
    throw FormatError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

void prepare_out(fs::path const& out, RunConfig const& cfg)
{
  fs::create_directories(out);
  save_run_config(out / "config.json", cfg);
}

json unroll_json(UnrollConfig const& u)
{
  return {{"n_unrolls", u.n_unrolls},
          {"cg_iters", u.cg_iters},
          {"lambda1", u.lambda1},
          {"lambda2", u.lambda2},
          {"mode", std::string(to_string(u.mode))}};
}

json network_json(fs::path const& dir, std::string const& stem, std::string const& name,
                  nn::DenoiserParams const& p)
{
  json layers = json::array();
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto const& L = p.layers[l];
    std::string const base = stem + "." + name + "." + std::to_string(l);
    save_array(dir / (base + ".w.json"),
               make_array({L.out_ch, L.in_ch, L.kh, L.kw}, std::span<double const>(L.weights)));
    save_array(dir / (base + ".b.json"), make_array({L.out_ch}, std::span<double const>(L.bias)));
    layers.push_back({{"out_channels", L.out_ch},
                      {"in_channels", L.in_ch},
                      {"kernel", {L.kh, L.kw}},
                      {"activation", L.activation == nn::Activation::relu ? "relu" : "none"},
                      {"weights", base + ".w.json"},
                      {"bias", base + ".b.json"}});
  }
  return {{"io_channels", p.io_channels}, {"layers", layers}};
}

nn::DenoiserParams network_from_json(fs::path const& dir, json const& doc)
{
  char const* what = "checkpoint network";
  nn::DenoiserParams p;
  p.io_channels = field<long>(doc, "io_channels", what);
  for (auto const& l : field<json>(doc, "layers", what)) {
    auto const kernel = field<std::vector<long>>(l, "kernel", what);
    if (kernel.size() != 2) {
      throw FormatError("checkpoint network: kernel must be [rows, cols]");
    }
    auto const act = field<std::string>(l, "activation", what);
    if (act != "relu" && act != "none") {
      throw FormatError("checkpoint network: unknown activation '" + act + "'");
    }
    nn::ConvLayer L(field<long>(l, "out_channels", what), field<long>(l, "in_channels", what), kernel[0], kernel[1],
                    act == "relu" ? nn::Activation::relu : nn::Activation::none);
    auto const w = load_array(dir / field<std::string>(l, "weights", what)).real_values();
    auto const b = load_array(dir / field<std::string>(l, "bias", what)).real_values();
    if (w.size() != L.weights.size() || b.size() != L.bias.size()) {
      throw DimensionError("checkpoint network: payload size does not match the declared layer shape");
    }
    L.weights = w;
    L.bias = b;
    p.layers.push_back(std::move(L));
  }
  p.validate();
  return p;
}

struct MethodRow {
  long example;
  MetricReport rep;
};

std::string metrics_csv(std::vector<std::pair<Method, std::vector<MethodRow>>> const& results)
{
  std::string csv = "example,method,psnr,ssim\n";
  for (auto const& [method, rows] : results) {
    double sp = 0.0;
    double ss = 0.0;
    for (auto const& r : rows) {
      csv += std::to_string(r.example) + "," + std::string(to_string(method)) + "," + num(r.rep.mean_psnr) + "," +
             num(r.rep.mean_ssim) + "\n";
      sp += r.rep.mean_psnr;
      ss += r.rep.mean_ssim;
    }
    double const n = static_cast<double>(std::max<std::size_t>(rows.size(), 1));
    csv += "mean," + std::string(to_string(method)) + "," + num(sp / n) + "," + num(ss / n) + "\n";
  }
  return csv;
}

}  // namespace

std::vector<DatasetExample> load_dataset(fs::path const& dir)
{
  if (dir.empty()) {
    throw ConfigError("no dataset given (positional argument or paths.dataset)");
  }
  char const* what = "manifest";
  json const manifest = read_json(dir / "manifest.json", what);
  if (field<std::string>(manifest, "format", what) != "mussels-dataset") {
    throw FormatError("manifest: field 'format' is not mussels-dataset");
  }
  if (field<int>(manifest, "version", what) != kFormatVersion) {
    throw FormatError("manifest: unsupported version");
  }
  auto const truth_shape = field<std::vector<long>>(manifest, "truth_shape", what);
  auto const y_shape = field<std::vector<long>>(manifest, "y_shape", what);
  auto const entries = field<json>(manifest, "examples", what);
  if (field<long>(manifest, "n_examples", what) != static_cast<long>(entries.size())) {
    throw FormatError("manifest: n_examples does not match the example list");
  }
  std::vector<DatasetExample> out;
  for (auto const& e : entries) {
    auto const index = field<long>(e, "index", what);
    Array const ta = load_array(dir / field<std::string>(e, "truth", what));
    Array const ya = load_array(dir / field<std::string>(e, "y", what));
    if (ta.shape != truth_shape || ya.shape != y_shape) {
      throw DimensionError("dataset example " + std::to_string(index) + ": array shapes differ from the manifest");
    }
    AcquisitionOperator op(coil_maps_from_array(load_array(dir / field<std::string>(e, "coils", what))),
                           shot_masks_from_array(load_array(dir / field<std::string>(e, "masks", what))));
    KspaceData y = kspace_from_array(ya);
    MultishotImage truth = multishot_from_array(ta);
    if (y.n_shots() != op.n_shots() || y.n_coils() != op.n_coils() || y.rows() != op.rows() ||
        y.cols() != op.cols() || truth.n_shots() != op.n_shots() || truth.rows() != op.rows() ||
        truth.cols() != op.cols()) {
      throw DimensionError("dataset example " + std::to_string(index) + ": data does not match coils and masks");
    }
    out.push_back({index, {std::move(y), std::move(truth), std::move(op)}});
  }
  return out;
}

void save_checkpoint(fs::path const& path, Checkpoint const& ckpt)
{
  fs::path const dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  fs::create_directories(dir);
  std::string const stem = path.stem().string();
  json doc = {{"format", "mussels-checkpoint"},
              {"version", kFormatVersion},
              {"unroll", unroll_json(ckpt.unroll)},
              {"hidden_widths", ckpt.hidden_widths},
              {"dk", network_json(dir, stem, "dk", ckpt.params.dk)},
              {"di", network_json(dir, stem, "di", ckpt.params.di)}};
  write_json(path, doc);
}

Checkpoint load_checkpoint(fs::path const& path)
{
  if (path.empty()) {
    throw ConfigError("a checkpoint path is required for modl methods");
  }
  char const* what = "checkpoint";
  json const doc = read_json(path, what);
  if (field<std::string>(doc, "format", what) != "mussels-checkpoint") {
    throw FormatError("checkpoint: field 'format' is not mussels-checkpoint");
  }
  if (field<int>(doc, "version", what) != kFormatVersion) {
    throw FormatError("checkpoint: unsupported version");
  }
  fs::path const dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  Checkpoint ckpt;
  json const u = field<json>(doc, "unroll", what);
  ckpt.unroll.n_unrolls = field<int>(u, "n_unrolls", what);
  ckpt.unroll.cg_iters = field<int>(u, "cg_iters", what);
  ckpt.unroll.lambda1 = field<double>(u, "lambda1", what);
  ckpt.unroll.lambda2 = field<double>(u, "lambda2", what);
  ckpt.unroll.mode = parse_unroll_mode(field<std::string>(u, "mode", what));
  ckpt.hidden_widths = field<std::vector<long>>(doc, "hidden_widths", what);
  ckpt.params.dk = network_from_json(dir, field<json>(doc, "dk", what));
  ckpt.params.di = network_from_json(dir, field<json>(doc, "di", what));
  return ckpt;
}

std::string_view to_string(Method method)
{
  switch (method) {
    case Method::zero_filled:
      return "zero-filled";
    case Method::irls:
      return "irls";
    case Method::modl_kspace:
      return "modl-kspace";
    case Method::modl_hybrid:
      return "modl-hybrid";
  }
  return "?";
}

Method parse_method(std::string_view name)
{
  for (Method m : {Method::zero_filled, Method::irls, Method::modl_kspace, Method::modl_hybrid}) {
    if (to_string(m) == name) {
      return m;
    }
  }
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

MultishotImage reconstruct(Method method, TrainingExample const& ex, RunConfig const& cfg, Checkpoint const* ckpt)
{
  switch (method) {
    case Method::zero_filled:
      return apply_AH(ex.op, ex.y);
    case Method::irls:
      return irls_mussels(ex.y, ex.op, cfg.filter_support, cfg.solver).rho;
    case Method::modl_kspace:
    case Method::modl_hybrid: {
      UnrollMode const want = method == Method::modl_hybrid ? UnrollMode::hybrid : UnrollMode::kspace_only;
      if (ckpt == nullptr) {
        throw ConfigError(std::string(to_string(method)) + " needs a checkpoint");
      }
      if (ckpt->unroll.mode != want) {
        throw ConfigError(std::string(to_string(method)) + ": checkpoint was trained in " +
                          std::string(to_string(ckpt->unroll.mode)) + " mode");
      }
      if (ckpt->params.dk.n_shots() != ex.op.n_shots()) {
        throw DimensionError("checkpoint expects " + std::to_string(ckpt->params.dk.n_shots()) +
                             " shots, dataset has " + std::to_string(ex.op.n_shots()));
      }
      return unrolled_forward(ex.y, ex.op, ckpt->params, ckpt->unroll);
    }
  }
  throw ConfigError("unknown method");
}

void cmd_simulate(RunConfig const& cfg, fs::path const& out)
{
  cfg.validate();
  prepare_out(out, cfg);
  json examples = json::array();
  for (long k = 0; k < cfg.n_examples; ++k) {
    SimSpec spec = cfg.sim;
    spec.seed = example_seed(cfg.seed, k);
    RealImage const magnitude = gen_phantom(spec.rows, spec.cols, spec.seed);
    Acquisition const acq = simulate_acquisition(magnitude, spec);
    std::vector<ComplexImage> phases;
    for (auto const& p : acq.phases) {
      phases.push_back(p.values);
    }
    std::string const stem = example_stem(k);
    save_array(out / (stem + "_truth.json"), to_array(acq.truth));
    save_array(out / (stem + "_y.json"), to_array(acq.y));
    save_array(out / (stem + "_coils.json"), to_array(acq.op.coil_maps()));
    save_array(out / (stem + "_masks.json"), to_array(acq.op.shot_masks()));
    save_array(out / (stem + "_phases.json"), to_array(MultishotImage(std::move(phases))));
    save_array(out / (stem + "_magnitude.json"), to_array(magnitude));
    examples.push_back({{"index", k},
                        {"seed", spec.seed},
                        {"truth", stem + "_truth.json"},
                        {"y", stem + "_y.json"},
                        {"coils", stem + "_coils.json"},
                        {"masks", stem + "_masks.json"},
                        {"phases", stem + "_phases.json"},
                        {"magnitude", stem + "_magnitude.json"}});
  }
  json manifest = {{"format", "mussels-dataset"},
                   {"version", kFormatVersion},
                   {"n_examples", cfg.n_examples},
                   {"truth_shape", {cfg.sim.n_shots, cfg.sim.rows, cfg.sim.cols}},
                   {"y_shape", {cfg.sim.n_shots, cfg.sim.n_coils, cfg.sim.rows, cfg.sim.cols}},
                   {"examples", examples}};
  write_json(out / "manifest.json", manifest);
}

void cmd_reconstruct(RunConfig const& cfg, Method method, fs::path const& out)
{
  cfg.validate();
  auto const data = load_dataset(cfg.dataset_path);
  Checkpoint ckpt;
  bool const needs_ckpt = method == Method::modl_kspace || method == Method::modl_hybrid;
  if (needs_ckpt) {
    ckpt = load_checkpoint(cfg.checkpoint_path);
  }
  prepare_out(out, cfg);
  std::vector<MethodRow> rows;
  for (auto const& ex : data) {
    MultishotImage const rho = reconstruct(method, ex.data, cfg, needs_ckpt ? &ckpt : nullptr);
    std::string const stem = example_stem(ex.index);
    save_array(out / (stem + "_recon.json"), to_array(rho));
    save_array(out / (stem + "_sos.json"), to_array(sos(rho)));
    rows.push_back({ex.index, report(ex.data.truth, rho)});
  }
  write_text(out / "metrics.csv", metrics_csv({{method, rows}}));
}

void cmd_train(RunConfig const& cfg, fs::path const& out)
{
  cfg.validate();
  auto const data = load_dataset(cfg.dataset_path);
  if (data.empty()) {
    throw DimensionError("train: dataset has no examples");
  }
  auto n_val = static_cast<std::size_t>(std::floor(cfg.train.val_fraction * static_cast<double>(data.size())));
  n_val = std::min(n_val, data.size() - 1);
  std::vector<TrainingExample> train;
  std::vector<TrainingExample> val;
  for (std::size_t k = 0; k < data.size(); ++k) {
    (k < data.size() - n_val ? train : val).push_back(data[k].data);
  }
  prepare_out(out, cfg);

  long const n_shots = train.front().op.n_shots();
  Checkpoint ckpt{cfg.unroll, cfg.network.hidden_widths,
                  make_modl_params(n_shots, cfg.network.hidden_widths, init_seed(cfg.seed))};
  fs::path const ckpt_path = out / "checkpoint.json";
  save_checkpoint(ckpt_path, ckpt);

  auto write_history = [&](std::vector<EpochLoss> const& history) {
    std::string csv = "epoch,train_loss,val_loss\n";
    for (auto const& h : history) {
      csv += std::to_string(h.epoch) + "," + num(h.train_loss, "%.12e") + "," + num(h.val_loss, "%.12e") + "\n";
    }
    write_text(out / "loss.csv", csv);
  };
  TrainConfig tcfg{cfg.train.epochs, cfg.train.batch_size, cfg.train.adam, train_seed(cfg.seed)};
  auto on_epoch = [&](int, ModlParams const& params, std::vector<EpochLoss> const& history) {
    ckpt.params = params;
    save_checkpoint(ckpt_path, ckpt);
    write_history(history);
  };
  TrainResult res = train_modl(train, val, ckpt.params, cfg.unroll, tcfg, on_epoch);
  ckpt.params = std::move(res.params);
  save_checkpoint(ckpt_path, ckpt);
  write_history(res.history);
}

void cmd_evaluate(RunConfig const& cfg, std::vector<Method> const& methods, std::vector<fs::path> const& checkpoints,
                  fs::path const& out)
{
  cfg.validate();
  auto const data = load_dataset(cfg.dataset_path);
  std::vector<Checkpoint> ckpts;
  for (auto const& p : checkpoints) {
    ckpts.push_back(load_checkpoint(p));
  }
  auto find_ckpt = [&](Method m) -> Checkpoint const* {
    UnrollMode const want = m == Method::modl_hybrid ? UnrollMode::hybrid : UnrollMode::kspace_only;
    for (auto const& c : ckpts) {
      if (c.unroll.mode == want) {
        return &c;
      }
    }
    throw ConfigError(std::string(to_string(m)) + ": no checkpoint of that mode was given");
  };
  prepare_out(out, cfg);
  std::vector<std::pair<Method, std::vector<MethodRow>>> results;
  std::string summary = "method,n_examples,mean_psnr,std_psnr,mean_ssim,std_ssim\n";
  for (Method m : methods) {
    Checkpoint const* ck = (m == Method::modl_kspace || m == Method::modl_hybrid) ? find_ckpt(m) : nullptr;
    std::vector<MethodRow> rows;
    for (auto const& ex : data) {
      rows.push_back({ex.index, report(ex.data.truth, reconstruct(m, ex.data, cfg, ck))});
    }
    double mp = 0.0;
    double ms = 0.0;
    for (auto const& r : rows) {
      mp += r.rep.mean_psnr;
      ms += r.rep.mean_ssim;
    }
    double const n = static_cast<double>(rows.size());
    mp /= n;
    ms /= n;
    double vp = 0.0;
    double vs = 0.0;
    for (auto const& r : rows) {
      vp += (r.rep.mean_psnr - mp) * (r.rep.mean_psnr - mp);
      vs += (r.rep.mean_ssim - ms) * (r.rep.mean_ssim - ms);
    }
    summary += std::string(to_string(m)) + "," + std::to_string(rows.size()) + "," + num(mp) + "," +
               num(std::sqrt(vp / n)) + "," + num(ms) + "," + num(std::sqrt(vs / n)) + "\n";
    results.emplace_back(m, std::move(rows));
  }
  write_text(out / "metrics.csv", metrics_csv(results));
  write_text(out / "summary.csv", summary);
}

}  // namespace mussels
