/* Copyright 2026 The SDANet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdanet/diagnostics.h"
#include "sdanet/errors.h"
#include "sdanet/metrics.h"

namespace sdanet::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCubeExtension = ".hsi";

struct DataFlags {
  std::string data_dir;
  std::uint32_t patch = 32;
  std::uint32_t stride = 0;  // 0: same as patch
  double val_fraction = 0.1;
};

struct ModelFlags {
  std::uint32_t scale = 4;
  std::uint32_t channels = 64;
  std::uint32_t blocks = 6;
  std::string variant = "full";
};

struct TrainFlags {
  std::uint32_t steps = 0;
  std::uint32_t batch = 16;
  double lr = 1e-4;
  double lambda = kDefaultSamWeight;
  std::uint64_t seed = 0;
  std::uint32_t eval_every = 0;
};

std::string env_data_dir() {
  const char* v = std::getenv(kDataDirEnv);
  return v ? v : "";
}

void add_data_flags(CLI::App* app, DataFlags& f) {
  f.data_dir = env_data_dir();
  app->add_option("--data-dir", f.data_dir,
                  std::string("Directory of *.hsi cubes (default $") +
                      kDataDirEnv + ")");
  app->add_option("--patch", f.patch, "LR patch size")->capture_default_str();
  app->add_option("--stride", f.stride, "LR patch stride (default: patch size)");
  app->add_option("--val-fraction", f.val_fraction, "Validation fraction")
      ->capture_default_str();
}

void add_model_flags(CLI::App* app, ModelFlags& f) {
  app->add_option("--scale", f.scale, "Upsampling factor (2, 4 or 8)")
      ->capture_default_str();
  app->add_option("--channels", f.channels, "Feature channels C")
      ->capture_default_str();
  app->add_option("--blocks", f.blocks, "Number of SDABs")->capture_default_str();
}

void add_train_flags(CLI::App* app, TrainFlags& f) {
  app->add_option("--steps", f.steps, "Optimizer steps")->required();
  app->add_option("--batch", f.batch, "Batch size")->capture_default_str();
  app->add_option("--lr", f.lr, "Initial learning rate")->capture_default_str();
  app->add_option("--lambda", f.lambda, "SAM loss weight")->capture_default_str();
  app->add_option("--seed", f.seed, "Seed for init and shuffling")
      ->capture_default_str();
  app->add_option("--eval-every", f.eval_every,
                  "Validation interval in steps (0: never)")
      ->capture_default_str();
}

Variant parse_variant(const std::string& name) {
  const auto v = variant_from_name(name);
  if (!v) throw ConfigError("unknown variant '" + name + "'");
  return *v;
}

SdanetConfig resolve_model(const ModelFlags& m, std::uint32_t bands,
                           std::uint64_t seed) {
  SdanetConfig c;
  c.bands = bands;
  c.feat_channels = m.channels;
  c.num_blocks = m.blocks;
  c.scale = m.scale;
  c.seed = static_cast<std::uint32_t>(seed);
  c.variant = parse_variant(m.variant);
  c.validate();
  return c;
}

TrainConfig resolve_train(const TrainFlags& t) {
  TrainConfig c;
  c.batch_size = t.batch;
  c.lr0 = t.lr;
  c.total_steps = t.steps;
  c.lambda = t.lambda;
  c.seed = t.seed;
  c.eval_every = t.eval_every;
  c.validate();
  return c;
}

void require_parent_dir(const std::string& path) {
  if (path.empty()) return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw IoError("output directory '" + parent.string() + "' does not exist");
  }
}

struct Dataset {
  std::uint32_t bands = 0;
  std::vector<PatchPair> train;
  std::vector<PatchPair> val;
};

Dataset load_dataset(const DataFlags& d, std::uint32_t scale,
                     std::uint64_t seed) {
  if (d.data_dir.empty()) {
    throw ConfigError(std::string("no data directory: pass --data-dir or set ") +
                      kDataDirEnv);
  }
  const std::vector<HsiCube> cubes = load_cube_dir(d.data_dir);
  if (cubes.empty()) {
    throw IoError("no *" + std::string(kCubeExtension) + " cubes in '" +
                  d.data_dir + "'");
  }
  std::vector<PatchPair> all;
  for (const HsiCube& c : cubes) {
    if (c.bands != cubes.front().bands) {
      throw DimensionError("cube '" + c.name + "' has " + std::to_string(c.bands) +
                           " bands, expected " +
                           std::to_string(cubes.front().bands));
    }
    auto p = extract_patches(c, d.patch, scale, d.stride ? d.stride : d.patch);
    all.insert(all.end(), std::make_move_iterator(p.begin()),
               std::make_move_iterator(p.end()));
  }
  auto [train, val] = split_train_val(std::move(all), d.val_fraction, seed);
  if (train.empty()) throw ConfigError("no training patches after the split");
  return Dataset{cubes.front().bands, std::move(train), std::move(val)};
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string config_line(const SdanetConfig& m, const TrainConfig& t,
                        const Dataset& data) {
  std::ostringstream os;
  os << "config batch=" << t.batch_size << " lr=" << t.lr0
     << " lambda=" << t.lambda << " steps=" << t.total_steps
     << " seed=" << t.seed << " scale=" << m.scale
     << " channels=" << m.feat_channels << " blocks=" << m.num_blocks
     << " variant=" << variant_name(m.variant) << " bands=" << m.bands
     << " train_patches=" << data.train.size()
     << " val_patches=" << data.val.size();
  return os.str();
}

void print_report(std::ostream& out, const MetricsReport& r, ReportFormat fmt) {
  if (fmt == ReportFormat::kTsv) {
    out << report_tsv_header() << '\n' << report_tsv_row(r) << '\n';
  } else {
    out << format_report(r) << '\n';
  }
}

// --- commands -------------------------------------------------------------

struct SynthArgs {
  std::uint64_t seed = 0;
  std::uint32_t height = 64, width = 64, bands = 8, endmembers = 4;
  std::string out;
};

void cmd_synth(const SynthArgs& a, std::ostream& out) {
  require_parent_dir(a.out);
  const HsiCube cube = synth_scene(a.seed, a.height, a.width, a.bands, a.endmembers);
  save_cube(cube, a.out);
  out << "wrote " << a.out << " " << cube.height << "x" << cube.width << "x"
      << cube.bands << '\n';
}

struct DegradeArgs {
  std::string in, out_lr;
  std::uint32_t scale = 4;
};

void cmd_degrade(const DegradeArgs& a, std::ostream& out) {
  require_parent_dir(a.out_lr);
  if (a.scale == 0) throw ConfigError("--scale must be positive");
  const HsiCube hr = load_cube(a.in);
  if (hr.height < a.scale || hr.width < a.scale) {
    throw DimensionError("cube " + std::to_string(hr.height) + "x" +
                         std::to_string(hr.width) + " smaller than scale " +
                         std::to_string(a.scale));
  }
  const HsiCube lr = bicubic_resize(hr, hr.height / a.scale, hr.width / a.scale);
  save_cube(lr, a.out_lr);
  out << "wrote " << a.out_lr << " " << lr.height << "x" << lr.width << "x"
      << lr.bands << '\n';
}

struct ImportArgs {
  std::string in, out, name;
  std::uint32_t height = 0, width = 0, bands = 0;
};

void cmd_import(const ImportArgs& a, std::ostream& out) {
  require_parent_dir(a.out);
  const HsiCube cube = import_raw(a.in, a.height, a.width, a.bands,
                                  a.name.empty() ? fs::path(a.in).stem().string()
                                                 : a.name);
  save_cube(cube, a.out);
  out << "wrote " << a.out << " " << cube.height << "x" << cube.width << "x"
      << cube.bands << '\n';
}

struct TrainArgs {
  DataFlags data;
  ModelFlags model;
  TrainFlags train;
  std::string ckpt;
  bool tsv = false;
};

void cmd_train(const TrainArgs& a, std::ostream& out) {
  TrainConfig tc = resolve_train(a.train);
  require_parent_dir(a.ckpt);
  const Dataset data = load_dataset(a.data, a.model.scale, a.train.seed);
  const SdanetConfig mc = resolve_model(a.model, data.bands, a.train.seed);
  tc.checkpoint_path = a.ckpt;
  tc.log = &out;
  out << config_line(mc, tc, data) << '\n';
  SdanetModel model = init_params(mc);
  train(model, data.train, data.val, tc);
  if (!data.val.empty()) {
    out << "final ";
    print_report(out, evaluate_model(model, data.val),
                 a.tsv ? ReportFormat::kTsv : ReportFormat::kText);
  }
  if (!a.ckpt.empty()) out << "checkpoint " << a.ckpt << '\n';
}

struct EvalArgs {
  std::string ckpt, lr_cube, hr_cube, out_sr, variant = "full";
  std::uint32_t scale = 4;
  bool bypass = false, bicubic = false, tsv = false;
};

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  require_parent_dir(a.out_sr);
  const HsiCube hr = load_cube(a.hr_cube);
  const ReportFormat fmt = a.tsv ? ReportFormat::kTsv : ReportFormat::kText;
  std::optional<SdanetModel> model;
  std::uint32_t scale = a.scale;
  if (!a.bypass && !a.bicubic) {
    if (a.ckpt.empty()) throw ConfigError("--ckpt is required unless --bypass or --bicubic");
    model = load_checkpoint(a.ckpt, parse_variant(a.variant));
    scale = model->config.scale;
  }
  if (a.bypass) {
    print_report(out, evaluate_all(hr, hr, scale), fmt);
    return;
  }
  HsiCube lr;
  if (!a.lr_cube.empty()) {
    lr = load_cube(a.lr_cube);
  } else {
    lr = bicubic_resize(hr, hr.height / scale, hr.width / scale);
  }
  if (static_cast<std::uint64_t>(lr.height) * scale != hr.height ||
      static_cast<std::uint64_t>(lr.width) * scale != hr.width ||
      lr.bands != hr.bands) {
    throw DimensionError("LR cube " + std::to_string(lr.height) + "x" +
                         std::to_string(lr.width) + "x" + std::to_string(lr.bands) +
                         " does not match HR cube " + std::to_string(hr.height) +
                         "x" + std::to_string(hr.width) + "x" +
                         std::to_string(hr.bands) + " at scale " +
                         std::to_string(scale));
  }
  const HsiCube sr = model ? super_resolve(*model, lr)
                           : bicubic_resize(lr, hr.height, hr.width);
  print_report(out, evaluate_all(sr, hr, scale), fmt);
  if (!a.out_sr.empty()) save_cube(sr, a.out_sr);
}

struct AblateArgs {
  DataFlags data;
  ModelFlags model;
  TrainFlags train;
  std::vector<std::string> variants{"full", "no_dcsa", "no_feffn",
                                    "fixed_k_full", "fixed_k_half"};
  bool tsv = false;
};

void cmd_ablate(const AblateArgs& a, std::ostream& out) {
  const TrainConfig tc = resolve_train(a.train);
  std::vector<Variant> variants;
  for (const std::string& v : a.variants) variants.push_back(parse_variant(v));
  const Dataset data = load_dataset(a.data, a.model.scale, a.train.seed);
  const SdanetConfig mc = resolve_model(a.model, data.bands, a.train.seed);
  if (data.val.empty()) throw ConfigError("ablation needs validation patches");
  const auto rows = run_ablation(mc, tc, data.train, data.val, variants);
  if (a.tsv) out << "variant\tparams\t" << report_tsv_header() << '\n';
  for (const AblationRow& r : rows) {
    if (a.tsv) {
      out << variant_name(r.variant) << '\t' << r.param_count << '\t'
          << report_tsv_row(r.report) << '\n';
    } else {
      out << "variant=" << variant_name(r.variant) << " params=" << r.param_count
          << " " << format_report(r.report) << '\n';
    }
  }
}

struct SweepArgs {
  DataFlags data;
  ModelFlags model;
  TrainFlags train;
  std::vector<double> lambdas{0.0, 0.2};
  bool tsv = false;
};

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const TrainConfig tc = resolve_train(a.train);
  const Dataset data = load_dataset(a.data, a.model.scale, a.train.seed);
  const SdanetConfig mc = resolve_model(a.model, data.bands, a.train.seed);
  if (data.val.empty()) throw ConfigError("sweep needs validation patches");
  const auto rows = lambda_sweep(mc, tc, data.train, data.val, a.lambdas);
  if (a.tsv) out << "lambda\tpix\tsam\ttotal\t" << report_tsv_header() << '\n';
  for (const SweepRow& r : rows) {
    if (a.tsv) {
      out << fixed(r.lambda, 4) << '\t' << fixed(r.final_loss.pix) << '\t'
          << fixed(r.final_loss.sam) << '\t' << fixed(r.final_loss.total) << '\t'
          << report_tsv_row(r.report) << '\n';
    } else {
      out << "lambda=" << fixed(r.lambda, 4) << " pix=" << fixed(r.final_loss.pix)
          << " sam=" << fixed(r.final_loss.sam)
          << " total=" << fixed(r.final_loss.total) << " "
          << format_report(r.report) << '\n';
    }
  }
}

struct GradcheckArgs {
  std::size_t size = 4;
  std::uint32_t bands = 3, channels = 8, blocks = 1, scale = 2;
  std::uint64_t seed = 0;
  double eps = 1e-5, floor = 1e-6, tol = 1e-4;
  std::string variant = "full";
};

void cmd_gradcheck(const GradcheckArgs& a, std::ostream& out) {
  SdanetConfig c;
  c.bands = a.bands;
  c.feat_channels = a.channels;
  c.num_blocks = a.blocks;
  c.scale = a.scale;
  c.seed = static_cast<std::uint32_t>(a.seed);
  c.variant = parse_variant(a.variant);
  c.validate();
  GradCheckOptions opts;
  opts.eps = a.eps;
  opts.abs_floor = a.floor;
  double worst = 0.0;
  for (const ModuleGradReport& r : gradcheck_modules(c, a.size, a.seed, opts)) {
    out << format_grad_report(r) << '\n';
    worst = std::max(worst, r.result.max_rel_error);
  }
  std::ostringstream w;
  w << std::scientific << std::setprecision(3) << worst;
  out << "worst=" << w.str() << " tol=" << a.tol
      << " status=" << (worst < a.tol ? "pass" : "fail") << '\n';
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Rewrites "<sub> ... --config FILE ..." into "<sub> --key value ... ..."
// with one flag per key=value line of FILE, skipping keys that are also given
// explicitly on the command line.
std::vector<std::string> expand_config(CLI::App& app, int argc,
                                       const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  if (args.size() < 2) return args;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args[1]);
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::string file;
  std::vector<std::string> rest;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (file.empty()) return args;

  std::ifstream in(file);
  if (!in) throw IoError("cannot open config file '" + file + "'");
  std::vector<std::string> injected;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(file + ":" + std::to_string(lineno) +
                        ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt == nullptr || key == "config") {
      throw ConfigError(file + ":" + std::to_string(lineno) + ": unknown key '" +
                        key + "' for '" + sub->get_name() + "'");
    }
    const bool explicit_flag = std::any_of(rest.begin(), rest.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (explicit_flag) continue;
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1" || value == "yes" || value == "on")
        injected.push_back(flag);
    } else {
      injected.push_back(flag);
      injected.push_back(value);
    }
  }
  std::vector<std::string> out{args[0], args[1]};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace

std::vector<HsiCube> load_cube_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("data directory '" + dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == kCubeExtension)
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<HsiCube> cubes;
  for (const fs::path& p : files) cubes.push_back(load_cube(p.string()));
  return cubes;
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Hyperspectral super-resolution with spectral dynamic attention",
               "sdanet"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic scene cube");
  s->add_option("--seed", synth.seed)->capture_default_str();
  s->add_option("--height", synth.height)->capture_default_str();
  s->add_option("--width", synth.width)->capture_default_str();
  s->add_option("--bands", synth.bands)->capture_default_str();
  s->add_option("--endmembers", synth.endmembers)->capture_default_str();
  s->add_option("--out", synth.out, "Output cube path")->required();

  DegradeArgs degrade;
  auto* d = app.add_subcommand("degrade", "Bicubic-downsample a cube");
  d->add_option("--in", degrade.in, "Input HR cube")->required();
  d->add_option("--scale", degrade.scale)->capture_default_str();
  d->add_option("--out-lr", degrade.out_lr, "Output LR cube")->required();

  ImportArgs import;
  auto* im = app.add_subcommand("import-raw",
                                "Convert a headerless float32 band-sequential file");
  im->add_option("--in", import.in)->required();
  im->add_option("--height", import.height)->required();
  im->add_option("--width", import.width)->required();
  im->add_option("--bands", import.bands)->required();
  im->add_option("--name", import.name, "Cube name (default: file stem)");
  im->add_option("--out", import.out)->required();

  TrainArgs trn;
  auto* t = app.add_subcommand("train", "Train a model on a cube directory");
  add_data_flags(t, trn.data);
  add_model_flags(t, trn.model);
  add_train_flags(t, trn.train);
  t->add_option("--variant", trn.model.variant)->capture_default_str();
  t->add_option("--ckpt", trn.ckpt, "Checkpoint output path");
  t->add_flag("--tsv", trn.tsv, "Tab-separated final report");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint on a cube pair");
  e->add_option("--ckpt", ev.ckpt);
  e->add_option("--lr-cube", ev.lr_cube, "LR input (default: degrade --hr-cube)");
  e->add_option("--hr-cube", ev.hr_cube)->required();
  e->add_option("--variant", ev.variant)->capture_default_str();
  e->add_option("--scale", ev.scale, "Scale for --bypass / --bicubic")
      ->capture_default_str();
  e->add_option("--out-sr", ev.out_sr, "Write the reconstructed cube");
  e->add_flag("--bypass", ev.bypass, "Evaluate the HR cube against itself");
  e->add_flag("--bicubic", ev.bicubic, "Use bicubic upsampling instead of a model");
  e->add_flag("--tsv", ev.tsv);

  AblateArgs abl;
  auto* a = app.add_subcommand("ablate", "Train and evaluate the five variants");
  add_data_flags(a, abl.data);
  add_model_flags(a, abl.model);
  add_train_flags(a, abl.train);
  a->add_option("--variants", abl.variants)->delimiter(',')->capture_default_str();
  a->add_flag("--tsv", abl.tsv);

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Train one model per SAM loss weight");
  add_data_flags(w, sw.data);
  add_model_flags(w, sw.model);
  add_train_flags(w, sw.train);
  w->add_option("--lambdas", sw.lambdas)->delimiter(',')->capture_default_str();
  w->add_flag("--tsv", sw.tsv);

  GradcheckArgs gc;
  auto* g = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  g->add_option("--size", gc.size, "LR input size")->capture_default_str();
  g->add_option("--bands", gc.bands)->capture_default_str();
  g->add_option("--channels", gc.channels)->capture_default_str();
  g->add_option("--blocks", gc.blocks)->capture_default_str();
  g->add_option("--scale", gc.scale)->capture_default_str();
  g->add_option("--seed", gc.seed)->capture_default_str();
  g->add_option("--eps", gc.eps)->capture_default_str();
  g->add_option("--floor", gc.floor, "Relative-error denominator floor")
      ->capture_default_str();
  g->add_option("--tol", gc.tol)->capture_default_str();
  g->add_option("--variant", gc.variant)->capture_default_str();

  std::string config_path;
  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) {
    sub->add_option("--config", config_path,
                    "key=value file pre-populating flags (explicit flags win)");
  }

  try {
    std::vector<std::string> args = expand_config(app, argc, argv);
    std::vector<const char*> raw;
    for (const std::string& a : args) raw.push_back(a.c_str());
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& ex) {
    err << "error[usage]: " << ex.what() << '\n';
    return 2;
  } catch (const Error& ex) {
    err << "error[" << ex.kind() << "]: " << ex.what() << '\n';
    return 1;
  }

  try {
    if (s->parsed()) cmd_synth(synth, out);
    else if (d->parsed()) cmd_degrade(degrade, out);
    else if (im->parsed()) cmd_import(import, out);
    else if (t->parsed()) cmd_train(trn, out);
    else if (e->parsed()) cmd_eval(ev, out);
    else if (a->parsed()) cmd_ablate(abl, out);
    else if (w->parsed()) cmd_sweep(sw, out);
    else if (g->parsed()) cmd_gradcheck(gc, out);
  } catch (const Error& ex) {
    err << "error[" << ex.kind() << "]: " << ex.what() << '\n';
    return 1;
  } catch (const std::exception& ex) {
    err << "error[internal]: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sdanet::cli
