// Copyright 2026 The dhprep Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: train, eval, generate, gradcheck, sweep, inspect.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dhprep/dhprep.hpp"

namespace fs = std::filesystem;

namespace {

using dhprep::RunConfig;

// Paths are run plumbing, not model state; leaving them out keeps
// checkpoints byte-identical across output directories.
std::vector<std::pair<std::string, std::string>> stored_config(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& [k, v] : dhprep::config_entries(cfg)) {
    if (k != "out" && k != "checkpoint") out.emplace_back(k, v);
  }
  return out;
}

void write_file(const fs::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw dhprep::Error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw dhprep::Error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

void make_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) throw dhprep::Error("cannot create output directory " + cfg.out);
}

dhprep::DynamicNetwork load_network(const std::string& input, std::int64_t interval) {
  if (input.empty()) throw dhprep::ValidationError("input: no edge list given");
  if (!fs::is_regular_file(input)) throw dhprep::ValidationError("input: cannot read " + input);
  const auto edges = dhprep::ingest_edges_file(input);
  return dhprep::bucket_snapshots(edges, interval);
}

std::string fixed(double x, int digits = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

/// Loads the checkpoint and the network it was trained on. Input path and
/// interval default to the values stored in the checkpoint.
struct Trained {
  dhprep::Checkpoint ck;
  dhprep::DynamicNetwork net;
};

Trained load_trained(const RunConfig& cfg) {
  const auto path = cfg.checkpoint_path();
  if (!fs::is_regular_file(path)) throw dhprep::ValidationError("checkpoint: cannot read " + path.string());
  Trained tr{dhprep::load_checkpoint(path), {}};
  const auto& emb = tr.ck.model.emb;
  if (cfg.is_explicit("dim") && cfg.training.dim != emb.dim())
    throw dhprep::FormatError("checkpoint " + path.string() + " has dim " + std::to_string(emb.dim()) +
                              " but the config asks for " + std::to_string(cfg.training.dim));
  if (emb.snapshot_count() < 2)
    throw dhprep::ValidationError("checkpoint has T = 1: no t+1 ground truth exists");
  const std::string input = cfg.is_explicit("input") ? cfg.input : dhprep::checkpoint_setting(tr.ck, "input");
  const std::int64_t interval = cfg.is_explicit("interval") ? cfg.interval : tr.ck.interval;
  tr.net = load_network(input, interval);
  const auto ids = tr.net.external_ids();
  if (tr.net.vertex_count() != emb.vertex_count() || tr.net.snapshot_count() != emb.snapshot_count() ||
      !std::equal(ids.begin(), ids.end(), tr.ck.external_ids.begin(), tr.ck.external_ids.end()))
    throw dhprep::FormatError("checkpoint " + path.string() + " was trained on a different network than " + input);
  return tr;
}

int cmd_train(const RunConfig& cfg) {
  cfg.training.validate();
  const auto net = load_network(cfg.input, cfg.interval);
  make_out_dir(cfg);
  const auto state = dhprep::train(net, cfg.training);

  dhprep::Checkpoint ck{state.model, net.interval(), net.origin(),
                        {net.external_ids().begin(), net.external_ids().end()}, stored_config(cfg)};
  dhprep::save_checkpoint(ck, cfg.checkpoint_path());
  std::ostringstream trace;
  dhprep::write_loss_trace(state.trace, trace);
  const auto trace_path = fs::path(cfg.out) / "loss_trace.tsv";
  write_file(trace_path, trace.str());

  std::cout << "vertices " << net.vertex_count() << ", snapshots " << net.snapshot_count() << '\n';
  if (state.trace.empty()) {
    std::cout << "no epochs run; checkpoint holds the initial state\n";
  } else {
    const auto& l = state.trace.back();
    std::cout << "epoch " << l.epoch << "  L_1st " << fixed(l.structural) << "  L_DHP " << fixed(l.dhp)
              << "  L_smooth " << fixed(l.smooth) << "  total " << fixed(l.total) << '\n';
  }
  std::cout << "checkpoint " << cfg.checkpoint_path().string() << "\nloss trace " << trace_path.string() << '\n';
  return 0;
}

void print_report(const dhprep::EvalReport& report) {
  std::cout << std::left << std::setw(10) << "task" << std::setw(8) << "metric" << std::right << std::setw(10)
            << "mean" << std::setw(10) << "std" << '\n';
  for (const auto& r : report.rows) {
    std::cout << std::left << std::setw(10) << report.task << std::setw(8) << r.metric << std::right
              << std::setw(10) << fixed(r.mean, 4) << std::setw(10) << fixed(r.std, 4) << '\n';
  }
}

int cmd_eval(const RunConfig& cfg) {
  const auto tr = load_trained(cfg);
  make_out_dir(cfg);
  dhprep::Rng rng = dhprep::derive_rng(cfg.training.seed, 2);
  std::vector<std::string> warnings;
  const auto report =
      dhprep::evaluate_embeddings(tr.net, tr.ck.model.emb, dhprep::evaluation_settings(cfg), rng, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  std::ostringstream text;
  dhprep::write_report(report, text);
  const auto path = fs::path(cfg.out) / "report.tsv";
  write_file(path, text.str());
  print_report(report);
  std::cout << "report " << path.string() << '\n';
  return 0;
}

int cmd_generate(const RunConfig& cfg) {
  cfg.synth.validate();
  if (cfg.interval <= 0) throw dhprep::ValidationError("interval: must be positive");
  const auto g = dhprep::generate(cfg.synth);
  make_out_dir(cfg);
  std::ostringstream edges, labels;
  dhprep::write_generated_edges(g.net, cfg.interval, edges);
  dhprep::write_labels(g.blocks, labels);
  const auto edge_path = fs::path(cfg.out) / "edges.tsv";
  const auto label_path = fs::path(cfg.out) / "labels.tsv";
  write_file(edge_path, edges.str());
  write_file(label_path, labels.str());
  dhprep::write_summary(g.net, std::cout);
  std::cout << "edges " << edge_path.string() << "\nlabels " << label_path.string() << '\n';
  return 0;
}

int cmd_gradcheck(const RunConfig& cfg) {
  cfg.training.validate();
  if (cfg.gc_vertices < 2) throw dhprep::ValidationError("gc_vertices: need at least 2");
  if (cfg.gc_snapshots < 2) throw dhprep::ValidationError("gc_snapshots: need at least 2");
  if (cfg.gc_coordinates < 1) throw dhprep::ValidationError("gc_coordinates: need at least 1");
  if (!(cfg.tolerance > 0.0)) throw dhprep::ValidationError("tolerance: must be > 0");
  const auto inst = dhprep::make_gradient_check_instance(cfg.gc_vertices, cfg.gc_snapshots, cfg.training.dim,
                                                         cfg.training.kernel, cfg.training.seed);
  dhprep::GradientCheckOptions opt;
  opt.tolerance = cfg.tolerance;
  opt.coordinates = cfg.gc_coordinates;
  opt.seed = cfg.training.seed;
  const auto report = dhprep::gradient_check(inst.net, inst.model, cfg.training, opt);
  std::cout << "coordinates " << report.checks.size() << '\n'
            << "max relative error " << dhprep::text::format_double(report.max_relative_error) << '\n'
            << "tolerance " << dhprep::text::format_double(cfg.tolerance) << '\n'
            << "failures " << report.failures << '\n'
            << (report.passed() ? "PASS" : "FAIL") << '\n';
  return report.passed() ? 0 : 1;
}

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.sweep_kernels.empty() || cfg.sweep_history.empty())
    throw dhprep::ValidationError("sweep_kernels and sweep_history must be non-empty");
  cfg.training.validate();
  for (int h : cfg.sweep_history) {
    if (h < 1) throw dhprep::ValidationError("sweep_history: values must be >= 1");
  }
  const auto net = load_network(cfg.input, cfg.interval);
  if (net.snapshot_count() < 2) throw dhprep::ValidationError("sweep needs T >= 2: no t+1 ground truth exists");
  make_out_dir(cfg);
  std::ostringstream table;
  table << "kernel\thistory\ttask\tmetric\tk\tmean\tstd\n";
  for (auto kernel : cfg.sweep_kernels) {
    for (int h : cfg.sweep_history) {
      RunConfig run = cfg;
      run.training.kernel = kernel;
      run.training.history = h;
      const std::string name = std::string(dhprep::kernel_name(kernel)) + "_h" + std::to_string(h);
      run.out = (fs::path(cfg.out) / name).string();
      run.checkpoint.clear();
      make_out_dir(run);
      const auto state = dhprep::train(net, run.training);
      dhprep::Checkpoint ck{state.model, net.interval(), net.origin(),
                            {net.external_ids().begin(), net.external_ids().end()}, stored_config(run)};
      dhprep::save_checkpoint(ck, run.checkpoint_path());
      dhprep::Rng rng = dhprep::derive_rng(run.training.seed, 2);
      const auto report = dhprep::evaluate_embeddings(net, state.model.emb, dhprep::evaluation_settings(run), rng);
      std::ostringstream rows;
      dhprep::write_report(report, rows, false);
      std::istringstream lines(rows.str());
      for (std::string line; std::getline(lines, line);) {
        table << dhprep::kernel_name(kernel) << '\t' << h << '\t' << line << '\n';
      }
      std::cout << name;
      for (const auto& r : report.rows) std::cout << "  " << r.metric << ' ' << fixed(r.mean, 4);
      std::cout << std::endl;
    }
  }
  const auto path = fs::path(cfg.out) / "sweep.tsv";
  write_file(path, table.str());
  std::cout << "sweep report " << path.string() << '\n';
  return 0;
}

int cmd_inspect(const RunConfig& cfg) {
  const auto tr = load_trained(cfg);
  int history = cfg.training.history;
  if (!cfg.is_explicit("history")) {
    const auto stored = dhprep::checkpoint_setting(tr.ck, "history");
    if (!stored.empty() && !dhprep::text::parse_number(stored, history))
      throw dhprep::FormatError("checkpoint stores an invalid history value");
  }
  const auto i = tr.net.dense_id(cfg.query_i);
  const auto j = tr.net.dense_id(cfg.query_j);
  if (cfg.query_t < 2 || cfg.query_t > tr.net.snapshot_count())
    throw dhprep::ValidationError("query_t: must lie in [2, " + std::to_string(tr.net.snapshot_count()) + "]");
  const auto b = dhprep::conditional_intensity(i, j, cfg.query_t, tr.ck.model, tr.net, history);
  using dhprep::text::format_double;
  std::cout << "pair " << cfg.query_i << ' ' << cfg.query_j << " at snapshot " << cfg.query_t << '\n'
            << "base\t" << format_double(b.base) << '\n'
            << "excitation\t" << format_double(b.excitation) << '\n'
            << "raw\t" << format_double(b.raw) << '\n'
            << "transferred\t" << format_double(b.transferred) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dhprep: dynamic network embedding with a deep Hawkes process"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_flag("-h,--help", "Print this help, including every config key with its default");

  std::string config_path;
  app.add_option("--config", config_path, "flat 'key = value' config file; flags override its values")
      ->type_name("PATH");

  const auto& fields = dhprep::config_fields();
  const RunConfig defaults;
  std::vector<std::string> values(fields.size());
  std::vector<CLI::Option*> options(fields.size());
  for (std::size_t k = 0; k < fields.size(); ++k) {
    std::string def = fields[k].get(defaults);
    if (def.empty()) def = "(empty)";
    options[k] = app.add_option("--" + std::string(fields[k].key), values[k],
                                std::string(fields[k].help) + " [default: " + def + "]");
    options[k]->group("Config keys")->type_name("VALUE");
  }

  std::string command;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"train", "train embeddings on --input; writes checkpoint.txt and loss_trace.tsv"},
      {"eval", "evaluate a checkpoint on link, newlink or recommend; writes report.tsv"},
      {"generate", "write a planted-partition dynamic network (edges.tsv, labels.tsv)"},
      {"gradcheck", "compare analytic and finite-difference gradients on a random instance"},
      {"sweep", "train and evaluate every kernel x history combination; writes sweep.tsv"},
      {"inspect", "print the intensity breakdown of one vertex pair"},
  };
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->callback([&command, n = name] { command = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) dhprep::read_config_file(config_path, cfg);
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (options[k]->count() > 0) dhprep::apply_setting(cfg, fields[k].key, values[k]);
    }
    if (command == "train") return cmd_train(cfg);
    if (command == "eval") return cmd_eval(cfg);
    if (command == "generate") return cmd_generate(cfg);
    if (command == "gradcheck") return cmd_gradcheck(cfg);
    if (command == "sweep") return cmd_sweep(cfg);
    if (command == "inspect") return cmd_inspect(cfg);
    return 2;
  } catch (const dhprep::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const dhprep::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
