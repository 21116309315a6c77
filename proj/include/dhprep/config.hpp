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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dhprep/errors.hpp"
#include "dhprep/eval.hpp"
#include "dhprep/kernels.hpp"
#include "dhprep/objective.hpp"
#include "dhprep/synthgen.hpp"
#include "dhprep/text.hpp"

namespace dhprep {

/// Everything a command-line run can be configured with.
struct RunConfig {
  TrainingConfig training;

  std::string input;
  std::int64_t interval = 1;
  std::string out = ".";
  std::string checkpoint;  // empty: <out>/checkpoint.txt

  std::string task = "link";
  double ratio = 1.0;
  std::vector<std::size_t> k_list = {10, 20};
  int folds = 5;
  int repeats = 10;
  ClassifierOptions classifier;
  bool new_only = false;
  bool active_only = false;

  double tolerance = 1e-4;
  std::size_t gc_vertices = 10;
  int gc_snapshots = 3;
  std::size_t gc_coordinates = 120;

  std::vector<KernelKind> sweep_kernels = {kAllKernels.begin(), kAllKernels.end()};
  std::vector<int> sweep_history = {1, 2, 3, 4, 5};

  std::uint64_t query_i = 0;
  std::uint64_t query_j = 1;
  int query_t = 2;

  PlantedSpec synth;

  /// Keys set by a config file or flag rather than left at their default.
  std::set<std::string, std::less<>> explicit_keys;

  bool is_explicit(std::string_view key) const { return explicit_keys.contains(key); }

  std::filesystem::path checkpoint_path() const {
    return checkpoint.empty() ? std::filesystem::path(out) / "checkpoint.txt" : std::filesystem::path(checkpoint);
  }
};

inline std::string_view decay_name(DecayMode m) { return m == DecayMode::none ? "none" : "exponential"; }

namespace config_detail {

[[noreturn]] inline void bad(std::string_view key, std::string_view value, std::string_view expected) {
  throw ValidationError(std::string(key) + ": expected " + std::string(expected) + ", got '" + std::string(value) +
                        "'");
}

template <typename T>
T number(std::string_view key, std::string_view value) {
  T v{};
  if (!text::parse_number(value, v)) bad(key, value, std::is_floating_point_v<T> ? "a number" : "an integer");
  return v;
}

inline bool boolean(std::string_view key, std::string_view value) {
  value = text::trim(value);
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad(key, value, "true or false");
}

template <typename T, typename F>
std::vector<T> list(std::string_view key, std::string_view value, F parse_one) {
  std::vector<T> out;
  for (auto part : text::split(text::trim(value), ',')) out.push_back(parse_one(key, text::trim(part)));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs, const std::function<std::string(const T&)>& f) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? "," : "") + f(xs[k]);
  return s;
}

inline KernelKind kernel(std::string_view key, std::string_view value) {
  try {
    return parse_kernel(text::trim(value));
  } catch (const ValidationError&) {
    bad(key, value, "exponential, power-law, rayleigh or flat");
  }
}

inline std::string num(double x) { return text::format_double(x); }
template <typename T>
std::string num(T x) {
  return std::to_string(x);
}

inline std::string optional_num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

}  // namespace config_detail

struct ConfigField {
  std::string_view key;
  std::string_view help;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

/// One entry per configurable key, in the order shown by --help.
inline const std::vector<ConfigField>& config_fields() {
  namespace d = config_detail;
  using R = RunConfig;
  using V = std::string_view;
  static const std::vector<ConfigField> fields = {
      {"input", "edge list, tab-separated: src dst timestamp [weight]",
       [](R& c, V v) { c.input = std::string(text::trim(v)); }, [](const R& c) { return c.input; }},
      {"interval", "snapshot length in timestamp units",
       [](R& c, V v) { c.interval = d::number<std::int64_t>("interval", v); },
       [](const R& c) { return d::num(c.interval); }},
      {"out", "output directory", [](R& c, V v) { c.out = std::string(text::trim(v)); },
       [](const R& c) { return c.out; }},
      {"checkpoint", "checkpoint path (empty means <out>/checkpoint.txt)",
       [](R& c, V v) { c.checkpoint = std::string(text::trim(v)); }, [](const R& c) { return c.checkpoint; }},
      {"seed", "random seed for training, evaluation and generation",
       [](R& c, V v) { c.training.seed = c.synth.seed = d::number<std::uint64_t>("seed", v); },
       [](const R& c) { return d::num(c.training.seed); }},
      {"dim", "embedding dimension", [](R& c, V v) { c.training.dim = d::number<std::size_t>("dim", v); },
       [](const R& c) { return d::num(c.training.dim); }},
      {"kernel", "decay kernel: exponential, power-law, rayleigh, flat",
       [](R& c, V v) { c.training.kernel = d::kernel("kernel", v); },
       [](const R& c) { return std::string(kernel_name(c.training.kernel)); }},
      {"history", "historical snapshots used by the excitation term",
       [](R& c, V v) { c.training.history = d::number<int>("history", v); },
       [](const R& c) { return d::num(c.training.history); }},
      {"beta0", "weight of the Hawkes loss", [](R& c, V v) { c.training.beta0 = d::number<double>("beta0", v); },
       [](const R& c) { return d::num(c.training.beta0); }},
      {"beta1", "weight of the smoothness loss", [](R& c, V v) { c.training.beta1 = d::number<double>("beta1", v); },
       [](const R& c) { return d::num(c.training.beta1); }},
      {"negatives", "negative samples per positive event",
       [](R& c, V v) { c.training.negatives = d::number<int>("negatives", v); },
       [](const R& c) { return d::num(c.training.negatives); }},
      {"degree_exponent", "exponent on degree in the negative sampling distribution",
       [](R& c, V v) { c.training.degree_exponent = d::number<double>("degree_exponent", v); },
       [](const R& c) { return d::num(c.training.degree_exponent); }},
      {"lr", "SGD learning rate", [](R& c, V v) { c.training.lr = d::number<double>("lr", v); },
       [](const R& c) { return d::num(c.training.lr); }},
      {"epochs", "training epochs", [](R& c, V v) { c.training.epochs = d::number<int>("epochs", v); },
       [](const R& c) { return d::num(c.training.epochs); }},
      {"batch_size", "positive events per SGD batch",
       [](R& c, V v) { c.training.batch_size = d::number<int>("batch_size", v); },
       [](const R& c) { return d::num(c.training.batch_size); }},
      {"mode", "deterministic or parallel",
       [](R& c, V v) {
         v = text::trim(v);
         if (v == "deterministic") c.training.parallel = false;
         else if (v == "parallel") c.training.parallel = true;
         else d::bad("mode", v, "deterministic or parallel");
       },
       [](const R& c) { return std::string(c.training.parallel ? "parallel" : "deterministic"); }},
      {"threads", "workers in parallel mode", [](R& c, V v) { c.training.threads = d::number<int>("threads", v); },
       [](const R& c) { return d::num(c.training.threads); }},
      {"task", "evaluation task: link, newlink, recommend", [](R& c, V v) {
         v = text::trim(v);
         if (v != "link" && v != "newlink" && v != "recommend") d::bad("task", v, "link, newlink or recommend");
         c.task = std::string(v);
       },
       [](const R& c) { return c.task; }},
      {"ratio", "non-links per link in classification tasks",
       [](R& c, V v) { c.ratio = d::number<double>("ratio", v); }, [](const R& c) { return d::num(c.ratio); }},
      {"k_list", "cutoffs for precision and recall at k",
       [](R& c, V v) { c.k_list = d::list<std::size_t>("k_list", v, d::number<std::size_t>); },
       [](const R& c) {
         return d::join<std::size_t>(c.k_list, [](const std::size_t& k) { return std::to_string(k); });
       }},
      {"folds", "cross-validation folds", [](R& c, V v) { c.folds = d::number<int>("folds", v); },
       [](const R& c) { return d::num(c.folds); }},
      {"repeats", "cross-validation repeats", [](R& c, V v) { c.repeats = d::number<int>("repeats", v); },
       [](const R& c) { return d::num(c.repeats); }},
      {"l2", "classifier L2 penalty", [](R& c, V v) { c.classifier.l2 = d::number<double>("l2", v); },
       [](const R& c) { return d::num(c.classifier.l2); }},
      {"clf_iterations", "classifier gradient steps",
       [](R& c, V v) { c.classifier.iterations = d::number<int>("clf_iterations", v); },
       [](const R& c) { return d::num(c.classifier.iterations); }},
      {"clf_lr", "classifier step size", [](R& c, V v) { c.classifier.lr = d::number<double>("clf_lr", v); },
       [](const R& c) { return d::num(c.classifier.lr); }},
      {"new_only", "recommend: score only links absent at t",
       [](R& c, V v) { c.new_only = d::boolean("new_only", v); },
       [](const R& c) { return std::string(c.new_only ? "true" : "false"); }},
      {"active_only", "recommend: candidates restricted to vertices with edges at t",
       [](R& c, V v) { c.active_only = d::boolean("active_only", v); },
       [](const R& c) { return std::string(c.active_only ? "true" : "false"); }},
      {"tolerance", "gradcheck: max allowed relative error",
       [](R& c, V v) { c.tolerance = d::number<double>("tolerance", v); },
       [](const R& c) { return d::num(c.tolerance); }},
      {"gc_vertices", "gradcheck: vertices of the random instance",
       [](R& c, V v) { c.gc_vertices = d::number<std::size_t>("gc_vertices", v); },
       [](const R& c) { return d::num(c.gc_vertices); }},
      {"gc_snapshots", "gradcheck: snapshots of the random instance",
       [](R& c, V v) { c.gc_snapshots = d::number<int>("gc_snapshots", v); },
       [](const R& c) { return d::num(c.gc_snapshots); }},
      {"gc_coordinates", "gradcheck: sampled coordinates",
       [](R& c, V v) { c.gc_coordinates = d::number<std::size_t>("gc_coordinates", v); },
       [](const R& c) { return d::num(c.gc_coordinates); }},
      {"sweep_kernels", "sweep: kernels to train",
       [](R& c, V v) { c.sweep_kernels = d::list<KernelKind>("sweep_kernels", v, d::kernel); },
       [](const R& c) {
         return d::join<KernelKind>(c.sweep_kernels, [](const KernelKind& k) { return std::string(kernel_name(k)); });
       }},
      {"sweep_history", "sweep: history windows to train",
       [](R& c, V v) { c.sweep_history = d::list<int>("sweep_history", v, d::number<int>); },
       [](const R& c) { return d::join<int>(c.sweep_history, [](const int& h) { return std::to_string(h); }); }},
      {"query_i", "inspect: anchor vertex (input id)",
       [](R& c, V v) { c.query_i = d::number<std::uint64_t>("query_i", v); },
       [](const R& c) { return d::num(c.query_i); }},
      {"query_j", "inspect: candidate vertex (input id)",
       [](R& c, V v) { c.query_j = d::number<std::uint64_t>("query_j", v); },
       [](const R& c) { return d::num(c.query_j); }},
      {"query_t", "inspect: snapshot index, at least 2",
       [](R& c, V v) { c.query_t = d::number<int>("query_t", v); }, [](const R& c) { return d::num(c.query_t); }},
      {"vertices", "generate: vertex count",
       [](R& c, V v) { c.synth.vertex_count = d::number<std::size_t>("vertices", v); },
       [](const R& c) { return d::num(c.synth.vertex_count); }},
      {"blocks", "generate: block sizes summing to vertices",
       [](R& c, V v) { c.synth.block_sizes = d::list<std::size_t>("blocks", v, d::number<std::size_t>); },
       [](const R& c) {
         return d::join<std::size_t>(c.synth.block_sizes, [](const std::size_t& b) { return std::to_string(b); });
       }},
      {"snapshots", "generate: snapshot count",
       [](R& c, V v) { c.synth.snapshots = d::number<int>("snapshots", v); },
       [](const R& c) { return d::num(c.synth.snapshots); }},
      {"p_in", "generate: within-block edge probability",
       [](R& c, V v) { c.synth.p_in = d::number<double>("p_in", v); },
       [](const R& c) { return d::num(c.synth.p_in); }},
      {"p_out", "generate: between-block edge probability",
       [](R& c, V v) { c.synth.p_out = d::number<double>("p_out", v); },
       [](const R& c) { return d::num(c.synth.p_out); }},
      {"p_in_initial", "generate: within-block probability of snapshot 1 (empty means p_in)",
       [](R& c, V v) {
         if (text::trim(v).empty()) c.synth.p_in_initial.reset();
         else c.synth.p_in_initial = d::number<double>("p_in_initial", v);
       },
       [](const R& c) { return d::optional_num(c.synth.p_in_initial); }},
      {"p_out_initial", "generate: between-block probability of snapshot 1 (empty means p_out)",
       [](R& c, V v) {
         if (text::trim(v).empty()) c.synth.p_out_initial.reset();
         else c.synth.p_out_initial = d::number<double>("p_out_initial", v);
       },
       [](const R& c) { return d::optional_num(c.synth.p_out_initial); }},
      {"persistence", "generate: probability an edge survives to the next snapshot",
       [](R& c, V v) { c.synth.persistence = d::number<double>("persistence", v); },
       [](const R& c) { return d::num(c.synth.persistence); }},
      {"decay", "generate: excitation memory, none or exponential",
       [](R& c, V v) {
         v = text::trim(v);
         if (v == "none") c.synth.decay = DecayMode::none;
         else if (v == "exponential") c.synth.decay = DecayMode::exponential;
         else d::bad("decay", v, "none or exponential");
       },
       [](const R& c) { return std::string(decay_name(c.synth.decay)); }},
      {"rho", "generate: decay rate of the excitation memory",
       [](R& c, V v) { c.synth.rho = d::number<double>("rho", v); }, [](const R& c) { return d::num(c.synth.rho); }},
  };
  return fields;
}

inline const ConfigField* find_config_field(std::string_view key) {
  for (const auto& f : config_fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

/// Sets one key and records it as explicit. Unknown keys are rejected.
inline void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  const ConfigField* f = find_config_field(key);
  if (!f) throw ValidationError("unknown config key '" + std::string(key) + "'");
  f->set(cfg, value);
  cfg.explicit_keys.emplace(key);
}

/// Flat "key = value" lines; '#' starts a comment line.
inline void read_config(std::istream& in, RunConfig& cfg) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto s = text::trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError(n, "expected 'key = value'");
    try {
      apply_setting(cfg, text::trim(s.substr(0, eq)), text::trim(s.substr(eq + 1)));
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ParseError(n, e.what());
    }
  }
}

inline void read_config_file(const std::filesystem::path& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  try {
    read_config(in, cfg);
  } catch (const ParseError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

/// Every key with its current value, in table order.
inline std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : config_fields()) out.emplace_back(std::string(f.key), f.get(cfg));
  return out;
}

inline void write_config(const RunConfig& cfg, std::ostream& out) {
  for (const auto& [k, v] : config_entries(cfg)) out << k << " = " << v << '\n';
}

inline EvaluationSettings evaluation_settings(const RunConfig& cfg) {
  EvaluationSettings s;
  s.task = cfg.task;
  s.ratio = cfg.ratio;
  s.cv.folds = cfg.folds;
  s.cv.repeats = cfg.repeats;
  s.cv.classifier = cfg.classifier;
  s.recommendation.ks = cfg.k_list;
  s.recommendation.new_only = cfg.new_only;
  s.recommendation.active_only = cfg.active_only;
  return s;
}

}  // namespace dhprep
