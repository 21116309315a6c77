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
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dhprep/errors.hpp"
#include "dhprep/kernels.hpp"
#include "dhprep/model.hpp"
#include "dhprep/text.hpp"

namespace dhprep {

inline constexpr std::string_view kCheckpointMagic = "DHPREP-CHECKPOINT v1";

/// A trained model plus what is needed to evaluate it later.
struct Checkpoint {
  Model model;
  std::int64_t interval = 1;
  std::int64_t origin = 0;
  std::vector<std::uint64_t> external_ids;
  /// Effective run configuration as key/value pairs, in a stable order.
  std::vector<std::pair<std::string, std::string>> config;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

namespace detail {

inline void write_row(std::ostream& out, std::span<const double> values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out << ' ';
    out << text::format_double(values[k]);
  }
  out << '\n';
}

class CheckpointReader {
 public:
  explicit CheckpointReader(std::istream& in) : in_(in) {}

  std::string line() {
    std::string s;
    if (!std::getline(in_, s)) throw FormatError("checkpoint truncated after line " + std::to_string(count_));
    ++count_;
    return s;
  }

  /// Reads "<key> <value>" and returns the value.
  std::string field(std::string_view key) {
    const std::string s = line();
    if (s.size() <= key.size() || s.compare(0, key.size(), key) != 0 || s[key.size()] != ' ')
      fail("expected '" + std::string(key) + "'");
    return s.substr(key.size() + 1);
  }

  template <typename T>
  T number(std::string_view key) {
    T v{};
    if (!text::parse_number(field(key), v)) fail("bad value for '" + std::string(key) + "'");
    return v;
  }

  void row(std::span<double> out) {
    const std::string s = line();
    if (out.empty() && s.empty()) return;
    const auto parts = text::split(s, ' ');
    if (parts.size() != out.size()) fail("expected " + std::to_string(out.size()) + " values");
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (!text::parse_number(parts[k], out[k])) fail("bad number '" + std::string(parts[k]) + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("checkpoint line " + std::to_string(count_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::size_t count_ = 0;
};

}  // namespace detail

/// Plain text: magic line, config entries, shapes, ids, then every
/// embedding row (snapshot-major), W row by row, z and theta. Numbers are
/// written in shortest round-trip form, so reading restores them exactly.
inline void write_checkpoint(const Checkpoint& ck, std::ostream& out) {
  const Model& m = ck.model;
  out << kCheckpointMagic << '\n';
  out << "config " << ck.config.size() << '\n';
  for (const auto& [k, v] : ck.config) out << k << " = " << v << '\n';
  out << "dim " << m.emb.dim() << '\n';
  out << "vertices " << m.emb.vertex_count() << '\n';
  out << "snapshots " << m.emb.snapshot_count() << '\n';
  out << "kernel " << kernel_name(m.params.kernel) << '\n';
  out << "interval " << ck.interval << '\n';
  out << "origin " << ck.origin << '\n';
  out << "ids";
  for (auto id : ck.external_ids) out << ' ' << id;
  out << '\n';
  for (int t = 1; t <= m.emb.snapshot_count(); ++t) {
    for (VertexId i = 0; i < m.emb.vertex_count(); ++i) detail::write_row(out, m.emb.row(t, i));
  }
  const std::size_t n = m.params.dim;
  for (std::size_t r = 0; r < n; ++r) detail::write_row(out, std::span(m.params.W).subspan(r * n, n));
  detail::write_row(out, m.params.z);
  detail::write_row(out, m.params.theta);
  out << "end\n";
}

inline Checkpoint read_checkpoint(std::istream& in) {
  detail::CheckpointReader r(in);
  if (r.line() != kCheckpointMagic) throw FormatError("not a dhprep checkpoint or unsupported version");
  Checkpoint ck;
  const auto entries = r.number<std::size_t>("config");
  for (std::size_t k = 0; k < entries; ++k) {
    const std::string s = r.line();
    const auto eq = s.find(" = ");
    if (eq == std::string::npos) r.fail("expected 'key = value'");
    ck.config.emplace_back(s.substr(0, eq), s.substr(eq + 3));
  }
  const auto dim = r.number<std::size_t>("dim");
  const auto n = r.number<std::size_t>("vertices");
  const auto snapshots = r.number<int>("snapshots");
  if (dim == 0 || snapshots < 0) r.fail("invalid shape");
  KernelKind kernel{};
  try {
    kernel = parse_kernel(r.field("kernel"));
  } catch (const ValidationError& e) {
    r.fail(e.what());
  }
  ck.interval = r.number<std::int64_t>("interval");
  ck.origin = r.number<std::int64_t>("origin");
  {
    const std::string s = r.line();
    const auto parts = text::split(s, ' ');
    if (parts.empty() || parts[0] != "ids" || parts.size() != n + 1) r.fail("expected " + std::to_string(n) + " ids");
    ck.external_ids.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (!text::parse_number(parts[k + 1], ck.external_ids[k])) r.fail("bad id");
    }
  }
  Model& m = ck.model;
  m.emb = EmbeddingSequence(dim, n, snapshots);
  m.params = HawkesParams(dim, n, kernel);
  for (int t = 1; t <= snapshots; ++t) {
    for (VertexId i = 0; i < n; ++i) r.row(m.emb.row(t, i));
  }
  for (std::size_t row = 0; row < dim; ++row) r.row(std::span(m.params.W).subspan(row * dim, dim));
  r.row(m.params.z);
  r.row(m.params.theta);
  if (r.line() != "end") r.fail("expected 'end'");
  return ck;
}

/// Writes to a sibling temporary file and renames it over path, so readers
/// never see a partial checkpoint.
inline void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    write_checkpoint(ck, out);
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

/// Value of a stored config key, or fallback when absent.
inline std::string checkpoint_setting(const Checkpoint& ck, std::string_view key, std::string fallback = {}) {
  for (const auto& [k, v] : ck.config) {
    if (k == key) return v;
  }
  return fallback;
}

}  // namespace dhprep
