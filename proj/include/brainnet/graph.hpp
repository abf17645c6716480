// Copyright 2026 The Brainnet Authors.
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

#ifndef BRAINNET_GRAPH_HPP_
#define BRAINNET_GRAPH_HPP_

// Per-window brain graphs: a coherence-plus-distance connectivity matrix as
// edge weights and six log band powers per channel as node features.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "brainnet/dsp.hpp"
#include "brainnet/edf.hpp"
#include "brainnet/errors.hpp"
#include "brainnet/matrix.hpp"
#include "brainnet/montage.hpp"

namespace brainnet::graph {

struct ConnectivityConfig {
  double k = 5.0;                // distance constant in the random-coherence term
  double coherence_lo = 1.0;     // Hz; MSC is averaged over [lo, hi] to one scalar
  double coherence_hi = 45.0;
  bool use_distance_term = true; // false = spectral coherence alone
  dsp::WelchParams welch{};
};

struct BrainGraph {
  std::vector<std::string> channel_labels;
  Matrix connectivity;   // n x n, symmetric, zero diagonal, entries in [0,1]
  Matrix node_features;  // n x 6 log10 band powers
  std::string subject_id;
  ClassLabel class_label = ClassLabel::control;
  std::size_t window_index = 0;
};

// Coherence expected from spatial proximity alone, exp((1-D)/k) clamped to 1
// so the subtraction below cannot leave the coherence scale.
inline double random_coherence(double d, double k) {
  return std::min(std::exp((1.0 - d) / k), 1.0);
}

// Computed coherence with the proximity-explained part removed; may be
// negative, the later normalization maps it back into [0,1].
inline double reduced_coherence(double c_computed, double c_random) {
  return c_computed - c_random;
}

namespace detail {

inline void validate_config(const ConnectivityConfig& cfg, double fs) {
  if (!(cfg.k > 0.0)) throw Error("connectivity constant k must be positive");
  const double nyq = fs / 2.0;
  if (!(cfg.coherence_lo < cfg.coherence_hi) || cfg.coherence_hi > nyq + 1e-9)
    throw EmptyBand("coherence band [" + std::to_string(cfg.coherence_lo) + ", " +
                    std::to_string(cfg.coherence_hi) + "] invalid at fs " + std::to_string(fs));
}

// Min-max normalize the off-diagonal entries in place; an all-equal matrix
// has no spread and every off-diagonal entry becomes 0.5.
inline void normalize_off_diagonal(Matrix& m) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      if (i != j) {
        lo = std::min(lo, m(i, j));
        hi = std::max(hi, m(i, j));
      }
  if (!(hi > lo)) {  // degenerate: no off-diagonal spread (or a 1x1 matrix)
    for (std::size_t i = 0; i < m.rows; ++i)
      for (std::size_t j = 0; j < m.cols; ++j)
        if (i != j) m(i, j) = 0.5;
    return;
  }
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      if (i != j) m(i, j) = (m(i, j) - lo) / (hi - lo);
}

}  // namespace detail

// Connectivity for one window: per pair, mean magnitude-squared coherence
// over the configured band, reduced by the distance-expected coherence,
// optionally plus the normalized distance itself, then min-max normalized
// over the window's off-diagonal entries. Each channel's segment spectra are
// computed once and shared across all pairs.
inline Matrix combined_connectivity(const dsp::EpochWindow& w, const Matrix& dist,
                                    const ConnectivityConfig& cfg) {
  const std::size_t n = w.channels.rows;
  if (n == 0) throw EmptyInput("window has no channels");
  if (dist.rows != n || dist.cols != n)
    throw ShapeMismatch("distance matrix is " + std::to_string(dist.rows) + "x" +
                        std::to_string(dist.cols) + " for " + std::to_string(n) + " channels");
  const double fs = w.sample_rate;
  detail::validate_config(cfg, fs);

  const auto plan = dsp::detail::make_plan(w.channels.cols, fs, cfg.welch);
  if (plan.n_segments < 2)
    throw TooFewSegments("coherence needs >= 2 segments, got " +
                         std::to_string(plan.n_segments));
  const std::size_t nbins = plan.nperseg / 2 + 1;

  std::size_t k_lo = nbins, k_hi = 0;
  for (std::size_t k = 0; k < nbins; ++k) {
    const double f = fs * static_cast<double>(k) / static_cast<double>(plan.nperseg);
    if (f >= cfg.coherence_lo && f <= cfg.coherence_hi) {
      k_lo = std::min(k_lo, k);
      k_hi = std::max(k_hi, k);
    }
  }
  if (k_lo > k_hi)
    throw EmptyBand("no spectral bins inside the coherence band");

  // one pass of segment spectra per channel, reused by every pair
  std::vector<std::vector<std::complex<double>>> spectra(n * plan.n_segments);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t s = 0; s < plan.n_segments; ++s)
      spectra[c * plan.n_segments + s] = dsp::detail::segment_spectrum(
          w.channels.data.data() + c * w.channels.cols + s * plan.hop, plan);

  std::vector<double> auto_spec(n * nbins, 0.0);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t s = 0; s < plan.n_segments; ++s) {
      const auto& sp = spectra[c * plan.n_segments + s];
      for (std::size_t k = 0; k < nbins; ++k) auto_spec[c * nbins + k] += std::norm(sp[k]);
    }

  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<std::complex<double>> cross(k_hi - k_lo + 1, {0.0, 0.0});
      for (std::size_t s = 0; s < plan.n_segments; ++s) {
        const auto& si = spectra[i * plan.n_segments + s];
        const auto& sj = spectra[j * plan.n_segments + s];
        for (std::size_t k = k_lo; k <= k_hi; ++k)
          cross[k - k_lo] += std::conj(si[k]) * sj[k];
      }
      double mean_msc = 0.0;
      for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const double denom = auto_spec[i * nbins + k] * auto_spec[j * nbins + k];
        const double v = denom > 0.0 ? std::norm(cross[k - k_lo]) / denom : 0.0;
        mean_msc += std::clamp(v, 0.0, 1.0);
      }
      mean_msc /= static_cast<double>(k_hi - k_lo + 1);

      const double c = reduced_coherence(mean_msc, random_coherence(dist(i, j), cfg.k));
      const double cp = cfg.use_distance_term ? c + dist(i, j) : c;
      out(i, j) = cp;
      out(j, i) = cp;
    }
  }
  detail::normalize_off_diagonal(out);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 0.0;
  return out;
}

// Node features: log10(band power + 1e-12) for the six fixed bands, one row
// per channel.
inline Matrix node_feature_matrix(const dsp::EpochWindow& w,
                                  const dsp::WelchParams& params = {}) {
  constexpr double kEps = 1e-12;
  Matrix feats(w.channels.rows, dsp::kBands.size());
  std::vector<double> row(w.channels.cols);
  for (std::size_t c = 0; c < w.channels.rows; ++c) {
    for (std::size_t i = 0; i < w.channels.cols; ++i) row[i] = w.channels(c, i);
    const auto psd = dsp::welch_psd(row, w.sample_rate, params);
    const auto powers = dsp::six_band_powers(psd);
    for (std::size_t b = 0; b < powers.size(); ++b)
      feats(c, b) = std::log10(powers[b] + kEps);
  }
  return feats;
}

// Build one BrainGraph per non-overlapping window. When omit_channel is set
// that channel is dropped first, so distances are renormalized over the
// remaining nodes and every graph has one node fewer.
inline std::vector<BrainGraph> build_graphs(const edf::Recording& rec, double window_seconds,
                                            const ConnectivityConfig& cfg = {},
                                            const std::optional<std::string>& omit_channel = {},
                                            const montage::ElectrodeTable& table =
                                                montage::ElectrodeTable::builtin()) {
  std::vector<std::string> labels;
  for (const auto& c : rec.channels) labels.push_back(c.label);
  const edf::Recording* src = &rec;
  edf::Recording reduced;
  if (omit_channel.has_value()) {
    const std::string want = edf::normalize_label(*omit_channel);
    std::vector<std::string> keep;
    bool found = false;
    for (const auto& l : labels) {
      if (!found && edf::normalize_label(l) == want) {
        found = true;
        continue;
      }
      keep.push_back(l);
    }
    if (!found) throw MissingChannel("channel '" + *omit_channel + "' not in recording", *omit_channel);
    reduced = edf::select_channels(rec, keep);
    labels = keep;
    src = &reduced;
  }

  const Matrix dist = montage::distance_matrix(labels, table);
  const auto windows = dsp::segment(*src, window_seconds);

  std::vector<BrainGraph> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    BrainGraph g;
    g.channel_labels = w.channel_labels;
    g.connectivity = combined_connectivity(w, dist, cfg);
    g.node_features = node_feature_matrix(w, cfg.welch);
    g.subject_id = w.subject_id;
    g.class_label = w.class_label;
    g.window_index = w.window_index;
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cache: one binary file per recording-configuration, plus JSON export.

namespace detail {

constexpr char kCacheMagic[4] = {'B', 'N', 'G', 'C'};
constexpr std::uint8_t kCacheVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline void put_string(std::ostream& os, const std::string& s) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw CorruptCache("cache truncated mid-field");
  return v;
}

inline std::string get_string(std::istream& is) {
  const auto n = get<std::uint32_t>(is);
  if (n > (1u << 20)) throw CorruptCache("cache string length implausible");
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw CorruptCache("cache truncated mid-string");
  return s;
}

inline void put_matrix(std::ostream& os, const Matrix& m) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols));
  os.write(reinterpret_cast<const char*>(m.data.data()),
           static_cast<std::streamsize>(m.data.size() * sizeof(double)));
}

inline Matrix get_matrix(std::istream& is) {
  const auto rows = get<std::uint32_t>(is);
  const auto cols = get<std::uint32_t>(is);
  if (rows > 4096 || cols > 4096) throw CorruptCache("cache matrix shape implausible");
  Matrix m(rows, cols);
  is.read(reinterpret_cast<char*>(m.data.data()),
          static_cast<std::streamsize>(m.data.size() * sizeof(double)));
  if (!is) throw CorruptCache("cache truncated mid-matrix");
  return m;
}

}  // namespace detail

inline void write_graph_cache(std::ostream& os, const std::vector<BrainGraph>& graphs) {
  os.write(detail::kCacheMagic, sizeof detail::kCacheMagic);
  detail::put(os, detail::kCacheVersion);
  detail::put<std::uint64_t>(os, graphs.size());
  for (const auto& g : graphs) {
    detail::put_string(os, g.subject_id);
    detail::put<std::uint64_t>(os, g.window_index);
    detail::put<std::uint8_t>(os, static_cast<std::uint8_t>(g.class_label));
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.channel_labels.size()));
    for (const auto& l : g.channel_labels) detail::put_string(os, l);
    detail::put_matrix(os, g.connectivity);
    detail::put_matrix(os, g.node_features);
  }
  if (!os) throw Error("graph cache write failed");
}

inline void write_graph_cache_file(const std::string& path, const std::vector<BrainGraph>& graphs) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_graph_cache(os, graphs);
}

inline std::vector<BrainGraph> read_graph_cache(std::istream& is) {
  char magic[4];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, detail::kCacheMagic, sizeof magic) != 0)
    throw CorruptCache("bad cache magic");
  const auto version = detail::get<std::uint8_t>(is);
  if (version != detail::kCacheVersion)
    throw CorruptCache("unsupported cache version " + std::to_string(version));
  const auto count = detail::get<std::uint64_t>(is);
  std::vector<BrainGraph> out;
  out.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    BrainGraph g;
    g.subject_id = detail::get_string(is);
    g.window_index = detail::get<std::uint64_t>(is);
    const auto label = detail::get<std::uint8_t>(is);
    if (label > 1) throw CorruptCache("class label out of range");
    g.class_label = static_cast<ClassLabel>(label);
    const auto n_labels = detail::get<std::uint32_t>(is);
    if (n_labels > 4096) throw CorruptCache("cache label count implausible");
    for (std::uint32_t i = 0; i < n_labels; ++i) g.channel_labels.push_back(detail::get_string(is));
    g.connectivity = detail::get_matrix(is);
    g.node_features = detail::get_matrix(is);
    out.push_back(std::move(g));
  }
  return out;
}

inline std::vector<BrainGraph> read_graph_cache_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "' for reading");
  return read_graph_cache(is);
}

inline nlohmann::json to_json(const BrainGraph& g) {
  nlohmann::json j;
  j["subject_id"] = g.subject_id;
  j["window_index"] = g.window_index;
  j["class_label"] = g.class_label == ClassLabel::insomnia ? "insomnia" : "control";
  j["channel_labels"] = g.channel_labels;
  auto matrix_rows = [](const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows, std::vector<double>(m.cols));
    for (std::size_t i = 0; i < m.rows; ++i)
      for (std::size_t k = 0; k < m.cols; ++k) rows[i][k] = m(i, k);
    return rows;
  };
  j["connectivity"] = matrix_rows(g.connectivity);
  j["node_features"] = matrix_rows(g.node_features);
  return j;
}

inline nlohmann::json to_json(const std::vector<BrainGraph>& graphs) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& g : graphs) j.push_back(to_json(g));
  return j;
}

}  // namespace brainnet::graph

#endif  // BRAINNET_GRAPH_HPP_
