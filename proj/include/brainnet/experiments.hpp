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

#ifndef BRAINNET_EXPERIMENTS_HPP_
#define BRAINNET_EXPERIMENTS_HPP_

// Subject-independent cross-validation, window- and subject-level metrics,
// the three studies (window-length sweep, connectivity ablation, channel
// ablation), full-data reference targets, and a synthetic-EEG generator for
// desk-scale validation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "brainnet/edf.hpp"
#include "brainnet/errors.hpp"
#include "brainnet/gcn.hpp"
#include "brainnet/graph.hpp"

namespace brainnet::experiments {

// The five bipolar channels every study runs on.
inline const std::vector<std::string>& study_channels() {
  static const std::vector<std::string> kChannels{"Fp2-F4", "F4-C4", "C4-P4", "P4-O2", "C4-A1"};
  return kChannels;
}

// ---------------------------------------------------------------------------
// Fold construction

struct SubjectInfo {
  std::string id;
  ClassLabel label = ClassLabel::control;
};

struct FoldPlan {
  std::size_t n_folds = 5;
  std::map<std::string, std::size_t> assignments;  // subject -> fold
  std::array<std::uint64_t, 3> iteration_seeds{};
};

// Shuffle subjects, then deal them round-robin into folds class by class
// with one continuous dealing pointer, so the larger class never piles onto
// the same folds as the smaller one. 16 subjects land as fold sizes
// {4,3,3,3,3} with both classes in every fold.
inline FoldPlan make_folds(std::vector<SubjectInfo> subjects, std::uint64_t seed,
                           std::size_t n_folds = 5) {
  if (subjects.size() < n_folds)
    throw TooFewSubjects("need at least " + std::to_string(n_folds) + " subjects, got " +
                         std::to_string(subjects.size()));
  FoldPlan plan;
  plan.n_folds = n_folds;
  std::mt19937_64 rng(seed);
  for (auto& s : plan.iteration_seeds) s = rng();
  std::shuffle(subjects.begin(), subjects.end(), rng);

  std::size_t next_fold = 0;
  for (ClassLabel cls : {ClassLabel::insomnia, ClassLabel::control}) {
    for (const auto& s : subjects) {
      if (s.label != cls) continue;
      if (plan.assignments.count(s.id))
        throw Error("duplicate subject id '" + s.id + "' in fold construction");
      plan.assignments[s.id] = next_fold;
      next_fold = (next_fold + 1) % n_folds;
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Metrics (positive class = insomnia)

struct WindowMetrics {
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline WindowMetrics window_metrics(const std::vector<ClassLabel>& predictions,
                                    const std::vector<ClassLabel>& labels) {
  if (predictions.empty()) throw EmptyInput("no predictions to score");
  if (predictions.size() != labels.size())
    throw ShapeMismatch("got " + std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(labels.size()) + " labels");
  WindowMetrics m;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool pred_pos = predictions[i] == ClassLabel::insomnia;
    const bool true_pos = labels[i] == ClassLabel::insomnia;
    if (pred_pos && true_pos) ++m.tp;
    else if (pred_pos && !true_pos) ++m.fp;
    else if (!pred_pos && true_pos) ++m.fn;
    else ++m.tn;
  }
  const double total = static_cast<double>(predictions.size());
  m.accuracy = static_cast<double>(m.tp + m.tn) / total;
  m.precision = m.tp + m.fp ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
  m.recall = m.tp + m.fn ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

// Mean over subjects of each subject's window accuracy, unweighted by how
// many windows a subject has.
inline double subject_accuracy(const std::vector<std::string>& subjects,
                               const std::vector<ClassLabel>& predictions,
                               const std::vector<ClassLabel>& labels) {
  if (subjects.empty()) throw EmptyInput("no windows to score");
  if (subjects.size() != predictions.size() || subjects.size() != labels.size())
    throw ShapeMismatch("subject/prediction/label lengths differ");
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // correct, total
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    auto& [correct, total] = tally[subjects[i]];
    correct += predictions[i] == labels[i] ? 1 : 0;
    ++total;
  }
  double sum = 0.0;
  for (const auto& [id, counts] : tally)
    sum += static_cast<double>(counts.first) / static_cast<double>(counts.second);
  return sum / static_cast<double>(tally.size());
}

// ---------------------------------------------------------------------------
// Feature standardization, fitted on training windows only

struct FeatureScaler {
  std::vector<double> mean, stddev;

  static FeatureScaler fit(const std::vector<graph::BrainGraph>& graphs,
                           const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw EmptyInput("cannot fit a scaler on no windows");
    const std::size_t width = graphs[indices[0]].node_features.cols;
    FeatureScaler s;
    s.mean.assign(width, 0.0);
    s.stddev.assign(width, 0.0);
    std::size_t n_rows = 0;
    for (std::size_t idx : indices) {
      const Matrix& f = graphs[idx].node_features;
      for (std::size_t r = 0; r < f.rows; ++r)
        for (std::size_t c = 0; c < width; ++c) s.mean[c] += f(r, c);
      n_rows += f.rows;
    }
    for (double& m : s.mean) m /= static_cast<double>(n_rows);
    for (std::size_t idx : indices) {
      const Matrix& f = graphs[idx].node_features;
      for (std::size_t r = 0; r < f.rows; ++r)
        for (std::size_t c = 0; c < width; ++c) {
          const double d = f(r, c) - s.mean[c];
          s.stddev[c] += d * d;
        }
    }
    for (double& v : s.stddev) v = std::sqrt(v / static_cast<double>(n_rows));
    return s;
  }

  graph::BrainGraph apply(graph::BrainGraph g) const {
    for (std::size_t r = 0; r < g.node_features.rows; ++r)
      for (std::size_t c = 0; c < g.node_features.cols; ++c) {
        const double sd = stddev[c] > 0.0 ? stddev[c] : 1.0;
        g.node_features(r, c) = (g.node_features(r, c) - mean[c]) / sd;
      }
    return g;
  }
};

// ---------------------------------------------------------------------------
// Cross-validation

struct ExperimentConfig {
  graph::ConnectivityConfig connectivity{};
  gcn::ModelConfig model{};
  std::uint64_t seed = 1;
  bool oversample_minority = false;  // duplicate minority-class training windows
};

struct RunRecord {
  std::size_t fold = 0, iteration = 0;
  std::uint64_t training_seed = 0;
  WindowMetrics metrics;
  double subject_accuracy = 0.0;
  std::vector<std::string> train_subjects, test_subjects;
};

struct ExperimentReport {
  std::string name;
  double window_seconds = 0.0;
  bool use_distance_term = true;
  std::optional<std::string> omitted_channel;
  std::vector<RunRecord> runs;      // 5 folds x 3 iterations
  WindowMetrics mean_window;        // arithmetic mean of the run metrics; counts summed
  double subject_accuracy = 0.0;    // per-iteration subject means, averaged over iterations
};

inline ExperimentReport run_cv(const std::vector<graph::BrainGraph>& graphs,
                               const ExperimentConfig& config, const FoldPlan& plan,
                               std::string name = "single") {
  if (graphs.empty()) throw EmptyInput("no graphs to cross-validate");

  std::map<std::string, std::vector<std::size_t>> by_subject;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (!plan.assignments.count(graphs[i].subject_id))
      throw Error("subject '" + graphs[i].subject_id + "' missing from the fold plan");
    by_subject[graphs[i].subject_id].push_back(i);
  }

  ExperimentReport report;
  report.name = std::move(name);
  report.use_distance_term = config.connectivity.use_distance_term;

  double iteration_subject_sum = 0.0;
  for (std::size_t it = 0; it < plan.iteration_seeds.size(); ++it) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> subject_tally;
    for (std::size_t fold = 0; fold < plan.n_folds; ++fold) {
      std::vector<std::size_t> train_idx, test_idx;
      RunRecord run;
      run.fold = fold;
      run.iteration = it;
      for (const auto& [subject, indices] : by_subject) {
        const bool in_test = plan.assignments.at(subject) == fold;
        (in_test ? run.test_subjects : run.train_subjects).push_back(subject);
        auto& dst = in_test ? test_idx : train_idx;
        dst.insert(dst.end(), indices.begin(), indices.end());
      }
      if (test_idx.empty())
        throw FoldWithoutTestData("fold " + std::to_string(fold) + " has no test windows");
      if (train_idx.empty())
        throw FoldWithoutTestData("fold " + std::to_string(fold) + " has no training windows");

      if (config.oversample_minority) {
        std::array<std::vector<std::size_t>, 2> per_class;
        for (std::size_t idx : train_idx)
          per_class[static_cast<std::size_t>(graphs[idx].class_label)].push_back(idx);
        if (!per_class[0].empty() && !per_class[1].empty()) {
          const std::size_t minority = per_class[0].size() < per_class[1].size() ? 0 : 1;
          const std::size_t deficit =
              per_class[1 - minority].size() - per_class[minority].size();
          for (std::size_t d = 0; d < deficit; ++d)
            train_idx.push_back(per_class[minority][d % per_class[minority].size()]);
        }
      }

      const FeatureScaler scaler = FeatureScaler::fit(graphs, train_idx);
      std::vector<graph::BrainGraph> train_set, test_set;
      train_set.reserve(train_idx.size());
      test_set.reserve(test_idx.size());
      for (std::size_t idx : train_idx) train_set.push_back(scaler.apply(graphs[idx]));
      for (std::size_t idx : test_idx) test_set.push_back(scaler.apply(graphs[idx]));

      gcn::ModelConfig mc = config.model;
      mc.seed = plan.iteration_seeds[it] ^ (0x9e3779b97f4a7c15ull * (fold + 1));
      run.training_seed = mc.seed;
      const auto trained = gcn::train(gcn::GcnModel::init(mc, train_set[0].node_features.cols),
                                      train_set);

      std::vector<ClassLabel> preds, truth;
      std::vector<std::string> subj;
      preds.reserve(test_set.size());
      for (const auto& g : test_set) {
        const ClassLabel p = gcn::predict(trained.model, g).predicted_class;
        preds.push_back(p);
        truth.push_back(g.class_label);
        subj.push_back(g.subject_id);
        auto& [correct, total] = subject_tally[g.subject_id];
        correct += p == g.class_label ? 1 : 0;
        ++total;
      }
      run.metrics = window_metrics(preds, truth);
      run.subject_accuracy = subject_accuracy(subj, preds, truth);
      report.runs.push_back(std::move(run));
    }
    double sum = 0.0;
    for (const auto& [id, counts] : subject_tally)
      sum += static_cast<double>(counts.first) / static_cast<double>(counts.second);
    iteration_subject_sum += sum / static_cast<double>(subject_tally.size());
  }
  report.subject_accuracy = iteration_subject_sum / static_cast<double>(plan.iteration_seeds.size());

  for (const auto& run : report.runs) {
    report.mean_window.accuracy += run.metrics.accuracy;
    report.mean_window.precision += run.metrics.precision;
    report.mean_window.recall += run.metrics.recall;
    report.mean_window.f1 += run.metrics.f1;
    report.mean_window.tp += run.metrics.tp;
    report.mean_window.fp += run.metrics.fp;
    report.mean_window.fn += run.metrics.fn;
    report.mean_window.tn += run.metrics.tn;
  }
  const double n_runs = static_cast<double>(report.runs.size());
  report.mean_window.accuracy /= n_runs;
  report.mean_window.precision /= n_runs;
  report.mean_window.recall /= n_runs;
  report.mean_window.f1 /= n_runs;
  return report;
}

// ---------------------------------------------------------------------------
// The three studies. Each builds graphs per arm but reuses one fold plan so
// comparisons across arms are paired.

namespace detail {

inline std::vector<SubjectInfo> subjects_of(const std::vector<edf::Recording>& recordings) {
  std::vector<SubjectInfo> out;
  for (const auto& r : recordings) {
    if (!r.class_label.has_value())
      throw Error("recording '" + r.subject_id + "' has no class label");
    out.push_back({r.subject_id, *r.class_label});
  }
  return out;
}

inline std::vector<graph::BrainGraph> pooled_graphs(
    const std::vector<edf::Recording>& recordings, double window_seconds,
    const graph::ConnectivityConfig& cfg, const std::optional<std::string>& omit = {}) {
  std::vector<graph::BrainGraph> pool;
  for (const auto& rec : recordings) {
    auto graphs = graph::build_graphs(rec, window_seconds, cfg, omit);
    pool.insert(pool.end(), std::make_move_iterator(graphs.begin()),
                std::make_move_iterator(graphs.end()));
  }
  return pool;
}

inline std::string seconds_tag(double s) {
  const auto rounded = static_cast<long long>(std::llround(s));
  if (std::abs(s - static_cast<double>(rounded)) < 1e-9) return std::to_string(rounded) + "s";
  std::ostringstream os;
  os << s << "s";
  return os.str();
}

}  // namespace detail

inline std::vector<ExperimentReport> window_length_sweep(
    const std::vector<edf::Recording>& recordings, const std::vector<double>& lengths,
    const ExperimentConfig& config) {
  const FoldPlan plan = make_folds(detail::subjects_of(recordings), config.seed);
  std::vector<ExperimentReport> reports;
  for (double len : lengths) {
    auto pool = detail::pooled_graphs(recordings, len, config.connectivity);
    auto report = run_cv(pool, config, plan, "window_" + detail::seconds_tag(len));
    report.window_seconds = len;
    reports.push_back(std::move(report));
  }
  return reports;
}

inline std::vector<ExperimentReport> connectivity_ablation(
    const std::vector<edf::Recording>& recordings, const std::vector<double>& lengths,
    const ExperimentConfig& config) {
  const FoldPlan plan = make_folds(detail::subjects_of(recordings), config.seed);
  std::vector<ExperimentReport> reports;
  for (double len : lengths) {
    for (bool with_distance : {false, true}) {
      ExperimentConfig arm = config;
      arm.connectivity.use_distance_term = with_distance;
      auto pool = detail::pooled_graphs(recordings, len, arm.connectivity);
      const std::string name =
          (with_distance ? "combined_" : "coherence_") + detail::seconds_tag(len);
      auto report = run_cv(pool, arm, plan, name);
      report.window_seconds = len;
      reports.push_back(std::move(report));
    }
  }
  return reports;
}

inline std::vector<ExperimentReport> channel_ablation(
    const std::vector<edf::Recording>& recordings, double window_seconds,
    const ExperimentConfig& config) {
  const FoldPlan plan = make_folds(detail::subjects_of(recordings), config.seed);
  std::vector<ExperimentReport> reports;
  for (const auto& channel : study_channels()) {
    auto pool =
        detail::pooled_graphs(recordings, window_seconds, config.connectivity, channel);
    auto report = run_cv(pool, config, plan, "omit_" + channel);
    report.window_seconds = window_seconds;
    report.omitted_channel = channel;
    reports.push_back(std::move(report));
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Reference targets for full-dataset runs (not desk-scale gates)

struct ReferenceTarget {
  std::string name;
  double accuracy, precision, recall, f1, subject_accuracy;
};

inline const std::vector<ReferenceTarget>& reference_targets() {
  static const std::vector<ReferenceTarget> kTargets{
      {"window_10s", 0.605, 0.591, 0.604, 0.603, 0.656},
      {"window_30s", 0.625, 0.613, 0.620, 0.616, 0.634},
      {"window_50s", 0.701, 0.667, 0.699, 0.706, 0.677},
      {"window_70s", 0.552, 0.560, 0.551, 0.548, 0.589},
      {"window_90s", 0.593, 0.539, 0.592, 0.632, 0.584},
      {"coherence_10s", 0.565, 0.556, 0.564, 0.566, 0.617},
      {"combined_10s", 0.605, 0.591, 0.604, 0.603, 0.656},
      {"coherence_50s", 0.642, 0.567, 0.640, 0.657, 0.621},
      {"combined_50s", 0.701, 0.667, 0.699, 0.706, 0.677},
      {"coherence_90s", 0.563, 0.557, 0.561, 0.606, 0.567},
      {"combined_90s", 0.593, 0.539, 0.592, 0.632, 0.584},
      {"omit_Fp2-F4", 0.685, 0.565, 0.686, 0.677, 0.667},
      {"omit_F4-C4", 0.653, 0.579, 0.655, 0.668, 0.631},
      {"omit_C4-P4", 0.639, 0.564, 0.638, 0.654, 0.635},
      {"omit_P4-O2", 0.668, 0.544, 0.667, 0.662, 0.645},
      {"omit_C4-A1", 0.645, 0.643, 0.646, 0.669, 0.641},
  };
  return kTargets;
}

inline const ReferenceTarget* find_reference(std::string_view name) {
  for (const auto& t : reference_targets())
    if (t.name == name) return &t;
  return nullptr;
}

inline bool within_reference(const ExperimentReport& report, const ReferenceTarget& target,
                             double tolerance = 0.05) {
  return std::abs(report.mean_window.accuracy - target.accuracy) <= tolerance &&
         std::abs(report.mean_window.precision - target.precision) <= tolerance &&
         std::abs(report.mean_window.recall - target.recall) <= tolerance &&
         std::abs(report.mean_window.f1 - target.f1) <= tolerance &&
         std::abs(report.subject_accuracy - target.subject_accuracy) <= tolerance;
}

// ---------------------------------------------------------------------------
// Synthetic EEG: pink-noise channels; the insomnia class shares a 16-30 Hz
// band-limited component between two designated channels, raising that
// pair's beta power and coherence. Gains jitter per channel so absolute
// power alone is an unreliable cue.

struct SynthParams {
  double sample_rate = 250.0;
  std::array<std::string, 2> coupled_channels{"C4-P4", "F4-C4"};
  double component_amplitude = 1.0;  // shared-component std relative to noise std
};

namespace detail {

// Paul Kellet's economy pink-noise filter over a white gaussian stream.
inline std::vector<double> pink_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> white(0.0, 1.0);
  std::vector<double> out(n);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = white(rng);
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    out[i] = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
  }
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  const double inv_std = 1.0 / std::sqrt(var / static_cast<double>(n));
  for (double& v : out) v = (v - mean) * inv_std;
  return out;
}

// Unit-variance sum of sinusoids covering [16, 30] Hz on a 0.25 Hz grid.
inline std::vector<double> beta_component(std::size_t n, double fs, std::uint64_t seed) {
  constexpr std::size_t kTones = 56;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<double> freqs(kTones), phases(kTones);
  for (std::size_t j = 0; j < kTones; ++j) {
    freqs[j] = 16.0 + (static_cast<double>(j) + 0.5) * 14.0 / kTones;
    phases[j] = phase(rng);
  }
  const double amp = std::sqrt(2.0 / kTones);
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < kTones; ++j) {
    const double w = 2.0 * std::numbers::pi * freqs[j] / fs;
    for (std::size_t i = 0; i < n; ++i)
      out[i] += amp * std::cos(w * static_cast<double>(i) + phases[j]);
  }
  return out;
}

}  // namespace detail

inline std::vector<edf::Recording> synth_dataset(std::size_t n_per_class, double duration_s,
                                                 std::uint64_t seed,
                                                 const SynthParams& params = {}) {
  if (n_per_class == 0) throw EmptyInput("need at least one subject per class");
  const std::size_t n_samples =
      static_cast<std::size_t>(std::llround(duration_s * params.sample_rate));
  std::mt19937_64 master(seed);
  std::uniform_real_distribution<double> log_gain(-std::log(2.0), std::log(2.0));

  std::vector<edf::Recording> out;
  for (ClassLabel cls : {ClassLabel::control, ClassLabel::insomnia}) {
    for (std::size_t s = 0; s < n_per_class; ++s) {
      edf::Recording rec;
      rec.class_label = cls;
      rec.subject_id = (cls == ClassLabel::insomnia ? "synth_i" : "synth_c") +
                       std::to_string(s + 1);
      std::vector<double> shared;
      if (cls == ClassLabel::insomnia)
        shared = detail::beta_component(n_samples, params.sample_rate, master());
      for (const auto& label : study_channels()) {
        edf::Channel ch;
        ch.label = label;
        ch.sample_rate = params.sample_rate;
        ch.samples = detail::pink_noise(n_samples, master());
        const double gain = std::exp(log_gain(master));
        const bool coupled =
            cls == ClassLabel::insomnia && (label == params.coupled_channels[0] ||
                                            label == params.coupled_channels[1]);
        for (std::size_t i = 0; i < n_samples; ++i) {
          double v = ch.samples[i];
          if (coupled) v += params.component_amplitude * shared[i];
          ch.samples[i] = gain * v;
        }
        rec.channels.push_back(std::move(ch));
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report emission

inline void write_report_csv(std::ostream& os, const ExperimentReport& report) {
  os << "config,fold,iteration,accuracy,precision,recall,f1\n";
  os << std::fixed << std::setprecision(6);
  for (const auto& run : report.runs)
    os << report.name << ',' << run.fold << ',' << run.iteration << ',' << run.metrics.accuracy
       << ',' << run.metrics.precision << ',' << run.metrics.recall << ',' << run.metrics.f1
       << '\n';
}

inline nlohmann::json summary_json(const std::vector<ExperimentReport>& reports) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json entry;
    entry["config"] = r.name;
    entry["window_seconds"] = r.window_seconds;
    entry["use_distance_term"] = r.use_distance_term;
    if (r.omitted_channel) entry["omitted_channel"] = *r.omitted_channel;
    entry["runs"] = r.runs.size();
    entry["mean_window"] = {{"accuracy", r.mean_window.accuracy},
                            {"precision", r.mean_window.precision},
                            {"recall", r.mean_window.recall},
                            {"f1", r.mean_window.f1}};
    entry["subject_accuracy"] = r.subject_accuracy;
    j.push_back(std::move(entry));
  }
  return j;
}

inline void write_plot_csv(std::ostream& os, const std::vector<ExperimentReport>& reports) {
  os << "configuration,window_accuracy,subject_accuracy\n";
  os << std::fixed << std::setprecision(6);
  for (const auto& r : reports)
    os << r.name << ',' << r.mean_window.accuracy << ',' << r.subject_accuracy << '\n';
}

}  // namespace brainnet::experiments

#endif  // BRAINNET_EXPERIMENTS_HPP_
