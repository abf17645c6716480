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

#include "brainnet/graph.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace {

using namespace brainnet;

const std::vector<std::string> kChannels{"Fp2-F4", "F4-C4", "C4-P4", "P4-O2", "C4-A1"};

dsp::EpochWindow noise_window(std::size_t n_channels, double seconds, std::mt19937& rng,
                              double fs = 250.0) {
  dsp::EpochWindow w;
  w.subject_id = "s1";
  w.class_label = ClassLabel::control;
  w.duration_s = seconds;
  w.sample_rate = fs;
  for (std::size_t c = 0; c < n_channels && c < kChannels.size(); ++c)
    w.channel_labels.push_back(kChannels[c]);
  std::normal_distribution<double> gauss(0.0, 1.0);
  w.channels = Matrix(n_channels, static_cast<std::size_t>(seconds * fs));
  for (double& v : w.channels.data) v = gauss(rng);
  return w;
}

edf::Recording noise_recording(double seconds, std::mt19937& rng) {
  edf::Recording rec;
  rec.subject_id = "s1";
  rec.class_label = ClassLabel::insomnia;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& label : kChannels) {
    edf::Channel ch;
    ch.label = label;
    ch.sample_rate = 250.0;
    ch.samples.resize(static_cast<std::size_t>(seconds * 250.0));
    for (double& v : ch.samples) v = gauss(rng);
    rec.channels.push_back(std::move(ch));
  }
  return rec;
}

Matrix minmax_off_diagonal(Matrix m) {
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      if (i != j) {
        lo = std::min(lo, m(i, j));
        hi = std::max(hi, m(i, j));
      }
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      m(i, j) = i == j ? 0.0 : (m(i, j) - lo) / (hi - lo);
  return m;
}

TEST(RandomCoherence, UnitAtMaximumDistance) {
  for (double k : {0.1, 1.0, 2.0, 5.0, 100.0}) EXPECT_DOUBLE_EQ(graph::random_coherence(1.0, k), 1.0);
}

TEST(RandomCoherence, ClampedBelowUnitDistance) {
  // exp((1-0)/2) ~ 1.6487 before the clamp
  EXPECT_DOUBLE_EQ(graph::random_coherence(0.0, 2.0), 1.0);
  // on [0,1] the clamped curve never exceeds 1
  for (double d = 0.0; d <= 1.0; d += 0.1)
    for (double k : {0.5, 2.0, 5.0}) {
      EXPECT_LE(graph::random_coherence(d, k), 1.0);
      EXPECT_GT(graph::random_coherence(d, k), 0.0);
    }
}

TEST(ReducedCoherence, HandCases) {
  EXPECT_DOUBLE_EQ(graph::reduced_coherence(0.7, 0.7), 0.0);
  EXPECT_DOUBLE_EQ(graph::reduced_coherence(1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(graph::reduced_coherence(0.3, 0.8), -0.5);
}

TEST(CombinedConnectivity, IdenticalPairCollapsesToDegenerateHalf) {
  std::mt19937 rng(7);
  auto w = noise_window(2, 10.0, rng);
  for (std::size_t i = 0; i < w.channels.cols; ++i) w.channels(1, i) = w.channels(0, i);
  Matrix coincident(2, 2);  // both channels mapped to the same node
  graph::ConnectivityConfig cfg;
  cfg.k = 2.0;
  const auto c = graph::combined_connectivity(w, coincident, cfg);
  EXPECT_DOUBLE_EQ(c(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(c(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(c(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(c(1, 1), 0.0);
}

TEST(CombinedConnectivity, PropertyHoldsOnRandomWindows) {
  std::mt19937 rng(21);
  const auto dist = montage::distance_matrix(kChannels);
  for (int trial = 0; trial < 100; ++trial) {
    const auto w = noise_window(5, 6.0, rng);
    const auto c = graph::combined_connectivity(w, dist, {});
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_DOUBLE_EQ(c(i, i), 0.0);
      for (std::size_t j = 0; j < 5; ++j) {
        EXPECT_DOUBLE_EQ(c(i, j), c(j, i));
        EXPECT_GE(c(i, j), 0.0);
        EXPECT_LE(c(i, j), 1.0);
        if (i != j) {
          lo = std::min(lo, c(i, j));
          hi = std::max(hi, c(i, j));
        }
      }
    }
    EXPECT_DOUBLE_EQ(lo, 0.0);
    EXPECT_DOUBLE_EQ(hi, 1.0);
  }
}

TEST(CombinedConnectivity, DistanceTermSwitchChangesTheMatrix) {
  std::mt19937 rng(3);
  const auto w = noise_window(5, 10.0, rng);
  const auto dist = montage::distance_matrix(kChannels);
  graph::ConnectivityConfig with, without;
  without.use_distance_term = false;
  const auto a = graph::combined_connectivity(w, dist, with);
  const auto b = graph::combined_connectivity(w, dist, without);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    max_diff = std::max(max_diff, std::abs(a.data[i] - b.data[i]));
  EXPECT_GT(max_diff, 1e-3);
}

TEST(CombinedConnectivity, IdenticalSignalsEverywhereYieldNormalizedDistances) {
  std::mt19937 rng(11);
  auto w = noise_window(5, 10.0, rng);
  for (std::size_t c = 1; c < 5; ++c)
    for (std::size_t i = 0; i < w.channels.cols; ++i) w.channels(c, i) = w.channels(0, i);
  const auto dist = montage::distance_matrix(kChannels);
  const auto conn = graph::combined_connectivity(w, dist, {});
  const auto expected = minmax_off_diagonal(dist);
  for (std::size_t i = 0; i < conn.data.size(); ++i)
    EXPECT_NEAR(conn.data[i], expected.data[i], 1e-12);
}

TEST(CombinedConnectivity, InvariantToCommonAmplitudeScale) {
  std::mt19937 rng(13);
  auto w = noise_window(5, 10.0, rng);
  const auto dist = montage::distance_matrix(kChannels);
  const auto base = graph::combined_connectivity(w, dist, {});
  for (double& v : w.channels.data) v *= 37.5;
  const auto scaled = graph::combined_connectivity(w, dist, {});
  for (std::size_t i = 0; i < base.data.size(); ++i)
    EXPECT_NEAR(base.data[i], scaled.data[i], 1e-9);
}

TEST(CombinedConnectivity, EquivariantUnderChannelPermutation) {
  std::mt19937 rng(17);
  const auto w = noise_window(5, 8.0, rng);
  const auto dist = montage::distance_matrix(kChannels);
  const auto base = graph::combined_connectivity(w, dist, {});

  const std::size_t perm[] = {3, 0, 4, 1, 2};  // permuted -> original index
  dsp::EpochWindow pw = w;
  std::vector<std::string> plabels(5);
  for (std::size_t i = 0; i < 5; ++i) {
    plabels[i] = kChannels[perm[i]];
    for (std::size_t s = 0; s < w.channels.cols; ++s) pw.channels(i, s) = w.channels(perm[i], s);
  }
  pw.channel_labels = plabels;
  const auto pdist = montage::distance_matrix(plabels);
  const auto permuted = graph::combined_connectivity(pw, pdist, {});
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      EXPECT_NEAR(permuted(i, j), base(perm[i], perm[j]), 1e-12);
}

TEST(CombinedConnectivity, SingleSegmentRejected) {
  std::mt19937 rng(5);
  const auto w = noise_window(2, 2.0, rng);  // exactly one 2 s segment
  EXPECT_THROW(graph::combined_connectivity(w, Matrix(2, 2), {}), TooFewSegments);
}

TEST(CombinedConnectivity, BadBandOrShapeRejected) {
  std::mt19937 rng(5);
  const auto w = noise_window(2, 10.0, rng);
  graph::ConnectivityConfig above_nyquist;
  above_nyquist.coherence_lo = 100.0;
  above_nyquist.coherence_hi = 130.0;
  EXPECT_THROW(graph::combined_connectivity(w, Matrix(2, 2), above_nyquist), EmptyBand);
  graph::ConnectivityConfig bad_k;
  bad_k.k = 0.0;
  EXPECT_THROW(graph::combined_connectivity(w, Matrix(2, 2), bad_k), Error);
  EXPECT_THROW(graph::combined_connectivity(w, Matrix(3, 3), {}), ShapeMismatch);
}

TEST(NodeFeatures, AlphaToneDominatesItsRow) {
  dsp::EpochWindow w;
  w.sample_rate = 250.0;
  w.channels = Matrix(1, 2500);
  for (std::size_t i = 0; i < 2500; ++i)
    w.channels(0, i) = std::sin(2.0 * std::numbers::pi * 10.0 * static_cast<double>(i) / 250.0);
  const auto f = graph::node_feature_matrix(w);
  ASSERT_EQ(f.rows, 1u);
  ASSERT_EQ(f.cols, 6u);
  const std::size_t alpha = 2;
  for (std::size_t b = 0; b < 6; ++b)
    if (b != alpha) EXPECT_GT(f(0, alpha), f(0, b));
}

TEST(NodeFeatures, SilentChannelHitsTheFloorExactly) {
  dsp::EpochWindow w;
  w.sample_rate = 250.0;
  w.channels = Matrix(2, 2500);
  for (std::size_t i = 0; i < 2500; ++i)
    w.channels(0, i) = std::cos(2.0 * std::numbers::pi * 5.0 * static_cast<double>(i) / 250.0);
  const auto f = graph::node_feature_matrix(w);
  for (std::size_t b = 0; b < 6; ++b) EXPECT_DOUBLE_EQ(f(1, b), -12.0);
}

TEST(NodeFeatures, FiveChannelsSixBands) {
  std::mt19937 rng(23);
  const auto w = noise_window(5, 10.0, rng);
  const auto f = graph::node_feature_matrix(w);
  EXPECT_EQ(f.rows, 5u);
  EXPECT_EQ(f.cols, 6u);
  EXPECT_TRUE(f.all_finite());
}

TEST(BuildGraphs, OneGraphPerWindowWithMetadata) {
  std::mt19937 rng(29);
  const auto rec = noise_recording(35.0, rng);
  const auto graphs = graph::build_graphs(rec, 10.0);
  ASSERT_EQ(graphs.size(), 3u);
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    EXPECT_EQ(graphs[g].window_index, g);
    EXPECT_EQ(graphs[g].subject_id, "s1");
    EXPECT_EQ(graphs[g].class_label, ClassLabel::insomnia);
    EXPECT_EQ(graphs[g].channel_labels, kChannels);
    EXPECT_EQ(graphs[g].connectivity.rows, 5u);
    EXPECT_EQ(graphs[g].node_features.rows, 5u);
    EXPECT_EQ(graphs[g].node_features.cols, 6u);
    EXPECT_TRUE(graphs[g].node_features.all_finite());
  }
}

TEST(BuildGraphs, OmittedChannelShrinksEveryGraph) {
  std::mt19937 rng(31);
  const auto rec = noise_recording(20.0, rng);
  const auto graphs = graph::build_graphs(rec, 10.0, {}, std::string("C4-P4"));
  ASSERT_EQ(graphs.size(), 2u);
  const std::vector<std::string> expect{"Fp2-F4", "F4-C4", "P4-O2", "C4-A1"};
  for (const auto& g : graphs) {
    EXPECT_EQ(g.channel_labels, expect);
    EXPECT_EQ(g.connectivity.rows, 4u);
    EXPECT_EQ(g.node_features.rows, 4u);
    double hi = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (i != j) hi = std::max(hi, g.connectivity(i, j));
    EXPECT_DOUBLE_EQ(hi, 1.0);  // renormalized over the remaining nodes
  }
}

TEST(BuildGraphs, UnknownOmitLabelNamed) {
  std::mt19937 rng(31);
  const auto rec = noise_recording(20.0, rng);
  try {
    graph::build_graphs(rec, 10.0, {}, std::string("O1-A2"));
    FAIL() << "expected MissingChannel";
  } catch (const MissingChannel& e) {
    EXPECT_EQ(e.label, "O1-A2");
  }
}

TEST(BuildGraphs, WindowLongerThanRecordingRejected) {
  std::mt19937 rng(37);
  const auto rec = noise_recording(8.0, rng);
  EXPECT_THROW(graph::build_graphs(rec, 10.0), WindowTooLong);
}

TEST(GraphCache, RoundTripPreservesEverything) {
  std::mt19937 rng(41);
  const auto rec = noise_recording(20.0, rng);
  const auto graphs = graph::build_graphs(rec, 10.0);
  std::stringstream buf;
  graph::write_graph_cache(buf, graphs);
  const auto back = graph::read_graph_cache(buf);
  ASSERT_EQ(back.size(), graphs.size());
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    EXPECT_EQ(back[g].subject_id, graphs[g].subject_id);
    EXPECT_EQ(back[g].window_index, graphs[g].window_index);
    EXPECT_EQ(back[g].class_label, graphs[g].class_label);
    EXPECT_EQ(back[g].channel_labels, graphs[g].channel_labels);
    EXPECT_EQ(back[g].connectivity.data, graphs[g].connectivity.data);
    EXPECT_EQ(back[g].node_features.data, graphs[g].node_features.data);
  }
}

TEST(GraphCache, WritingTwiceIsByteIdentical) {
  std::mt19937 rng(43);
  const auto rec = noise_recording(20.0, rng);
  const auto graphs = graph::build_graphs(rec, 10.0);
  std::stringstream a, b;
  graph::write_graph_cache(a, graphs);
  graph::write_graph_cache(b, graphs);
  EXPECT_EQ(a.str(), b.str());
}

TEST(GraphCache, CorruptionIsDetected) {
  std::mt19937 rng(47);
  const auto rec = noise_recording(20.0, rng);
  const auto graphs = graph::build_graphs(rec, 10.0);
  std::stringstream buf;
  graph::write_graph_cache(buf, graphs);
  const std::string bytes = buf.str();

  std::stringstream bad_magic(std::string("XXXX") + bytes.substr(4));
  EXPECT_THROW(graph::read_graph_cache(bad_magic), CorruptCache);

  std::string wrong_version = bytes;
  wrong_version[4] = 9;
  std::stringstream bad_version(wrong_version);
  EXPECT_THROW(graph::read_graph_cache(bad_version), CorruptCache);

  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(graph::read_graph_cache(truncated), CorruptCache);
}

TEST(GraphCache, FileRoundTrip) {
  std::mt19937 rng(53);
  const auto rec = noise_recording(20.0, rng);
  const auto graphs = graph::build_graphs(rec, 10.0);
  const std::string path = ::testing::TempDir() + "graphcache.bin";
  graph::write_graph_cache_file(path, graphs);
  const auto back = graph::read_graph_cache_file(path);
  EXPECT_EQ(back.size(), graphs.size());
  std::remove(path.c_str());
}

TEST(GraphJson, ExportCarriesShapeAndLabels) {
  std::mt19937 rng(59);
  const auto rec = noise_recording(20.0, rng);
  const auto graphs = graph::build_graphs(rec, 10.0);
  const auto j = graph::to_json(graphs);
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), graphs.size());
  EXPECT_EQ(j[0]["class_label"], "insomnia");
  EXPECT_EQ(j[0]["channel_labels"].size(), 5u);
  EXPECT_EQ(j[0]["connectivity"].size(), 5u);
  EXPECT_EQ(j[0]["connectivity"][0].size(), 5u);
  EXPECT_DOUBLE_EQ(j[0]["connectivity"][0][0].get<double>(), 0.0);
  EXPECT_EQ(j[0]["node_features"][0].size(), 6u);
}

}  // namespace
