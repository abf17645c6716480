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

#include "brainnet/dsp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "dft_oracle.hpp"

namespace {

using namespace brainnet;

std::vector<double> sine(double freq, double fs, double seconds, double amp = 1.0,
                         double phase = 0.0) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * fs));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs + phase);
  return x;
}

std::vector<double> white_noise(std::size_t n, unsigned seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

double rms(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  double acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i) acc += x[i] * x[i];
  return std::sqrt(acc / static_cast<double>(hi - lo));
}

// --- highpass ---

TEST(Highpass, RemovesDcComponent) {
  const double fs = 250.0;
  std::vector<double> x(static_cast<std::size_t>(30 * fs), 7.3);
  const auto y = dsp::highpass(x, fs);
  ASSERT_EQ(y.size(), x.size());
  for (std::size_t i = static_cast<std::size_t>(2 * fs); i + static_cast<std::size_t>(2 * fs) < y.size(); ++i)
    ASSERT_LT(std::abs(y[i]), 1e-3) << "i=" << i;
}

TEST(Highpass, Preserves10HzAmplitude) {
  const double fs = 250.0;
  const auto x = sine(10.0, fs, 30.0);
  const auto y = dsp::highpass(x, fs);
  const std::size_t lo = static_cast<std::size_t>(5 * fs), hi = y.size() - lo;
  EXPECT_NEAR(rms(y, lo, hi), rms(x, lo, hi), 0.05 * rms(x, lo, hi));
}

TEST(Highpass, ZeroPhase) {
  const double fs = 250.0;
  const auto x = sine(10.0, fs, 20.0);
  const auto y = dsp::highpass(x, fs);
  const std::size_t lo = static_cast<std::size_t>(5 * fs), hi = y.size() - lo;
  double best = -1e30;
  int best_lag = -99;
  for (int lag = -10; lag <= 10; ++lag) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      acc += y[i] * x[static_cast<std::size_t>(static_cast<long>(i) + lag)];
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  EXPECT_EQ(best_lag, 0);
}

TEST(Highpass, LinearWithinTolerance) {
  const double fs = 250.0;
  const auto a = white_noise(2000, 21);
  const auto b = white_noise(2000, 22);
  std::vector<double> sum(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) sum[i] = 2.0 * a[i] - 3.0 * b[i];
  const auto fa = dsp::highpass(a, fs);
  const auto fb = dsp::highpass(b, fs);
  const auto fsum = dsp::highpass(sum, fs);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double want = 2.0 * fa[i] - 3.0 * fb[i];
    ASSERT_NEAR(fsum[i], want, 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST(Highpass, RejectsBadCutoff) {
  std::vector<double> x(100, 0.0);
  EXPECT_THROW(dsp::highpass(x, 250.0, dsp::FilterSpec::highpass(0.0)), InvalidCutoff);
  EXPECT_THROW(dsp::highpass(x, 250.0, dsp::FilterSpec::highpass(-1.0)), InvalidCutoff);
  EXPECT_THROW(dsp::highpass(x, 250.0, dsp::FilterSpec::highpass(125.0)), InvalidCutoff);
  EXPECT_THROW(dsp::highpass(x, 250.0, dsp::FilterSpec::highpass(200.0)), InvalidCutoff);
}

TEST(Highpass, EmptyAndZeroInput) {
  EXPECT_TRUE(dsp::highpass({}, 250.0).empty());
  std::vector<double> z(1000, 0.0);
  const auto y = dsp::highpass(z, 250.0);
  for (double v : y) ASSERT_EQ(v, 0.0);
}

// --- notch ---

TEST(Notch, Suppresses50HzKeeps10Hz) {
  const double fs = 250.0;
  const auto x10 = sine(10.0, fs, 30.0);
  const auto x50 = sine(50.0, fs, 30.0);
  std::vector<double> x(x10.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = x10[i] + x50[i];
  const auto y = dsp::notch(x, fs);
  ASSERT_EQ(y.size(), x.size());
  const std::size_t lo = static_cast<std::size_t>(5 * fs);
  std::vector<double> mid(y.begin() + static_cast<std::ptrdiff_t>(lo),
                          y.end() - static_cast<std::ptrdiff_t>(lo));
  // residual 50 Hz power < 3% of the input tone's RMS; 10 Hz within 2%
  const double p50 = oracle::band_power_direct(mid, fs, 49.0, 51.0);
  EXPECT_LT(std::sqrt(p50), 0.03 * (1.0 / std::sqrt(2.0)));
  const double p10 = oracle::band_power_direct(mid, fs, 9.0, 11.0);
  EXPECT_NEAR(std::sqrt(p10), 1.0 / std::sqrt(2.0), 0.02 / std::sqrt(2.0));
}

TEST(Notch, ZeroSignalStaysZero) {
  std::vector<double> z(2000, 0.0);
  for (double v : dsp::notch(z, 250.0)) ASSERT_EQ(v, 0.0);
}

TEST(Notch, ConfigurableCenter) {
  const double fs = 250.0;
  const auto x = sine(60.0, fs, 20.0);
  const auto y = dsp::notch(x, fs, dsp::FilterSpec::notch(60.0));
  const std::size_t lo = static_cast<std::size_t>(5 * fs);
  EXPECT_LT(rms(y, lo, y.size() - lo), 0.05);
  EXPECT_THROW(dsp::notch(x, fs, dsp::FilterSpec::notch(125.0)), InvalidCutoff);
}

// --- resample ---

TEST(Resample, IdentityAtSameRate) {
  const auto x = white_noise(1000, 5);
  const auto y = dsp::resample(x, 250.0, 250.0);
  ASSERT_EQ(y.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_EQ(y[i], x[i]);
}

TEST(Resample, FiveHzToneSurvives512To250) {
  const auto x = sine(5.0, 512.0, 10.0);
  const auto y = dsp::resample(x, 512.0, 250.0);
  ASSERT_EQ(y.size(), static_cast<std::size_t>(std::llround(x.size() * 250.0 / 512.0)));
  const auto ideal = sine(5.0, 250.0, 10.0);
  double err = 0.0, ref = 0.0;
  for (std::size_t k = 100; k + 100 < y.size(); ++k) {
    err += (y[k] - ideal[k]) * (y[k] - ideal[k]);
    ref += ideal[k] * ideal[k];
  }
  EXPECT_LT(std::sqrt(err / ref), 0.02);
}

TEST(Resample, NoAliasLeakageFrom120HzTone) {
  const auto x = sine(120.0, 512.0, 8.0);
  const auto y = dsp::resample(x, 512.0, 250.0);
  std::vector<double> mid(y.begin() + 100, y.end() - 100);
  // everything outside a narrow window around 120 Hz is alias/image residue
  const double residual = oracle::band_power_direct(mid, 250.0, 0.25, 118.0) +
                          oracle::band_power_direct(mid, 250.0, 122.0, 126.0);
  EXPECT_LT(residual, 0.01 * 0.5);  // < 1% of the 0.5 tone power
}

TEST(Resample, StopbandToneSuppressed) {
  const auto x = sine(180.0, 512.0, 8.0);  // far above the 125 Hz output Nyquist
  const auto y = dsp::resample(x, 512.0, 250.0);
  double residual = 0.0;
  for (std::size_t k = 100; k + 100 < y.size(); ++k) residual += y[k] * y[k];
  residual /= static_cast<double>(y.size() - 200);
  EXPECT_LT(residual, 0.01 * 0.5);
}

TEST(Resample, OutputLengthRounding) {
  for (std::size_t n : {100u, 511u, 512u, 1000u, 12345u}) {
    std::vector<double> x(n, 0.0);
    EXPECT_EQ(dsp::resample(x, 512.0, 250.0).size(),
              static_cast<std::size_t>(std::llround(static_cast<double>(n) * 250.0 / 512.0)));
  }
}

TEST(Resample, UpsamplingRefused) {
  std::vector<double> x(100, 0.0);
  EXPECT_THROW(dsp::resample(x, 250.0, 512.0), UpsamplingRequested);
}

// --- segment ---

edf::Recording flat_recording(double seconds, double fs, std::size_t n_channels,
                              double value = 0.0) {
  edf::Recording rec;
  rec.subject_id = "s";
  rec.class_label = ClassLabel::control;
  for (std::size_t c = 0; c < n_channels; ++c) {
    edf::Channel ch;
    ch.label = "ch" + std::to_string(c);
    ch.sample_rate = fs;
    ch.samples.assign(static_cast<std::size_t>(seconds * fs), value);
    rec.channels.push_back(std::move(ch));
  }
  return rec;
}

TEST(Segment, ThirteenHoursAt50sGives936Windows) {
  const auto rec = flat_recording(13.0 * 3600.0, 250.0, 1);
  const auto windows = dsp::segment(rec, 50.0);
  EXPECT_EQ(windows.size(), 936u);
  EXPECT_EQ(windows[0].channels.cols, 12500u);
  EXPECT_EQ(windows.back().window_index, 935u);
}

TEST(Segment, TrailingRemainderDiscarded) {
  const auto rec = flat_recording(125.0, 250.0, 2);
  const auto windows = dsp::segment(rec, 50.0);
  ASSERT_EQ(windows.size(), 2u);
  EXPECT_EQ(windows[0].channels.rows, 2u);
  EXPECT_EQ(windows[0].channels.cols, 12500u);
  EXPECT_EQ(windows[1].window_index, 1u);
  EXPECT_EQ(windows[0].subject_id, "s");
  EXPECT_EQ(windows[0].class_label, ClassLabel::control);
  EXPECT_DOUBLE_EQ(windows[0].duration_s, 50.0);
}

TEST(Segment, RecordingShorterThanWindow) {
  const auto rec = flat_recording(30.0, 250.0, 1);
  EXPECT_THROW(dsp::segment(rec, 50.0), WindowTooLong);
}

TEST(Segment, WindowsTilePrefixExactly) {
  edf::Recording rec;
  rec.subject_id = "s";
  rec.class_label = ClassLabel::insomnia;
  edf::Channel ch;
  ch.label = "c0";
  ch.sample_rate = 10.0;
  ch.samples = white_noise(107, 33);
  rec.channels.push_back(ch);
  const auto windows = dsp::segment(rec, 2.0);  // 20 samples each, 5 windows, 7 discarded
  ASSERT_EQ(windows.size(), 5u);
  std::size_t idx = 0;
  for (const auto& w : windows)
    for (std::size_t i = 0; i < w.channels.cols; ++i)
      ASSERT_EQ(w.channels(0, i), ch.samples[idx++]);
  EXPECT_EQ(idx, 100u);
}

TEST(Segment, WindowCountsAcrossStandardLengths) {
  const auto rec = flat_recording(13.0 * 3600.0, 250.0, 1);
  const std::size_t total = rec.channels[0].samples.size();
  for (double w : {10.0, 30.0, 50.0, 70.0, 90.0}) {
    const auto windows = dsp::segment(rec, w);
    EXPECT_EQ(windows.size(), total / static_cast<std::size_t>(w * 250.0)) << w;
  }
}

TEST(Segment, MismatchedChannelsRejected) {
  auto rec = flat_recording(60.0, 250.0, 2);
  rec.channels[1].samples.pop_back();
  EXPECT_THROW(dsp::segment(rec, 10.0), ShapeMismatch);
  auto rec2 = flat_recording(60.0, 250.0, 2);
  rec2.channels[1].sample_rate = 200.0;
  EXPECT_THROW(dsp::segment(rec2, 10.0), ShapeMismatch);
}

TEST(Segment, UnlabeledRecordingRejected) {
  auto rec = flat_recording(60.0, 250.0, 1);
  rec.class_label.reset();
  EXPECT_THROW(dsp::segment(rec, 10.0), Error);
}

// --- welch ---

TEST(Welch, AlphaToneConcentratesInBandAndMatchesDirectDft) {
  const double fs = 250.0;
  const auto x = sine(10.0, fs, 60.0);
  const auto psd = dsp::welch_psd(x, fs);
  EXPECT_DOUBLE_EQ(psd.freqs[1], 0.5);  // 2 s segments give a 0.5 Hz grid
  EXPECT_EQ(psd.n_segments, 59u);
  const double df = psd.freqs[1] - psd.freqs[0];
  double total = 0.0, alpha = 0.0;
  for (std::size_t k = 1; k < psd.freqs.size(); ++k) {
    total += psd.power[k] * df;
    if (psd.freqs[k] >= 8.0 && psd.freqs[k] < 13.0) alpha += psd.power[k] * df;
  }
  EXPECT_GE(alpha / total, 0.95);
  // independent check: direct DFT attribution over the same bands
  const double alpha_direct = oracle::band_power_direct(x, fs, 8.0, 13.0);
  const double total_direct = oracle::band_power_direct(x, fs, 0.25, 126.0);
  EXPECT_GE(alpha_direct / total_direct, 0.95);
  EXPECT_NEAR(alpha / total, alpha_direct / total_direct, 0.02);
}

TEST(Welch, ParsevalOnWhiteNoise) {
  const double fs = 250.0;
  auto x = white_noise(static_cast<std::size_t>(20 * fs), 17, 2.0);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  const auto psd = dsp::welch_psd(x, fs);
  const double df = psd.freqs[1] - psd.freqs[0];
  double integral = 0.0;
  for (double p : psd.power) integral += p * df;
  EXPECT_NEAR(integral, var, 0.05 * var);
}

TEST(Welch, ZeroSignalZeroDensity) {
  std::vector<double> z(1000, 0.0);
  const auto psd = dsp::welch_psd(z, 250.0);
  for (double p : psd.power) ASSERT_EQ(p, 0.0);
}

TEST(Welch, QuadraticInAmplitude) {
  const double fs = 250.0;
  auto x = white_noise(2000, 8);
  auto x2 = x;
  for (double& v : x2) v *= 2.0;
  const auto p1 = dsp::welch_psd(x, fs);
  const auto p2 = dsp::welch_psd(x2, fs);
  for (std::size_t k = 0; k < p1.power.size(); ++k)
    ASSERT_NEAR(p2.power[k], 4.0 * p1.power[k], 1e-9 * std::max(1e-12, 4.0 * p1.power[k]));
}

TEST(Welch, SegmentLongerThanSignalRejected) {
  std::vector<double> x(100, 1.0);
  EXPECT_THROW(dsp::welch_psd(x, 250.0), SegmentTooLong);  // 2 s default needs 500
}

// --- msc ---

TEST(Msc, SelfCoherenceIsOne) {
  const double fs = 250.0;
  const auto x = white_noise(static_cast<std::size_t>(20 * fs), 3);
  const auto coh = dsp::msc(x, x, fs);
  for (std::size_t k = 0; k < coh.value.size(); ++k)
    ASSERT_NEAR(coh.value[k], 1.0, 1e-9) << "f=" << coh.freqs[k];
}

TEST(Msc, IndependentNoiseNearZero) {
  const double fs = 250.0;
  const std::size_t n = static_cast<std::size_t>(40 * fs);
  const auto a = white_noise(n, 101);
  const auto b = white_noise(n, 202);
  const auto coh = dsp::msc(a, b, fs);
  ASSERT_GE(coh.n_segments, 30u);
  double mean = 0.0;
  for (double v : coh.value) mean += v;
  mean /= static_cast<double>(coh.value.size());
  EXPECT_LT(mean, 0.15);
}

TEST(Msc, DelayedCopyHighCoherence) {
  const double fs = 250.0;
  const std::size_t n = static_cast<std::size_t>(40 * fs);
  const auto w = white_noise(n + 5, 55);
  std::vector<double> a(w.begin() + 5, w.end());
  std::vector<double> b(w.begin(), w.end() - 5);  // a delayed by 20 ms
  const auto coh = dsp::msc(a, b, fs);
  double mean = 0.0;
  std::size_t cnt = 0;
  for (std::size_t k = 0; k < coh.freqs.size(); ++k) {
    if (coh.freqs[k] < 1.0 || coh.freqs[k] > 45.0) continue;
    mean += coh.value[k];
    ++cnt;
  }
  mean /= static_cast<double>(cnt);
  EXPECT_GT(mean, 0.9);
}

TEST(Msc, BoundedAndSymmetric) {
  const double fs = 250.0;
  const auto a = white_noise(3000, 71);
  const auto b = white_noise(3000, 72);
  const auto ab = dsp::msc(a, b, fs);
  const auto ba = dsp::msc(b, a, fs);
  for (std::size_t k = 0; k < ab.value.size(); ++k) {
    ASSERT_GE(ab.value[k], 0.0);
    ASSERT_LE(ab.value[k], 1.0);
    ASSERT_NEAR(ab.value[k], ba.value[k], 1e-12);
  }
}

TEST(Msc, TooFewSegmentsRejected) {
  std::vector<double> x(static_cast<std::size_t>(2.5 * 250), 1.0);
  EXPECT_THROW(dsp::msc(x, x, 250.0), TooFewSegments);
}

// --- band power ---

dsp::Psd flat_psd(double value, double fmax = 125.0, double df = 0.5) {
  dsp::Psd psd;
  for (double f = 0.0; f <= fmax + 1e-9; f += df) {
    psd.freqs.push_back(f);
    psd.power.push_back(value);
  }
  return psd;
}

TEST(BandPower, AlphaToneDominatesItsBand) {
  const double fs = 250.0;
  const auto x = sine(10.0, fs, 60.0);
  const auto psd = dsp::welch_psd(x, fs);
  const auto bands = dsp::six_band_powers(psd);
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (std::string(dsp::kBands[i].name) == "alpha") continue;
    EXPECT_GE(bands[2], 20.0 * bands[i]) << dsp::kBands[i].name;
  }
}

TEST(BandPower, ZeroSignalAllBandsZero) {
  std::vector<double> z(2000, 0.0);
  const auto bands = dsp::six_band_powers(dsp::welch_psd(z, 250.0));
  for (double b : bands) ASSERT_EQ(b, 0.0);
}

TEST(BandPower, GammaClippedAtNyquist) {
  const auto psd = flat_psd(1.0);
  EXPECT_DOUBLE_EQ(dsp::band_power(psd, 30.0, 150.0), 95.0);
  EXPECT_DOUBLE_EQ(dsp::band_power(psd, 1.0, 4.0), 3.0);
}

TEST(BandPower, EntirelyAboveNyquistRejected) {
  const auto psd = flat_psd(1.0);
  EXPECT_THROW(dsp::band_power(psd, 130.0, 150.0), EmptyBand);
  EXPECT_THROW(dsp::band_power(psd, 125.0, 150.0), EmptyBand);
}

TEST(BandPower, AdjacentBandsAddUp) {
  const double fs = 250.0;
  const auto x = white_noise(static_cast<std::size_t>(20 * fs), 9);
  const auto psd = dsp::welch_psd(x, fs);
  const double a = dsp::band_power(psd, 1.0, 4.0);
  const double b = dsp::band_power(psd, 4.0, 8.0);
  const double ab = dsp::band_power(psd, 1.0, 8.0);
  EXPECT_NEAR(a + b, ab, 1e-9 * ab);
}

TEST(BandPower, SubCellBand) {
  const auto psd = flat_psd(2.0);
  EXPECT_NEAR(dsp::band_power(psd, 8.1, 8.3), 0.4, 1e-12);
}

}  // namespace
