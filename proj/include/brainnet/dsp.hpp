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

// Signal conditioning for EEG: zero-phase IIR filtering, rational-rate
// resampling, window segmentation, Welch spectra, magnitude-squared
// coherence and band powers.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "brainnet/edf.hpp"
#include "brainnet/errors.hpp"
#include "brainnet/fft.hpp"
#include "brainnet/matrix.hpp"

namespace brainnet::dsp {

// --- filtering ---

struct FilterSpec {
  enum class Kind { highpass, notch };
  Kind kind = Kind::highpass;
  double cutoff_hz = 1.0;   // corner (highpass) or center (notch)
  int order = 4;            // highpass only
  double q_factor = 30.0;   // notch only

  static FilterSpec highpass(double cutoff_hz, int order = 4) {
    return {Kind::highpass, cutoff_hz, order, 0.0};
  }
  static FilterSpec notch(double center_hz, double q = 30.0) {
    return {Kind::notch, center_hz, 2, q};
  }
};

namespace detail {

struct Biquad {
  double b0, b1, b2, a1, a2;  // a0 normalized to 1
};

// Butterworth highpass as a cascade of RBJ biquads. Pole pairs of the analog
// prototype sit at angles (2k+1)*pi/(2n) from the negative real axis, giving
// section Q = 1/(2*cos(angle)); the bilinear transform of each section is the
// cookbook biquad evaluated at the shared corner frequency.
inline std::vector<Biquad> butter_highpass(int order, double cutoff_hz, double fs) {
  const double w0 = 2.0 * std::numbers::pi * cutoff_hz / fs;
  const double cw = std::cos(w0), sw = std::sin(w0);
  std::vector<Biquad> out;
  for (int k = 0; k < order / 2; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + 1.0) / (2.0 * order);
    const double q = 1.0 / (2.0 * std::cos(theta));
    const double alpha = sw / (2.0 * q);
    const double a0 = 1.0 + alpha;
    out.push_back({(1.0 + cw) / 2.0 / a0, -(1.0 + cw) / a0, (1.0 + cw) / 2.0 / a0,
                   -2.0 * cw / a0, (1.0 - alpha) / a0});
  }
  if (order % 2 == 1) {
    const double K = 1.0 / std::tan(w0 / 2.0);
    const double a0 = K + 1.0;
    out.push_back({K / a0, -K / a0, 0.0, (1.0 - K) / a0, 0.0});
  }
  return out;
}

inline Biquad rbj_notch(double center_hz, double q, double fs) {
  const double w0 = 2.0 * std::numbers::pi * center_hz / fs;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  return {1.0 / a0, -2.0 * cw / a0, 1.0 / a0, -2.0 * cw / a0, (1.0 - alpha) / a0};
}

inline void apply_cascade(const std::vector<Biquad>& sos, std::vector<double>& x) {
  for (const auto& s : sos) {
    double z1 = 0.0, z2 = 0.0;  // direct form II transposed
    for (double& v : x) {
      const double y = s.b0 * v + z1;
      z1 = s.b1 * v - s.a1 * y + z2;
      z2 = s.b2 * v - s.a2 * y;
      v = y;
    }
  }
}

// Forward-backward filtering with odd extension at both ends; output length
// equals input length and net phase is zero.
inline std::vector<double> filtfilt(const std::vector<Biquad>& sos, const std::vector<double>& x,
                                    std::size_t padlen) {
  if (x.empty()) return {};
  padlen = std::min(padlen, x.size() - 1);
  std::vector<double> ext;
  ext.reserve(x.size() + 2 * padlen);
  for (std::size_t i = padlen; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 2; i <= padlen + 1; ++i) ext.push_back(2.0 * x.back() - x[x.size() - i]);

  apply_cascade(sos, ext);
  std::reverse(ext.begin(), ext.end());
  apply_cascade(sos, ext);
  std::reverse(ext.begin(), ext.end());
  return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(padlen),
                             ext.begin() + static_cast<std::ptrdiff_t>(padlen + x.size()));
}

}  // namespace detail

inline std::vector<double> highpass(const std::vector<double>& x, double fs,
                                    const FilterSpec& spec = FilterSpec::highpass(1.0)) {
  if (!(spec.cutoff_hz > 0.0) || spec.cutoff_hz >= fs / 2.0)
    throw InvalidCutoff("highpass cutoff " + std::to_string(spec.cutoff_hz) +
                        " Hz outside (0, " + std::to_string(fs / 2.0) + ")");
  if (spec.order < 1) throw InvalidCutoff("filter order must be >= 1");
  const auto sos = detail::butter_highpass(spec.order, spec.cutoff_hz, fs);
  const auto padlen = static_cast<std::size_t>(std::lround(3.0 * fs / spec.cutoff_hz));
  return detail::filtfilt(sos, x, padlen);
}

inline std::vector<double> notch(const std::vector<double>& x, double fs,
                                 const FilterSpec& spec = FilterSpec::notch(50.0)) {
  if (!(spec.cutoff_hz > 0.0) || spec.cutoff_hz >= fs / 2.0)
    throw InvalidCutoff("notch center " + std::to_string(spec.cutoff_hz) + " Hz outside (0, " +
                        std::to_string(fs / 2.0) + ")");
  if (!(spec.q_factor > 0.0)) throw InvalidCutoff("notch Q must be positive");
  const std::vector<detail::Biquad> sos{detail::rbj_notch(spec.cutoff_hz, spec.q_factor, fs)};
  const auto padlen =
      static_cast<std::size_t>(std::lround(3.0 * fs * spec.q_factor / spec.cutoff_hz));
  return detail::filtfilt(sos, x, padlen);
}

inline std::vector<double> apply_filter(const std::vector<double>& x, double fs,
                                        const FilterSpec& spec) {
  return spec.kind == FilterSpec::Kind::highpass ? highpass(x, fs, spec) : notch(x, fs, spec);
}

// --- resampling ---

namespace detail {

inline double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= (x / (2.0 * k)) * (x / (2.0 * k));
    sum += term;
    if (term < sum * 1e-16) break;
  }
  return sum;
}

inline double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Express from/to as a reduced integer ratio; rates may be mildly fractional.
inline std::pair<long, long> rational_ratio(double from_hz, double to_hz) {
  for (long scale : {1L, 10L, 100L, 1000L}) {
    const double fs = from_hz * static_cast<double>(scale);
    const double ts = to_hz * static_cast<double>(scale);
    if (std::abs(fs - std::round(fs)) < 1e-6 && std::abs(ts - std::round(ts)) < 1e-6) {
      long fi = std::lround(fs), ti = std::lround(ts);
      const long g = std::gcd(fi, ti);
      return {ti / g, fi / g};  // {L, M}
    }
  }
  throw Error("sample-rate ratio " + std::to_string(from_hz) + "/" + std::to_string(to_hz) +
              " is not a small rational number");
}

}  // namespace detail

// Polyphase rational resampler (downsampling only). Anti-alias lowpass is a
// Kaiser-windowed sinc with cutoff at the output Nyquist; the FIR is centered
// so the output has no net delay. Output length = round(n * to/from).
inline std::vector<double> resample(const std::vector<double>& x, double from_hz,
                                    double to_hz = 250.0) {
  if (!(from_hz > 0.0) || !(to_hz > 0.0)) throw InvalidCutoff("sample rates must be positive");
  if (to_hz > from_hz + 1e-9)
    throw UpsamplingRequested("cannot resample " + std::to_string(from_hz) + " Hz up to " +
                              std::to_string(to_hz) + " Hz");
  if (std::abs(from_hz - to_hz) < 1e-9) return x;

  const auto [L, M] = detail::rational_ratio(from_hz, to_hz);
  const long n_in = static_cast<long>(x.size());
  const long n_out = std::lround(static_cast<double>(n_in) * to_hz / from_hz);
  if (n_out <= 0) return {};

  const long half = 10L * std::max(L, M);
  const long numtaps = 2 * half + 1;
  const double beta = 8.6;
  const double i0b = detail::bessel_i0(beta);
  std::vector<double> h(static_cast<std::size_t>(numtaps));
  for (long i = 0; i < numtaps; ++i) {
    const double t = static_cast<double>(i - half);
    const double r = t / static_cast<double>(half);
    const double w = detail::bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
    h[static_cast<std::size_t>(i)] = w * detail::sinc(t / static_cast<double>(M)) /
                                     static_cast<double>(M);
  }

  std::vector<double> y(static_cast<std::size_t>(n_out));
  for (long k = 0; k < n_out; ++k) {
    const long u = k * M + half;  // position in the upsampled-by-L domain
    long m_lo = (u - numtaps + 1 + L - 1) / L;  // ceil
    long m_hi = u / L;
    if (m_lo < 0) m_lo = 0;
    if (m_hi > n_in - 1) m_hi = n_in - 1;
    double acc = 0.0;
    for (long m = m_lo; m <= m_hi; ++m)
      acc += h[static_cast<std::size_t>(u - m * L)] * x[static_cast<std::size_t>(m)];
    y[static_cast<std::size_t>(k)] = acc * static_cast<double>(L);
  }
  return y;
}

// --- segmentation ---

struct EpochWindow {
  std::string subject_id;
  ClassLabel class_label = ClassLabel::control;
  std::size_t window_index = 0;
  double duration_s = 0.0;
  double sample_rate = 0.0;
  std::vector<std::string> channel_labels;
  Matrix channels;  // n_channels x n_samples
};

// Non-overlapping windows; a trailing remainder shorter than one window is
// discarded.
inline std::vector<EpochWindow> segment(const edf::Recording& rec, double window_seconds) {
  if (rec.channels.empty()) throw EmptyInput("recording has no channels");
  if (!rec.class_label.has_value())
    throw Error("recording '" + rec.subject_id + "' has no class label; apply the manifest first");
  if (!(window_seconds > 0.0)) throw WindowTooLong("window length must be positive");

  const double fs = rec.channels[0].sample_rate;
  const std::size_t len = rec.channels[0].samples.size();
  for (const auto& c : rec.channels) {
    if (std::abs(c.sample_rate - fs) > 1e-9)
      throw ShapeMismatch("channel sample rates differ: " + std::to_string(fs) + " vs " +
                          std::to_string(c.sample_rate));
    if (c.samples.size() != len)
      throw ShapeMismatch("channel lengths differ: " + std::to_string(len) + " vs " +
                          std::to_string(c.samples.size()));
  }

  const std::size_t wsamp = static_cast<std::size_t>(std::llround(window_seconds * fs));
  if (wsamp == 0) throw WindowTooLong("window shorter than one sample");
  const std::size_t n_windows = len / wsamp;
  if (n_windows == 0)
    throw WindowTooLong("recording (" + std::to_string(len) + " samples) shorter than one " +
                        std::to_string(window_seconds) + " s window");

  std::vector<EpochWindow> out;
  out.reserve(n_windows);
  std::vector<std::string> labels;
  labels.reserve(rec.channels.size());
  for (const auto& c : rec.channels) labels.push_back(c.label);

  for (std::size_t w = 0; w < n_windows; ++w) {
    EpochWindow ew;
    ew.subject_id = rec.subject_id;
    ew.class_label = *rec.class_label;
    ew.window_index = w;
    ew.duration_s = window_seconds;
    ew.sample_rate = fs;
    ew.channel_labels = labels;
    ew.channels = Matrix(rec.channels.size(), wsamp);
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
      const auto& src = rec.channels[c].samples;
      for (std::size_t i = 0; i < wsamp; ++i) ew.channels(c, i) = src[w * wsamp + i];
    }
    out.push_back(std::move(ew));
  }
  return out;
}

// --- spectra ---

enum class Taper { hann, hamming, boxcar };

struct WelchParams {
  double segment_seconds = 2.0;
  double overlap = 0.5;  // fraction of a segment
  Taper taper = Taper::hann;
};

struct Psd {
  std::vector<double> freqs;
  std::vector<double> power;  // density, units^2/Hz, one-sided
  std::size_t n_segments = 0;
};

struct Coherence {
  std::vector<double> freqs;
  std::vector<double> value;  // in [0,1]
  std::size_t n_segments = 0;
};

namespace detail {

inline std::vector<double> taper_window(Taper t, std::size_t n) {
  std::vector<double> w(n, 1.0);
  switch (t) {
    case Taper::hann:
      for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(n));
      break;
    case Taper::hamming:
      for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                      static_cast<double>(n));
      break;
    case Taper::boxcar:
      break;
  }
  return w;
}

struct WelchPlan {
  std::size_t nperseg = 0;
  std::size_t hop = 0;
  std::size_t n_segments = 0;
  std::vector<double> window;
  double scale = 0.0;  // 2 / (fs * sum(w^2)); halved at DC and Nyquist
};

inline WelchPlan make_plan(std::size_t n, double fs, const WelchParams& p) {
  WelchPlan plan;
  if (!(p.segment_seconds > 0.0)) throw SegmentTooLong("segment length must be positive");
  if (p.overlap < 0.0 || p.overlap >= 1.0) throw Error("overlap fraction must be in [0,1)");
  plan.nperseg = static_cast<std::size_t>(std::llround(p.segment_seconds * fs));
  if (plan.nperseg < 2) throw SegmentTooLong("segment shorter than two samples");
  if (plan.nperseg > n)
    throw SegmentTooLong("segment (" + std::to_string(plan.nperseg) +
                         " samples) longer than signal (" + std::to_string(n) + ")");
  const std::size_t noverlap =
      static_cast<std::size_t>(std::llround(p.overlap * static_cast<double>(plan.nperseg)));
  plan.hop = plan.nperseg - noverlap;
  if (plan.hop == 0) throw Error("overlap leaves an empty hop");
  plan.n_segments = 1 + (n - plan.nperseg) / plan.hop;
  plan.window = taper_window(p.taper, plan.nperseg);
  double u = 0.0;
  for (double w : plan.window) u += w * w;
  plan.scale = 2.0 / (fs * u);
  return plan;
}

inline std::vector<std::complex<double>> segment_spectrum(const double* x, const WelchPlan& plan) {
  std::vector<std::complex<double>> seg(plan.nperseg);
  for (std::size_t i = 0; i < plan.nperseg; ++i) seg[i] = {x[i] * plan.window[i], 0.0};
  return fft::dft(seg);
}

}  // namespace detail

// Welch power spectral density, one-sided, density-normalized so that the
// integral over [0, Nyquist] approximates the variance of a zero-mean signal.
inline Psd welch_psd(const std::vector<double>& x, double fs, const WelchParams& p = {}) {
  const auto plan = detail::make_plan(x.size(), fs, p);
  const std::size_t nbins = plan.nperseg / 2 + 1;
  Psd out;
  out.n_segments = plan.n_segments;
  out.freqs.resize(nbins);
  for (std::size_t k = 0; k < nbins; ++k)
    out.freqs[k] = fs * static_cast<double>(k) / static_cast<double>(plan.nperseg);
  out.power.assign(nbins, 0.0);
  for (std::size_t s = 0; s < plan.n_segments; ++s) {
    const auto spec = detail::segment_spectrum(x.data() + s * plan.hop, plan);
    for (std::size_t k = 0; k < nbins; ++k) out.power[k] += std::norm(spec[k]);
  }
  for (std::size_t k = 0; k < nbins; ++k) {
    double sc = plan.scale / static_cast<double>(plan.n_segments);
    if (k == 0 || (plan.nperseg % 2 == 0 && k == nbins - 1)) sc *= 0.5;
    out.power[k] *= sc;
  }
  return out;
}

// Magnitude-squared coherence on the welch_psd frequency grid. Requires at
// least two averaged segments (a single segment is identically 1).
inline Coherence msc(const std::vector<double>& a, const std::vector<double>& b, double fs,
                     const WelchParams& p = {}) {
  if (a.size() != b.size())
    throw ShapeMismatch("coherence inputs differ in length: " + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()));
  const auto plan = detail::make_plan(a.size(), fs, p);
  if (plan.n_segments < 2)
    throw TooFewSegments("coherence needs >= 2 segments, got " +
                         std::to_string(plan.n_segments));
  const std::size_t nbins = plan.nperseg / 2 + 1;
  std::vector<double> saa(nbins, 0.0), sbb(nbins, 0.0);
  std::vector<std::complex<double>> sab(nbins, {0.0, 0.0});
  for (std::size_t s = 0; s < plan.n_segments; ++s) {
    const auto sa = detail::segment_spectrum(a.data() + s * plan.hop, plan);
    const auto sb = detail::segment_spectrum(b.data() + s * plan.hop, plan);
    for (std::size_t k = 0; k < nbins; ++k) {
      saa[k] += std::norm(sa[k]);
      sbb[k] += std::norm(sb[k]);
      sab[k] += std::conj(sa[k]) * sb[k];
    }
  }
  Coherence out;
  out.n_segments = plan.n_segments;
  out.freqs.resize(nbins);
  out.value.resize(nbins);
  for (std::size_t k = 0; k < nbins; ++k) {
    out.freqs[k] = fs * static_cast<double>(k) / static_cast<double>(plan.nperseg);
    const double denom = saa[k] * sbb[k];
    double v = denom > 0.0 ? std::norm(sab[k]) / denom : 0.0;
    out.value[k] = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

// --- band powers ---

struct Band {
  const char* name;
  double lo, hi;  // [lo, hi) in Hz
};

inline constexpr std::array<Band, 6> kBands{{{"delta", 1.0, 4.0},
                                             {"theta", 4.0, 8.0},
                                             {"alpha", 8.0, 13.0},
                                             {"low_beta", 13.0, 16.0},
                                             {"high_beta", 16.0, 30.0},
                                             {"gamma", 30.0, 150.0}}};

// Trapezoidal integral of the PSD over [lo, hi) intersected with the
// available grid; bands reaching past Nyquist are clipped to it.
inline double band_power(const Psd& psd, double lo, double hi) {
  if (psd.freqs.size() < 2) throw EmptyBand("spectrum has fewer than two bins");
  const double fmax = psd.freqs.back();
  if (!(lo < hi)) throw EmptyBand("band [" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
  if (lo >= fmax)
    throw EmptyBand("band [" + std::to_string(lo) + ", " + std::to_string(hi) +
                    ") lies entirely above the Nyquist frequency " + std::to_string(fmax));
  const double a = std::max(lo, psd.freqs.front());
  const double b = std::min(hi, fmax);
  const double df = psd.freqs[1] - psd.freqs[0];
  auto interp = [&](double f) {
    const std::size_t k = std::min(psd.freqs.size() - 2,
                                   static_cast<std::size_t>(std::max(0.0, (f - psd.freqs[0]) / df)));
    const double t = (f - psd.freqs[k]) / df;
    return psd.power[k] * (1.0 - t) + psd.power[k + 1] * t;
  };
  // piecewise-linear integral from a to b
  double total = 0.0;
  std::size_t k_lo = static_cast<std::size_t>(std::ceil((a - psd.freqs[0]) / df - 1e-12));
  std::size_t k_hi = static_cast<std::size_t>(std::floor((b - psd.freqs[0]) / df + 1e-12));
  if (k_lo >= psd.freqs.size()) k_lo = psd.freqs.size() - 1;
  if (k_hi >= psd.freqs.size()) k_hi = psd.freqs.size() - 1;
  if (psd.freqs[k_lo] < a) ++k_lo;
  if (k_lo > k_hi) {
    // band falls inside one grid cell
    return 0.5 * (interp(a) + interp(b)) * (b - a);
  }
  total += 0.5 * (interp(a) + psd.power[k_lo]) * (psd.freqs[k_lo] - a);
  for (std::size_t k = k_lo; k < k_hi; ++k)
    total += 0.5 * (psd.power[k] + psd.power[k + 1]) * df;
  total += 0.5 * (psd.power[k_hi] + interp(b)) * (b - psd.freqs[k_hi]);
  return total;
}

inline std::array<double, 6> six_band_powers(const Psd& psd) {
  std::array<double, 6> out{};
  for (std::size_t i = 0; i < kBands.size(); ++i)
    out[i] = band_power(psd, kBands[i].lo, kBands[i].hi);
  return out;
}

}  // namespace brainnet::dsp
