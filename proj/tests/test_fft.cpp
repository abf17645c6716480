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

#include "brainnet/fft.hpp"

#include <gtest/gtest.h>

#include <complex>
#include <random>
#include <vector>

#include "dft_oracle.hpp"

namespace {

using brainnet::fft::cplx;

std::vector<cplx> random_signal(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> x(n);
  for (auto& v : x) v = cplx(u(rng), u(rng));
  return x;
}

TEST(Fft, MatchesNaiveDftAcrossLengths) {
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 12u, 13u, 17u, 64u, 100u, 125u, 500u}) {
    const auto x = random_signal(n, 1000u + static_cast<unsigned>(n));
    const auto got = brainnet::fft::dft(x);
    const auto want = oracle::naive_dft(x);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_NEAR(got[k].real(), want[k].real(), 1e-8) << "n=" << n << " k=" << k;
      EXPECT_NEAR(got[k].imag(), want[k].imag(), 1e-8) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Fft, SingleToneLandsInOneBin) {
  const std::size_t n = 500;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::sin(2.0 * std::numbers::pi * 25.0 * static_cast<double>(i) / static_cast<double>(n));
  const auto spec = brainnet::fft::dft_real(x);
  // bin 25 holds n/2 in magnitude, everything else (except the mirror) is ~0
  EXPECT_NEAR(std::abs(spec[25]), static_cast<double>(n) / 2.0, 1e-6);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    if (k == 25) continue;
    EXPECT_LT(std::abs(spec[k]), 1e-6) << "k=" << k;
  }
}

TEST(Fft, EmptyInput) {
  EXPECT_TRUE(brainnet::fft::dft({}).empty());
}

}  // namespace
