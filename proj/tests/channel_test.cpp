/**
 * Copyright (c) 2026 The tracerec Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"
#include "tracerec/channel.hpp"
#include "tracerec/stats.hpp"

namespace tracerec {
namespace {

using namespace literals;

TEST(SampleMask, DegenerateProbabilities) {
  RngStream rng(1);
  EXPECT_EQ(sample_mask(4, 0.0, rng), DeletionMask::none(4));
  EXPECT_EQ(sample_mask(4, 1.0, rng), DeletionMask::all(4));
  EXPECT_THROW(sample_mask(4, -0.1, rng), Error);
  EXPECT_THROW(sample_mask(4, 1.1, rng), Error);
}

TEST(SampleMask, DeletionCountWithinFourSigma) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    RngStream rng(seed);
    const auto mask = sample_mask(1000, 0.3, rng);
    const double sigma = std::sqrt(1000 * 0.3 * 0.7);
    EXPECT_LE(std::abs(static_cast<double>(mask.deletion_count()) - 300.0),
              4 * sigma);
  }
}

TEST(ApplyMask, Examples) {
  const auto s = "0110"_bits;
  EXPECT_EQ(apply_mask(s, DeletionMask::at(4, {1, 3})), "01"_bits);
  EXPECT_EQ(apply_mask(s, DeletionMask::none(4)), s);
  EXPECT_EQ(apply_mask(s, DeletionMask::all(4)), BitString());
  EXPECT_THROW(apply_mask(s, DeletionMask::none(3)), Error);
}

TEST(SampleTraces, Examples) {
  const RngSpec spec{7};
  const auto keep = sample_traces("01"_bits, 0.0, 3, spec);
  ASSERT_EQ(keep.size(), 3u);
  for (const auto& t : keep) EXPECT_EQ(t.trace, "01"_bits);
  const auto gone = sample_traces("01"_bits, 1.0, 2, spec);
  ASSERT_EQ(gone.size(), 2u);
  for (const auto& t : gone) EXPECT_TRUE(t.trace.empty());
  EXPECT_THROW(sample_traces("01"_bits, 0.5, 0, spec), Error);
}

TEST(SampleTraces, FullTraceFrequency) {
  const BitString s(10, false);
  const std::size_t count = 100000;
  const auto set = sample_traces(s, 0.5, count, RngSpec{11});
  std::size_t full = 0;
  for (const auto& t : set) full += t.trace == s;
  const double expected = std::pow(0.5, 10);
  EXPECT_LE(std::abs(static_cast<double>(full) / count - expected),
            4 * binomial_sigma(expected, count));
}

TEST(SampleTraces, MaskedTraceInvariants) {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 200; ++rep) {
    const auto s = testing::random_bits(gen, 1 + gen() % 100);
    const auto set = sample_traces(s, 0.37, 5, RngSpec{gen()}, rep);
    for (const auto& t : set) {
      EXPECT_EQ(t.source_length, s.size());
      EXPECT_EQ(t.trace.size(), s.size() - t.mask.deletion_count());
      EXPECT_EQ(apply_mask(s, t.mask), t.trace);
      EXPECT_TRUE(is_subsequence(t.trace, s));
    }
  }
}

TEST(SampleTraces, Deterministic) {
  const auto s = "0110100111010001"_bits;
  const RngSpec spec{123};
  for (std::uint64_t trial : {0u, 1u, 99u}) {
    const auto a = sample_traces(s, 0.4, 8, spec, trial);
    const auto b = sample_traces(s, 0.4, 8, spec, trial);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].mask, b[k].mask);
  }
  const auto x = sample_traces(s, 0.4, 8, spec, 0);
  const auto y = sample_traces(s, 0.4, 8, spec, 1);
  bool differ = false;
  for (std::size_t k = 0; k < x.size(); ++k) differ = differ || !(x[k].mask == y[k].mask);
  EXPECT_TRUE(differ);
}

TEST(TrialSeed, PureFunction) {
  EXPECT_EQ(trial_seed(5, 17), trial_seed(5, 17));
  EXPECT_NE(trial_seed(5, 17), trial_seed(5, 18));
  EXPECT_NE(trial_seed(5, 17), trial_seed(6, 17));
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFull);
}

TEST(RngStream, UniformRangeAndBelow) {
  RngStream rng(9);
  for (int k = 0; k < 10000; ++k) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(rng.below(7), 7u);
  }
}

TEST(SampleTraces, LengthHistogramMatchesBinomial) {
  const std::size_t n = 20;
  const double p = 0.3;
  const std::size_t count = 50000;
  const auto set = sample_traces(BitString(n, false), p, count, RngSpec{2026});
  std::vector<double> observed(n + 1, 0.0);
  for (const auto& t : set) observed[t.trace.size()] += 1.0;

  const boost::math::binomial_distribution<> law(static_cast<double>(n), 1.0 - p);
  // Pool adjacent lengths until every bin expects at least 5 traces.
  std::vector<std::pair<double, double>> bins;
  double obs = 0.0;
  double exp_count = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    obs += observed[k];
    exp_count += count * boost::math::pdf(law, static_cast<double>(k));
    if (exp_count >= 5.0) {
      bins.emplace_back(obs, exp_count);
      obs = exp_count = 0.0;
    }
  }
  bins.back().first += obs;
  bins.back().second += exp_count;

  double chi2 = 0.0;
  for (const auto& [o, e] : bins) chi2 += (o - e) * (o - e) / e;
  const boost::math::chi_squared_distribution<> ref(
      static_cast<double>(bins.size() - 1));
  EXPECT_LT(chi2, boost::math::quantile(ref, 0.999));
}

}  // namespace
}  // namespace tracerec
