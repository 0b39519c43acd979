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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "gtest/gtest.h"
#include "test_util.hpp"
#include "tracerec/classes.hpp"
#include "tracerec/runs.hpp"

namespace tracerec {
namespace {

using namespace literals;

TEST(BitString, ParsesAndPrints) {
  const auto s = "0100110"_bits;
  EXPECT_EQ(s.size(), 7u);
  EXPECT_EQ(s.to_string(), "0100110");
  EXPECT_FALSE(s[0]);
  EXPECT_TRUE(s[1]);
  EXPECT_EQ(s.count_ones(), 3u);
  EXPECT_THROW(BitString::from_string("01x"), Error);
  EXPECT_TRUE(BitString::from_string("").empty());
}

TEST(BitString, LexicographicOrder) {
  EXPECT_LT("0011"_bits, "0101"_bits);
  EXPECT_LT("01"_bits, "010"_bits);
  EXPECT_EQ("0110"_bits, "0110"_bits);
  EXPECT_NE("0110"_bits, "011"_bits);
}

TEST(BitString, RunCountAcrossWordBoundaries) {
  std::mt19937_64 gen(11);
  for (std::size_t n : {1u, 2u, 63u, 64u, 65u, 127u, 128u, 129u, 300u}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto s = testing::random_bits(gen, n);
      std::size_t naive = 1;
      for (std::size_t i = 1; i < n; ++i) naive += s[i] != s[i - 1];
      EXPECT_EQ(s.run_count(), naive) << s;
    }
  }
  EXPECT_EQ(BitString().run_count(), 0u);
  EXPECT_EQ(BitString(200, true).run_count(), 1u);
}

TEST(RunDecompose, WorkedExamples) {
  EXPECT_EQ(run_decompose("010011"_bits), (RunProfile{false, {1, 1, 2, 2}}));
  EXPECT_EQ(run_decompose("0"_bits), (RunProfile{false, {1}}));
  EXPECT_EQ(run_decompose("1111"_bits), (RunProfile{true, {4}}));
}

TEST(RunDecompose, EmptyStringHasNoRuns) {
  try {
    run_decompose(BitString());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "empty string has no runs");
  }
}

TEST(RunCompose, WorkedExamples) {
  EXPECT_EQ(run_compose({false, {1, 1, 2, 2}}), "010011"_bits);
  EXPECT_EQ(run_compose({true, {3}}), "111"_bits);
  EXPECT_EQ(run_compose({false, {2, 2}}), "0011"_bits);
  EXPECT_THROW(run_compose({false, {2, 0, 1}}), Error);
}

TEST(RunDecompose, RoundTripAndAlternationProperty) {
  std::mt19937_64 gen(2024);
  for (int rep = 0; rep < 500; ++rep) {
    const auto s = testing::random_bits(gen, 1 + gen() % 200);
    const auto profile = run_decompose(s);
    EXPECT_EQ(run_compose(profile), s);
    EXPECT_EQ(profile.total_length(), s.size());
    const auto offsets = run_offsets(profile);
    for (std::size_t i = 0; i < profile.run_count(); ++i) {
      EXPECT_GE(profile.lengths[i], 1u);
      EXPECT_EQ(s[offsets[i]], profile.bit_of_run(i));
      if (i > 0) {
        EXPECT_NE(profile.bit_of_run(i), profile.bit_of_run(i - 1));
      }
    }
  }
}

TEST(IsSubsequence, Examples) {
  EXPECT_TRUE(is_subsequence(""_bits, "10"_bits));
  EXPECT_FALSE(is_subsequence("01"_bits, "10"_bits));
  EXPECT_TRUE(is_subsequence("0101"_bits, "00110011"_bits));
  EXPECT_FALSE(is_subsequence("000"_bits, "00"_bits));
}

// Greedy matching agrees with enumerating every subsequence of x.
TEST(IsSubsequence, AgreesWithExhaustiveEnumeration) {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = gen() % 13;
    const auto x = testing::random_bits(gen, n);
    const auto subs = testing::all_subsequences(x.to_string());
    for (std::size_t len = 0; len <= n; ++len) {
      for (const auto& t : testing::all_strings(len)) {
        EXPECT_EQ(is_subsequence(BitString::from_string(t), x), subs.count(t) == 1)
            << "t=" << t << " x=" << x;
      }
    }
  }
}

TEST(QInstance, AllZeros) {
  const auto q = make_q_instance({"0"_bits, 1.0, 1.0}, 5);
  EXPECT_EQ(q.bits, "00000"_bits);
  EXPECT_EQ(q.span, (PatternSpan{0, 1, 5}));
}

TEST(QInstance, PatternFillsWholeString) {
  const auto q = make_q_instance({"01"_bits, 0.5, 1.0}, 8);
  EXPECT_EQ(q.bits, "01010101"_bits);
  EXPECT_EQ(q.span, (PatternSpan{0, 2, 4}));
}

TEST(QInstance, SublinearCopiesWithFiller) {
  const auto q = make_q_instance({"0"_bits, 1.0, 0.5}, 16);
  EXPECT_EQ(q.span, (PatternSpan{0, 1, 4}));
  EXPECT_EQ(q.bits, "0000101010101010"_bits);
}

TEST(QInstance, FillerNeverExtendsThePattern) {
  // f = floor(0.3 * 7) = 2; filler starts with the complement of A's first bit.
  const auto q = make_q_instance({"01"_bits, 0.3, 1.0}, 7);
  EXPECT_EQ(q.bits, "0101101"_bits);
  EXPECT_FALSE(span_matches(q.bits, PatternSpan{0, 2, 3}));
}

TEST(QInstance, Infeasible) {
  EXPECT_THROW(make_q_instance({"011"_bits, 1.0, 1.0}, 5), Error);
  EXPECT_THROW(make_q_instance({"0"_bits, 0.1, 1.0}, 5), Error);  // f = 0
}

TEST(QInstance, SpanInvariantProperty) {
  std::mt19937_64 gen(99);
  for (int rep = 0; rep < 300; ++rep) {
    const auto pattern = testing::random_bits(gen, 1 + gen() % 4);
    const double ell = 0.05 + 0.95 * static_cast<double>(gen() % 1000) / 1000.0;
    const double a = 0.3 + 0.7 * static_cast<double>(gen() % 1000) / 1000.0;
    const std::size_t n = 1 + gen() % 300;
    const ClassSpecQ spec{pattern, ell, a};
    const std::size_t f = spec.copies(n);
    if (f < 1 || f * pattern.size() > n) continue;
    const auto q = make_q_instance(spec, n);
    ASSERT_EQ(q.bits.size(), n);
    EXPECT_EQ(q.span.copies, f);
    EXPECT_TRUE(span_matches(q.bits, q.span));
    EXPECT_EQ(q.bits.substr(0, pattern.size()), pattern);
  }
}

TEST(SInstance, ExactFractions) {
  EXPECT_EQ(make_s_instance({false, {0.5, 0.25, 0.25}}, 8), "00001100"_bits);
  EXPECT_EQ(make_s_instance({true, {1.0}}, 3), "111"_bits);
}

TEST(SInstance, RemainderGoesToLargestFractionThenIndex) {
  EXPECT_EQ(s_run_lengths({false, {0.5, 0.5}}, 7), (std::vector<std::size_t>{4, 3}));
  EXPECT_EQ(make_s_instance({false, {0.5, 0.5}}, 7), "0000111"_bits);
  EXPECT_EQ(s_run_lengths({false, {0.3, 0.4, 0.3}}, 10),
            (std::vector<std::size_t>{3, 4, 3}));
  // floors 3,4,3 (n=11); the spare bit goes to the 0.4 run.
  EXPECT_EQ(s_run_lengths({false, {0.3, 0.4, 0.3}}, 11),
            (std::vector<std::size_t>{3, 5, 3}));
  // floors 1,2,1 (n=6); spare bits go to the 0.4 run, then the first 0.3.
  EXPECT_EQ(s_run_lengths({false, {0.3, 0.4, 0.3}}, 6),
            (std::vector<std::size_t>{2, 3, 1}));
}

TEST(SInstance, Errors) {
  EXPECT_THROW(make_s_instance({false, {0.5, 0.25, 0.25}}, 2), Error);
  EXPECT_THROW(make_s_instance({false, {0.5, 0.4}}, 10), Error);
  EXPECT_THROW(make_s_instance({false, {}}, 10), Error);
}

TEST(SInstance, LengthAndRunCountProperty) {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t m = 1 + gen() % 6;
    std::vector<double> w(m);
    double total = 0;
    for (auto& x : w) total += (x = 1.0 + static_cast<double>(gen() % 100));
    double smallest = 1.0;
    for (auto& x : w) smallest = std::min(smallest, x /= total);
    // Every run then gets at least one bit from its floor share.
    const auto n = static_cast<std::size_t>(std::ceil(1.0 / smallest)) + gen() % 200;
    const ClassSpecS spec{static_cast<bool>(gen() & 1u), w};
    const auto s = make_s_instance(spec, n);
    EXPECT_EQ(s.size(), n);
    EXPECT_EQ(s.run_count(), m);
    EXPECT_EQ(s[0], spec.first_bit);
  }
}

}  // namespace
}  // namespace tracerec
