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
#include <initializer_list>
#include <iterator>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"
#include "tracerec/channel.hpp"
#include "tracerec/reconstruct.hpp"

namespace tracerec {
namespace {

using namespace literals;
using O = ReconstructionResult::Outcome;

std::vector<BitString> bits(std::initializer_list<const char*> xs) {
  std::vector<BitString> out;
  for (const char* x : xs) out.push_back(BitString::from_string(x));
  return out;
}

std::vector<std::string> text(const std::vector<BitString>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(x.to_string());
  return out;
}

TEST(MaximalRuns, Examples) {
  auto r = maximal_runs(4, bits({"0011"}));
  EXPECT_EQ(r.outcome, O::kSuccess);
  EXPECT_EQ(r.estimate, "0011"_bits);

  r = maximal_runs(4, bits({"01", "0011"}));
  EXPECT_EQ(r.outcome, O::kSuccess);
  EXPECT_EQ(r.estimate, "0011"_bits);

  EXPECT_EQ(maximal_runs(4, bits({"0011", "1100"})).outcome, O::kFirstBitMismatch);
  EXPECT_EQ(maximal_runs(4, bits({"001"})).outcome, O::kLengthMismatch);
  EXPECT_EQ(maximal_runs(4, {}).outcome, O::kEmptyTraceSet);
}

TEST(MaximalRuns, EmptyTraces) {
  EXPECT_EQ(maximal_runs(3, bits({"", ""})).outcome, O::kLengthMismatch);
  EXPECT_TRUE(maximal_runs(0, bits({""})).ok());
  // Empty traces never enter the kept set when another trace has runs.
  EXPECT_TRUE(maximal_runs(2, bits({"", "01"})).recovers("01"_bits));
}

TEST(MaximalRuns, OnlyTracesWithMostRunsCount) {
  // "000" has fewer runs than "0101" and does not stretch the first run.
  const auto r = maximal_runs(4, bits({"000", "0101"}));
  EXPECT_TRUE(r.recovers("0101"_bits));
  const auto mix = maximal_runs(6, bits({"0011", "0111", "001"}));
  EXPECT_EQ(mix.outcome, O::kLengthMismatch);
}

// Direct transcription of the run-wise maximum on decomposed traces.
ReconstructionResult reference_maximal_runs(std::size_t n,
                                            const std::vector<BitString>& ts) {
  if (ts.empty()) return {O::kEmptyTraceSet, {}};
  std::size_t m = 0;
  for (const auto& t : ts) m = std::max(m, t.empty() ? 0 : run_decompose(t).run_count());
  if (m == 0) return {n == 0 ? O::kSuccess : O::kLengthMismatch, {}};
  std::vector<RunProfile> kept;
  for (const auto& t : ts) {
    if (!t.empty() && run_decompose(t).run_count() == m) kept.push_back(run_decompose(t));
  }
  for (const auto& k : kept) {
    if (k.first_bit != kept[0].first_bit) return {O::kFirstBitMismatch, {}};
  }
  RunProfile out{kept[0].first_bit, std::vector<std::size_t>(m, 0)};
  for (const auto& k : kept) {
    for (std::size_t i = 0; i < m; ++i) out.lengths[i] = std::max(out.lengths[i], k.lengths[i]);
  }
  if (out.total_length() != n) return {O::kLengthMismatch, {}};
  return {O::kSuccess, run_compose(out)};
}

TEST(MaximalRuns, MatchesReferenceAndOrderInvariant) {
  std::mt19937_64 gen(61);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t n = 1 + gen() % 140;
    const auto s = testing::random_bits(gen, n);
    auto traces = traces_of(sample_traces(s, 0.05 * (gen() % 10), 1 + gen() % 6,
                                          RngSpec{gen()}));
    const auto expected = reference_maximal_runs(n, traces);
    const auto got = maximal_runs(n, traces);
    ASSERT_EQ(got.outcome, expected.outcome);
    if (got.ok()) {
      EXPECT_EQ(got.estimate, expected.estimate);
      EXPECT_EQ(got.estimate.size(), n);
      std::size_t m = 0;
      for (const auto& t : traces) m = std::max(m, t.run_count());
      EXPECT_EQ(got.estimate.run_count(), m);
    }
    std::shuffle(traces.begin(), traces.end(), gen);
    const auto shuffled = maximal_runs(n, traces);
    EXPECT_EQ(shuffled.outcome, got.outcome);
    EXPECT_EQ(shuffled.estimate, got.estimate);
  }
}

TEST(ConsistentSources, Examples) {
  EXPECT_EQ(text(consistent_sources(1, bits({"0"}))), (std::vector<std::string>{"0"}));
  EXPECT_EQ(text(consistent_sources(2, bits({"0"}))),
            (std::vector<std::string>{"00", "01", "10"}));
  EXPECT_EQ(text(consistent_sources(3, bits({"00", "0"}))),
            (std::vector<std::string>{"000", "001", "010", "100"}));
  EXPECT_TRUE(consistent_sources(2, bits({"000"})).empty());
  EXPECT_EQ(consistent_sources(3, bits({""})).size(), 8u);
}

TEST(ConsistentSources, CapIsEnforced) {
  const auto s = BitString(21, false);
  const std::vector<BitString> traces{s};
  try {
    consistent_sources(21, traces);
    FAIL() << "expected an infeasibility error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInfeasible);
    EXPECT_NE(std::string(e.what()).find("brute-force infeasible"), std::string::npos);
  }
  EXPECT_EQ(consistent_sources(21, traces, {21, false}).size(), 1u);
  EXPECT_THROW(consistent_sources(3, bits({"0"}), {63, false}), Error);
}

// Independent oracle: intersect the supersequence sets of each trace, each
// built by enumerating all subsequences of every candidate.
TEST(ConsistentSources, MatchesSupersequenceIntersection) {
  std::mt19937_64 gen(67);
  for (int rep = 0; rep < 150; ++rep) {
    const std::size_t n = 1 + gen() % 10;
    const auto s = testing::random_bits(gen, n);
    const auto traces =
        traces_of(sample_traces(s, 0.45, 1 + gen() % 4, RngSpec{gen()}));
    std::set<std::string> expected = testing::all_strings(n);
    for (const auto& t : traces) {
      std::set<std::string> supers;
      for (const auto& x : testing::all_strings(n)) {
        if (testing::all_subsequences(x).count(t.to_string())) supers.insert(x);
      }
      std::set<std::string> kept;
      std::set_intersection(expected.begin(), expected.end(), supers.begin(),
                            supers.end(), std::inserter(kept, kept.begin()));
      expected = std::move(kept);
    }
    const auto got = text(consistent_sources(n, traces));
    EXPECT_EQ(got, std::vector<std::string>(expected.begin(), expected.end()));
    EXPECT_TRUE(std::binary_search(got.begin(), got.end(), s.to_string()));
  }
}

TEST(Sufficiency, Examples) {
  EXPECT_TRUE(is_levenshtein_sufficient("000"_bits, bits({"000"})).sufficient);
  const auto v = is_levenshtein_sufficient("000"_bits, bits({"00", "0"}));
  EXPECT_FALSE(v.sufficient);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_NE(*v.witness, "000"_bits);
  EXPECT_EQ(v.witness->size(), 3u);
  EXPECT_TRUE(is_levenshtein_sufficient("0"_bits, bits({"0"})).sufficient);
}

TEST(Sufficiency, CountsAndErrors) {
  const auto early = is_levenshtein_sufficient("000"_bits, bits({"00"}));
  EXPECT_EQ(early.consistent_count, 2u);
  EXPECT_TRUE(early.count_is_lower_bound);
  const auto full = is_levenshtein_sufficient("000"_bits, bits({"00"}), {20, true});
  EXPECT_EQ(full.consistent_count, 4u);
  EXPECT_FALSE(full.count_is_lower_bound);
  EXPECT_EQ(*full.witness, "001"_bits);
  EXPECT_THROW(is_levenshtein_sufficient("000"_bits, bits({"1"})), Error);
}

TEST(Sufficiency, AgreesWithConsistentSources) {
  std::mt19937_64 gen(71);
  for (int rep = 0; rep < 400; ++rep) {
    const std::size_t n = 1 + gen() % 12;
    const auto s = testing::random_bits(gen, n);
    const auto traces =
        traces_of(sample_traces(s, 0.3, 1 + gen() % 4, RngSpec{gen()}));
    const auto all = consistent_sources(n, traces);
    const auto v = is_levenshtein_sufficient(s, traces);
    EXPECT_EQ(v.sufficient, all.size() == 1);
    if (!v.sufficient) {
      ASSERT_TRUE(v.witness.has_value());
      EXPECT_TRUE(std::find(all.begin(), all.end(), *v.witness) != all.end());
    }
  }
}

}  // namespace
}  // namespace tracerec
