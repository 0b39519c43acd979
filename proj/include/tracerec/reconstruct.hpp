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

#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tracerec/bitstring.hpp"
#include "tracerec/runs.hpp"

namespace tracerec {

// ---------------------------------------------------------------------------
// Maximal Runs

struct ReconstructionResult {
  enum class Outcome {
    kSuccess,
    kFirstBitMismatch,
    kLengthMismatch,
    kEmptyTraceSet,
  };

  Outcome outcome = Outcome::kEmptyTraceSet;
  BitString estimate;  // meaningful only on success

  bool ok() const noexcept { return outcome == Outcome::kSuccess; }
  bool recovers(const BitString& s) const { return ok() && estimate == s; }
};

inline std::string_view to_string(ReconstructionResult::Outcome o) {
  using O = ReconstructionResult::Outcome;
  switch (o) {
    case O::kSuccess: return "success";
    case O::kFirstBitMismatch: return "first-bit mismatch";
    case O::kLengthMismatch: return "length mismatch";
    case O::kEmptyTraceSet: return "empty trace set";
  }
  return "unknown";
}

/**
 * Maximal Runs reconstruction.
 *
 * Keeps the traces with the largest run count M; if they all start with
 * the same bit, the i-th output run is the longest i-th run among them.
 * The result is accepted only if its length is n. Every trace in the kept
 * set has the same first bit and M runs, so run i has the same symbol in
 * all of them and ties in the argmax cannot change the output.
 *
 * O(n T) time, O(M) extra space. An all-empty trace set has M = 0 and only
 * reconstructs the empty string.
 */
inline ReconstructionResult maximal_runs(std::size_t n,
                                         std::span<const BitString> traces) {
  using O = ReconstructionResult::Outcome;
  if (traces.empty()) return {O::kEmptyTraceSet, {}};

  std::vector<std::size_t> runs(traces.size());
  std::size_t max_runs = 0;
  for (std::size_t k = 0; k < traces.size(); ++k) {
    runs[k] = traces[k].run_count();
    max_runs = std::max(max_runs, runs[k]);
  }
  if (max_runs == 0) {
    return n == 0 ? ReconstructionResult{O::kSuccess, {}}
                  : ReconstructionResult{O::kLengthMismatch, {}};
  }

  std::optional<bool> first_bit;
  std::vector<std::size_t> longest(max_runs, 0);
  for (std::size_t k = 0; k < traces.size(); ++k) {
    if (runs[k] != max_runs) continue;
    const BitString& t = traces[k];
    if (first_bit && *first_bit != t[0]) return {O::kFirstBitMismatch, {}};
    first_bit = t[0];
    std::size_t run = 0;
    std::size_t start = 0;
    t.for_each_transition([&](std::size_t i) {
      longest[run] = std::max(longest[run], i + 1 - start);
      ++run;
      start = i + 1;
    });
    longest[run] = std::max(longest[run], t.size() - start);
  }

  std::size_t total = 0;
  for (std::size_t len : longest) total += len;
  if (total != n) return {O::kLengthMismatch, {}};
  return {O::kSuccess, run_compose(RunProfile{*first_bit, std::move(longest)})};
}

// ---------------------------------------------------------------------------
// Brute-force sufficiency oracle

struct OracleOptions {
  static constexpr std::size_t kDefaultCap = 20;
  static constexpr std::size_t kHardCap = 62;

  std::size_t cap = kDefaultCap;  // largest n the enumeration accepts
  bool count_all = false;         // otherwise stop at the second match
};

namespace detail {

// Candidates are integers v in [0, 2^n); position i of the string is bit
// (n - 1 - i) of v, so increasing v is lexicographic order.
class CandidateMatcher {
 public:
  CandidateMatcher(std::size_t n, std::span<const BitString> traces) : n_(n) {
    full_ = n == 0 ? 0 : (~std::uint64_t{0} >> (64 - n));
    for (const auto& t : traces) {
      feasible_ = feasible_ && t.size() <= n;
      min_ones_ = std::max(min_ones_, t.count_ones());
      min_zeros_ = std::max(min_zeros_, t.count_zeros());
      symbols_.emplace_back();
      for (std::size_t i = 0; i < t.size(); ++i) symbols_.back().push_back(t[i]);
    }
    // Longest traces first: they reject candidates soonest.
    std::sort(symbols_.begin(), symbols_.end(),
              [](const auto& a, const auto& b) { return a.size() > b.size(); });
  }

  bool feasible() const noexcept { return feasible_; }

  bool consistent(std::uint64_t v) const noexcept {
    const auto ones = static_cast<std::size_t>(std::popcount(v));
    if (ones < min_ones_ || n_ - ones < min_zeros_) return false;
    for (const auto& t : symbols_) {
      if (!embeds(v, t)) return false;
    }
    return true;
  }

  BitString to_bits(std::uint64_t v) const {
    BitString out;
    out.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) out.push_back((v >> (n_ - 1 - i)) & 1u);
    return out;
  }

  static std::uint64_t to_word(const BitString& s) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < s.size(); ++i) v = (v << 1) | (s[i] ? 1u : 0u);
    return v;
  }

 private:
  // Greedy leftmost embedding, one bit scan per symbol.
  bool embeds(std::uint64_t v, const std::vector<bool>& t) const noexcept {
    const std::uint64_t zeros = ~v & full_;
    std::size_t pos = 0;  // next usable position
    for (bool b : t) {
      const std::size_t window = n_ - pos;  // bits [0, window) are usable
      if (window == 0) return false;
      const std::uint64_t usable = window >= 64
                                       ? ~std::uint64_t{0}
                                       : (std::uint64_t{1} << window) - 1;
      const std::uint64_t avail = (b ? v : zeros) & usable;
      if (avail == 0) return false;
      const auto k = static_cast<std::size_t>(std::bit_width(avail)) - 1;
      pos = n_ - k;
    }
    return true;
  }

  std::size_t n_;
  std::uint64_t full_ = 0;
  bool feasible_ = true;
  std::size_t min_ones_ = 0;
  std::size_t min_zeros_ = 0;
  std::vector<std::vector<bool>> symbols_;
};

inline void check_oracle_size(std::size_t n, const OracleOptions& options) {
  detail::require(options.cap <= OracleOptions::kHardCap,
                  "oracle cap above the 62-bit enumeration limit");
  detail::require(n <= options.cap, "brute-force infeasible",
                  ErrorKind::kInfeasible);
}

/// Calls `visit(v)` for each consistent candidate in lexicographic order
/// until it returns false.
template <typename Visit>
void for_each_consistent(std::size_t n, std::span<const BitString> traces,
                         const OracleOptions& options, Visit&& visit) {
  check_oracle_size(n, options);
  const CandidateMatcher matcher(n, traces);
  if (!matcher.feasible()) return;
  const std::uint64_t end = std::uint64_t{1} << n;
  for (std::uint64_t v = 0; v < end; ++v) {
    if (matcher.consistent(v) && !visit(matcher, v)) return;
  }
}

}  // namespace detail

/// Every length-n string having all traces as subsequences, in
/// lexicographic order.
inline std::vector<BitString> consistent_sources(
    std::size_t n, std::span<const BitString> traces,
    const OracleOptions& options = {}) {
  std::vector<BitString> out;
  detail::for_each_consistent(n, traces, options,
                              [&](const auto& matcher, std::uint64_t v) {
                                out.push_back(matcher.to_bits(v));
                                return true;
                              });
  return out;
}

struct SufficiencyVerdict {
  std::size_t consistent_count = 1;
  bool count_is_lower_bound = false;  // enumeration stopped early
  bool sufficient = true;
  std::optional<BitString> witness;   // another consistent source
};

/// Levenshtein sufficiency: s is the only length-|s| string consistent with
/// the traces.
inline SufficiencyVerdict is_levenshtein_sufficient(
    const BitString& s, std::span<const BitString> traces,
    const OracleOptions& options = {}) {
  detail::check_oracle_size(s.size(), options);
  for (const auto& t : traces) {
    detail::require(is_subsequence(t, s), "traces inconsistent with source");
  }
  const std::uint64_t source = detail::CandidateMatcher::to_word(s);
  SufficiencyVerdict verdict;
  verdict.consistent_count = 0;
  detail::for_each_consistent(
      s.size(), traces, options, [&](const auto& matcher, std::uint64_t v) {
        ++verdict.consistent_count;
        if (v != source && !verdict.witness) verdict.witness = matcher.to_bits(v);
        if (!options.count_all && verdict.consistent_count >= 2) {
          verdict.count_is_lower_bound = true;
          return false;
        }
        return true;
      });
  verdict.sufficient = verdict.consistent_count == 1;
  return verdict;
}

}  // namespace tracerec
