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

// Generators for the two source-string families the analysis works with:
//
//   Q(r, l n^a)  strings containing some period-r block A repeated
//                floor(l n^a) times;
//   S(M, l*)     strings with exactly M runs whose lengths scale like l_i n.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "tracerec/bitstring.hpp"
#include "tracerec/runs.hpp"

namespace tracerec {

/// Location of A^copies inside a host string, with |A| = period.
struct PatternSpan {
  std::size_t offset = 0;
  std::size_t period = 1;
  std::size_t copies = 1;

  std::size_t length() const noexcept { return period * copies; }
  std::size_t end() const noexcept { return offset + length(); }
  std::size_t copy_begin(std::size_t j) const noexcept {
    return offset + j * period;
  }

  friend bool operator==(const PatternSpan&, const PatternSpan&) = default;
};

/// True iff the span fits in `s` and s[offset, end) is its first `period`
/// bits repeated `copies` times.
inline bool span_matches(const BitString& s, const PatternSpan& span) {
  if (span.period == 0 || span.copies == 0 || span.end() > s.size()) {
    return false;
  }
  for (std::size_t i = span.offset + span.period; i < span.end(); ++i) {
    if (s[i] != s[i - span.period]) return false;
  }
  return true;
}

struct ClassSpecQ {
  BitString pattern;  // A; r = pattern.size()
  double ell = 1.0;
  double a = 1.0;

  std::size_t period() const noexcept { return pattern.size(); }

  /// floor(l n^a). The small epsilon keeps exact products such as
  /// 0.5 * 8 from landing one below the integer after rounding.
  std::size_t copies(std::size_t n) const {
    const double f = ell * std::pow(static_cast<double>(n), a);
    return static_cast<std::size_t>(std::floor(f + 1e-9));
  }
};

struct QInstance {
  BitString bits;
  PatternSpan span;
};

/**
 * Places A^f at offset 0 and fills the remaining bits with an alternating
 * sequence that starts with the complement of A's first bit, so the copy
 * right after the span can never equal A.
 */
inline QInstance make_q_instance(const ClassSpecQ& spec, std::size_t n) {
  detail::require(!spec.pattern.empty(), "Q pattern must be nonempty");
  detail::require(spec.ell > 0.0 && spec.ell <= 1.0, "Q ell must be in (0,1]");
  detail::require(spec.a > 0.0 && spec.a <= 1.0, "Q a must be in (0,1]");
  const std::size_t r = spec.period();
  const std::size_t f = spec.copies(n);
  detail::require(f >= 1, "Q instance needs at least one copy of the pattern");
  detail::require(f <= n / r, "Q instance infeasible: pattern longer than n");

  QInstance out;
  out.bits.reserve(n);
  for (std::size_t j = 0; j < f; ++j) out.bits.append(spec.pattern);
  bool next = !spec.pattern[0];
  while (out.bits.size() < n) {
    out.bits.push_back(next);
    next = !next;
  }
  out.span = PatternSpan{0, r, f};
  return out;
}

struct ClassSpecS {
  bool first_bit = false;
  std::vector<double> fractions;  // l_1..l_M, positive, summing to 1

  std::size_t run_count() const noexcept { return fractions.size(); }
  double longest_fraction() const {
    detail::require(!fractions.empty(), "S spec has no runs");
    return *std::max_element(fractions.begin(), fractions.end());
  }
};

/**
 * Rounds l_i n to integers summing to n: every run gets floor(l_i n), then
 * the leftover bits go one at a time to runs in decreasing l_i order, ties
 * broken by index.
 */
inline std::vector<std::size_t> s_run_lengths(const ClassSpecS& spec,
                                              std::size_t n) {
  const std::size_t m = spec.fractions.size();
  detail::require(m >= 1, "S spec has no runs");
  double sum = 0.0;
  for (double l : spec.fractions) {
    detail::require(l > 0.0, "S fractions must be positive");
    sum += l;
  }
  detail::require(std::abs(sum - 1.0) <= 1e-9, "S fractions must sum to 1");

  std::vector<std::size_t> lengths(m);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double share = spec.fractions[i] * static_cast<double>(n);
    lengths[i] = static_cast<std::size_t>(std::floor(share + 1e-9));
    assigned += lengths[i];
  }
  detail::require(assigned <= n, "S fractions overshoot n");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x,
                                                   std::size_t y) {
    return spec.fractions[x] > spec.fractions[y];
  });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % m, ++assigned) {
    ++lengths[order[k]];
  }
  for (std::size_t len : lengths) {
    detail::require(len >= 1, "n too small for M runs");
  }
  return lengths;
}

inline BitString make_s_instance(const ClassSpecS& spec, std::size_t n) {
  return run_compose(RunProfile{spec.first_bit, s_run_lengths(spec, n)});
}

}  // namespace tracerec
