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
#include <cmath>
#include <cstdint>
#include <utility>

#include "tracerec/analytics.hpp"
#include "tracerec/error.hpp"

namespace tracerec {

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for `successes` out of `trials`. Unlike the Wald
/// interval it stays inside [0,1] and has width when the count is 0 or n.
inline std::pair<double, double> wilson_interval(std::uint64_t successes,
                                                 std::uint64_t trials,
                                                 double z = kZ95) {
  detail::require(trials > 0 && successes <= trials,
                  "Wilson interval needs 0 <= k <= n, n > 0");
  const double n = static_cast<double>(trials);
  const double k = static_cast<double>(successes);
  const double phat = k / n;
  const double z2 = z * z;
  const double center = (k + z2 / 2) / (n + z2);
  const double half = z / (n + z2) * std::sqrt(k * (n - k) / n + z2 / 4);
  // Clamp against rounding so that low <= phat <= high always holds.
  const double low = std::min(phat, std::max(0.0, center - half));
  const double high = std::max(phat, std::min(1.0, center + half));
  return {low, high};
}

inline ProbReport monte_carlo_report(std::uint64_t successes,
                                     std::uint64_t trials) {
  const double phat =
      static_cast<double>(successes) / static_cast<double>(trials);
  ProbReport r = ProbReport::from_ln(std::log(phat), Method::kMonteCarlo);
  r.value = phat;
  r.ci = wilson_interval(successes, trials);
  return r;
}

/// Binomial standard error of a proportion estimate.
inline double binomial_sigma(double p, std::uint64_t trials) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace tracerec
