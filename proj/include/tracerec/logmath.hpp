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

// Natural-log helpers for probabilities of the form (1 - y)^T with T far
// beyond the double range.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace tracerec::logmath {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// ln(1 - e^x) for x <= 0.
inline double log1mexp(double x) {
  if (x == 0.0) return kNegInf;
  if (x > -0.6931471805599453) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

/// ln(-ln(1 - y)) given ln y <= 0. Stays accurate when y underflows.
inline double log_neg_log1m(double ln_y) {
  if (ln_y < -700.0) return ln_y;  // -ln(1-y) = y (1 + y/2 + ...) and y/2 < 1e-300
  const double y = std::exp(ln_y);
  return ln_y + std::log(-std::log1p(-y) / y);
}

/// ln((1 - y)^T) given ln T and ln y.
inline double log_pow1m(double ln_t, double ln_y) {
  return -std::exp(ln_t + log_neg_log1m(ln_y));
}

inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SignedTerm {
  double ln_magnitude;
  bool negative;
};

struct SignedLogSum {
  double ln_value = kNegInf;  // ln of the (positive) total
  bool cancellation = false;  // result not trustworthy to 1e-6 relative
};

/**
 * ln(sum of +/- e^{ln_magnitude}). Terms are rescaled by the largest
 * magnitude; positive and negative parts are accumulated separately with
 * compensation. The cancellation flag is raised when the rounding error
 * bound (term count * eps * sum of magnitudes) exceeds 1e-6 of the result,
 * or when the total is not positive.
 */
inline SignedLogSum signed_log_sum_exp(std::span<const SignedTerm> terms) {
  double m = kNegInf;
  for (const auto& t : terms) m = std::max(m, t.ln_magnitude);
  SignedLogSum out;
  if (m == kNegInf) return out;
  CompensatedSum pos;
  CompensatedSum neg;
  for (const auto& t : terms) {
    const double scaled = std::exp(t.ln_magnitude - m);
    (t.negative ? neg : pos).add(scaled);
  }
  const double total = pos.value() - neg.value();
  const double bound = static_cast<double>(terms.size()) *
                       std::numeric_limits<double>::epsilon() *
                       (pos.value() + neg.value());
  if (!(total > 0.0)) {
    out.cancellation = true;
    return out;
  }
  out.cancellation = bound > 1e-6 * total;
  out.ln_value = m + std::log(total);
  return out;
}

}  // namespace tracerec::logmath
