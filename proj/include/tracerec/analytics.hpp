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

// Closed-form and asymptotic probabilities for the complements of E1 and E2
// under the i.i.d. deletion channel. All logarithms are natural.
//
// Notation in comments: p deletion probability, T number of traces, r
// period of the repeated block, f number of copies, u_i run lengths,
// rho_i = (1-p)^{u_i} / (1 - p^{u_i}), p_X = prod_i (1 - p^{u_i}).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tracerec/error.hpp"
#include "tracerec/logmath.hpp"

namespace tracerec {

enum class Method {
  kExactClosedForm,
  kExactDirectSum,
  kAsymptotic,
  kMonteCarlo,
};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::kExactClosedForm: return "exact-closed-form";
    case Method::kExactDirectSum: return "exact-direct-sum";
    case Method::kAsymptotic: return "asymptotic";
    case Method::kMonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

/// A probability carried in both linear and log domain.
struct ProbReport {
  double value = 0.0;
  double ln_value = logmath::kNegInf;
  Method method = Method::kExactClosedForm;
  std::optional<std::pair<double, double>> ci;  // Monte Carlo only
  bool cancellation = false;      // alternating sum lost precision
  bool outside_validity = false;  // asymptotic used outside its regime

  static ProbReport from_ln(double ln_value, Method method) {
    ProbReport r;
    r.ln_value = ln_value;
    r.value = std::exp(ln_value);
    r.method = method;
    return r;
  }
};

/// Number of traces, either a concrete integer or T = exp(c n^a). In the
/// exponential form only ln T is ever formed.
class AnalyticT {
 public:
  enum class Mode { kInteger, kExponential };

  static AnalyticT integer(std::uint64_t count) {
    detail::require(count >= 1, "trace count must be at least 1");
    AnalyticT t;
    t.mode_ = Mode::kInteger;
    t.count_ = count;
    return t;
  }

  /// T = exp(c n^a). With `round_to_integer`, T is rounded to the nearest
  /// integer while that is still representable exactly in a double.
  static AnalyticT exponential(double c, double a, std::uint64_t n,
                               bool round_to_integer = false) {
    detail::require(c > 0.0, "exponential schedule needs c > 0");
    detail::require(a > 0.0 && a <= 1.0, "exponential schedule needs a in (0,1]");
    AnalyticT t;
    t.mode_ = Mode::kExponential;
    t.c_ = c;
    t.a_ = a;
    t.n_ = n;
    t.round_ = round_to_integer;
    return t;
  }

  Mode mode() const noexcept { return mode_; }
  double c() const noexcept { return c_; }
  double a() const noexcept { return a_; }
  std::uint64_t n() const noexcept { return n_; }

  /// n^a, the scale on which copy counts and run lengths grow.
  double scale() const { return std::pow(static_cast<double>(n_), a_); }

  double ln_t() const {
    if (mode_ == Mode::kInteger) return std::log(static_cast<double>(count_));
    const double x = c_ * scale();
    if (round_ && x < 53.0 * 0.6931471805599453) {
      return std::log(std::max(1.0, std::round(std::exp(x))));
    }
    return x;
  }

  /// The trace count as an integer, if it fits in a signed 64-bit value.
  std::optional<std::uint64_t> as_integer() const {
    if (mode_ == Mode::kInteger) return count_;
    const double t = std::round(std::exp(c_ * scale()));
    if (!(t < 9.2233720368547758e18)) return std::nullopt;
    return static_cast<std::uint64_t>(std::max(1.0, t));
  }

 private:
  AnalyticT() = default;

  Mode mode_ = Mode::kInteger;
  std::uint64_t count_ = 1;
  double c_ = 0.0;
  double a_ = 1.0;
  std::uint64_t n_ = 0;
  bool round_ = false;
};

struct ThresholdParams {
  std::size_t r = 1;
  double ell = 1.0;
  double p = 0.5;
};

namespace detail {

inline void require_open_probability(double p) {
  require(p > 0.0 && p < 1.0, "deletion probability must lie in (0,1)");
}

inline void require_run_lengths(std::span<const double> lengths) {
  require(!lengths.empty(), "need at least one run");
  for (double u : lengths) require(u > 0.0, "run lengths must be positive");
}

inline std::vector<double> to_real(std::span<const std::size_t> xs) {
  return {xs.begin(), xs.end()};
}

/// ln rho_i = u ln(1-p) - ln(1 - p^u).
inline double ln_rho(double u, double p) {
  return u * std::log1p(-p) - std::log1p(-std::pow(p, u));
}

/// ln(1 - prod_{i in K} (1 - rho_i)) given ln rho_i for i in K.
inline double ln_one_minus_prod(std::span<const double> ln_rhos) {
  double worst = logmath::kNegInf;
  double sum = 0.0;
  for (double lr : ln_rhos) {
    worst = std::max(worst, lr);
    sum += logmath::log1mexp(lr);
  }
  // For tiny rho the first-order sum is exact to ~e^-40 and cannot
  // underflow to zero the way 1 - prod does.
  if (worst < -40.0) return logmath::log_sum_exp(ln_rhos);
  return logmath::log1mexp(sum);
}

}  // namespace detail

/// Threshold exponent c* = ell ln(1 / (1 - p^r)) in nats.
inline double c_star(std::size_t r, double ell, double p) {
  detail::require(r >= 1, "period r must be at least 1");
  detail::require(ell > 0.0 && ell <= 1.0, "ell must lie in (0,1]");
  detail::require(p > 0.0 && p < 1.0, "degenerate channel: p must lie in (0,1)");
  return -ell * std::log1p(-std::pow(p, static_cast<double>(r)));
}

inline double c_star(const ThresholdParams& params) {
  return c_star(params.r, params.ell, params.p);
}

/**
 * Pr(not E1) for a block of `copies` repetitions of a period-r pattern:
 * (1 - (1 - p^r)^f)^T. `copies` may be real (the continuation f = l n^a);
 * T may be real through the exponential schedule.
 */
inline ProbReport prob_e1bar_exact(std::size_t r, double copies, double p,
                                   const AnalyticT& t) {
  detail::require(r >= 1, "period r must be at least 1");
  detail::require(copies > 0.0, "copy count must be positive");
  detail::require(p >= 0.0 && p <= 1.0, "deletion probability must lie in [0,1]");
  const double ln_survive =
      copies * std::log1p(-std::pow(p, static_cast<double>(r)));
  return ProbReport::from_ln(logmath::log_pow1m(t.ln_t(), ln_survive),
                             Method::kExactClosedForm);
}

/**
 * Pr(not E2) through the binomial moment-generating function:
 *
 *   sum over nonempty K of (-1)^{|K|+1} (1 - p_X (1 - prod_{i in K}
 *   (1 - rho_i)))^T.
 *
 * Every power is formed in log domain; the alternating sum goes through a
 * compensated signed log-sum-exp and raises `cancellation` if precision is
 * lost. Run lengths may be real.
 */
inline ProbReport prob_e2bar_exact_mgf(std::span<const double> run_lengths,
                                       double p, const AnalyticT& t) {
  constexpr std::size_t kMaxRuns = 20;
  detail::require_open_probability(p);
  detail::require_run_lengths(run_lengths);
  const std::size_t m = run_lengths.size();
  detail::require(m <= kMaxRuns, "too many runs for the 2^M subset sum");

  const double ln_t = t.ln_t();
  std::vector<double> ln_rho(m);
  double ln_px = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    ln_rho[i] = detail::ln_rho(run_lengths[i], p);
    ln_px += std::log1p(-std::pow(p, run_lengths[i]));
  }

  std::vector<logmath::SignedTerm> terms;
  terms.reserve((std::size_t{1} << m) - 1);
  std::vector<double> subset;
  subset.reserve(m);
  for (std::uint32_t k = 1; k < (std::uint32_t{1} << m); ++k) {
    subset.clear();
    for (std::size_t i = 0; i < m; ++i) {
      if (k & (1u << i)) subset.push_back(ln_rho[i]);
    }
    const double ln_z = ln_px + detail::ln_one_minus_prod(subset);
    terms.push_back({logmath::log_pow1m(ln_t, ln_z), subset.size() % 2 == 0});
  }
  const auto sum = logmath::signed_log_sum_exp(terms);
  ProbReport out = ProbReport::from_ln(sum.ln_value, Method::kExactClosedForm);
  out.cancellation = sum.cancellation;
  return out;
}

inline ProbReport prob_e2bar_exact_mgf(std::span<const std::size_t> run_lengths,
                                       double p, const AnalyticT& t) {
  const auto real = detail::to_real(run_lengths);
  return prob_e2bar_exact_mgf(std::span<const double>(real), p, t);
}

/**
 * Pr(not E2) by summing over j, the number of traces with no run fully
 * deleted:
 *
 *   sum_j C(T,j) p_X^j (1-p_X)^{T-j} (1 - prod_i (1 - (1 - rho_i)^j)).
 *
 * All summands are non-negative, so there is no cancellation. O(T M).
 */
inline ProbReport prob_e2bar_exact_sum(std::span<const double> run_lengths,
                                       double p, std::uint64_t t) {
  constexpr std::uint64_t kMaxTraces = 10000;
  detail::require_open_probability(p);
  detail::require_run_lengths(run_lengths);
  detail::require(run_lengths.size() <= 20, "too many runs");
  detail::require(t >= 1, "trace count must be at least 1");
  detail::require(t <= kMaxTraces, "direct sum limited to T <= 10^4",
                  ErrorKind::kInfeasible);

  const std::size_t m = run_lengths.size();
  std::vector<double> log1m_rho(m);
  double ln_px = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    log1m_rho[i] = logmath::log1mexp(detail::ln_rho(run_lengths[i], p));
    ln_px += std::log1p(-std::pow(p, run_lengths[i]));
  }
  const double ln_qx = logmath::log1mexp(ln_px);
  const double tt = static_cast<double>(t);

  std::vector<double> ln_terms;
  ln_terms.reserve(t + 1);
  for (std::uint64_t j = 0; j <= t; ++j) {
    const double jj = static_cast<double>(j);
    double ln_fail;  // ln(1 - prod_i (1 - w_i)), w_i = (1 - rho_i)^j
    if (j == 0) {
      ln_fail = 0.0;
    } else {
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        acc += logmath::log1mexp(jj * log1m_rho[i]);
      }
      ln_fail = logmath::log1mexp(acc);
    }
    const double ln_binom = std::lgamma(tt + 1) - std::lgamma(jj + 1) -
                            std::lgamma(tt - jj + 1);
    const double ln_weight =
        ln_binom + (j == 0 ? 0.0 : jj * ln_px) + (j == t ? 0.0 : (tt - jj) * ln_qx);
    ln_terms.push_back(ln_weight + ln_fail);
  }
  return ProbReport::from_ln(logmath::log_sum_exp(ln_terms),
                             Method::kExactDirectSum);
}

inline ProbReport prob_e2bar_exact_sum(std::span<const std::size_t> run_lengths,
                                       double p, std::uint64_t t) {
  const auto real = detail::to_real(run_lengths);
  return prob_e2bar_exact_sum(std::span<const double>(real), p, t);
}

/// exp(-T^{q ln(1-p^r) + 1}) with q = ell / c.
inline ProbReport prob_e1bar_asymptotic(const ThresholdParams& params, double c,
                                        const AnalyticT& t) {
  detail::require(c > 0.0, "c must be positive");
  detail::require(params.r >= 1, "period r must be at least 1");
  detail::require_open_probability(params.p);
  const double q = params.ell / c;
  const double exponent =
      q * std::log1p(-std::pow(params.p, static_cast<double>(params.r))) + 1.0;
  return ProbReport::from_ln(-std::exp(exponent * t.ln_t()),
                             Method::kAsymptotic);
}

/// Index of the largest fraction and how many fractions tie with it.
inline std::pair<std::size_t, std::size_t> dominant_run(
    std::span<const double> fractions) {
  detail::require(!fractions.empty(), "need at least one run");
  const auto it = std::max_element(fractions.begin(), fractions.end());
  std::size_t ties = 0;
  for (double l : fractions) {
    if (std::abs(l - *it) <= 1e-12 * *it) ++ties;
  }
  return {static_cast<std::size_t>(it - fractions.begin()), ties};
}

/**
 * Singleton-dominant approximation of Pr(not E2):
 *
 *   N exp(-(prod_k (1 - T^{q_k ln p})) T^{q* ln(1-p) + 1} / (1 - T^{q* ln p}))
 *
 * with q_k = l_k / c, q* for the longest run and N the number of runs tied
 * for longest. Only valid for c > c* = l* ln(1/(1-p)); outside that regime
 * the value is still returned but flagged. Being an approximation, it can
 * exceed 1 when N > 1 and the exponent is small.
 */
inline ProbReport prob_e2bar_asymptotic(std::span<const double> fractions,
                                        double p, double c,
                                        const AnalyticT& t) {
  detail::require_open_probability(p);
  detail::require(c > 0.0, "c must be positive");
  for (double l : fractions) detail::require(l > 0.0, "fractions must be positive");
  const auto [star, ties] = dominant_run(fractions);
  const double ln_t = t.ln_t();
  const double ln_p = std::log(p);
  double ln_prod = 0.0;
  for (double l : fractions) ln_prod += std::log1p(-std::exp(l / c * ln_t * ln_p));
  const double q_star = fractions[star] / c;
  const double ln_ratio = (q_star * std::log1p(-p) + 1.0) * ln_t -
                          std::log1p(-std::exp(q_star * ln_t * ln_p));
  ProbReport out = ProbReport::from_ln(
      std::log(static_cast<double>(ties)) - std::exp(ln_prod + ln_ratio),
      Method::kAsymptotic);
  out.outside_validity = c <= fractions[star] * -std::log1p(-p);
  return out;
}

/**
 * ln Pr(not E2) / ln Pr(not E1 on the longest run), both exact, with run
 * lengths u_i = l_i ln T / c (that is l_i n^a on the exponential
 * schedule). Tends to 1 for c > c*.
 */
inline double log_ratio_diagnostic(std::span<const double> fractions, double p,
                                   double c, const AnalyticT& t) {
  detail::require_open_probability(p);
  const auto [star, ties] = dominant_run(fractions);
  (void)ties;
  detail::require(c > fractions[star] * -std::log1p(-p),
                  "log ratio diagnostic needs c > c*");
  const double ln_t = t.ln_t();
  std::vector<double> lengths;
  lengths.reserve(fractions.size());
  for (double l : fractions) lengths.push_back(l * ln_t / c);
  const auto e2 = prob_e2bar_exact_mgf(std::span<const double>(lengths), p, t);
  const auto e1 = prob_e1bar_exact(1, lengths[star], p, t);
  detail::require(e2.ln_value != 0.0 && e1.ln_value != 0.0,
                  "ratio undefined: a probability equals 1");
  return e2.ln_value / e1.ln_value;
}

struct PolynomialRow {
  double m = 0.0;
  std::uint64_t traces = 0;
  ProbReport e1bar;
};

/// Pr(not E1) for a repeat of ell m copies with T = ceil(c m^b) traces, at
/// each m. The limit as m grows is 1.
inline std::vector<PolynomialRow> polynomial_t_limit_check(
    const ThresholdParams& params, double c, double b,
    std::span<const double> m_grid) {
  detail::require(c > 0.0 && b > 0.0, "polynomial schedule needs c, b > 0");
  std::vector<PolynomialRow> rows;
  for (double m : m_grid) {
    const double t = std::ceil(c * std::pow(m, b));
    detail::require(t >= 1.0 && t < 9.2e18, "trace count out of range");
    const auto count = static_cast<std::uint64_t>(t);
    rows.push_back({m, count,
                    prob_e1bar_exact(params.r, params.ell * m, params.p,
                                     AnalyticT::integer(count))});
  }
  return rows;
}

}  // namespace tracerec
