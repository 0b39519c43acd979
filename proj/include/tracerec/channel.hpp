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

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "tracerec/bitstring.hpp"

namespace tracerec {

/// Mixing step of SplitMix64; bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Per-trial seed: splitmix64(master + golden * (trial + 1)). Pure in its
/// arguments, so trials can run in any order or on any thread.
constexpr std::uint64_t trial_seed(std::uint64_t master,
                                   std::uint64_t trial) noexcept {
  return splitmix64(master + 0x9E3779B97F4A7C15ull * (trial + 1));
}

/// One deterministic random stream. Uniforms are built from the top 53 bits
/// of std::mt19937_64 so the sequence does not depend on the standard
/// library's distribution implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform on [0, bound); bound must be positive. Lemire-style rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const unsigned __int128 product =
          static_cast<unsigned __int128>(engine_()) * bound;
      if (static_cast<std::uint64_t>(product) >= threshold) {
        return static_cast<std::uint64_t>(product >> 64);
      }
    }
  }

 private:
  std::mt19937_64 engine_;
};

struct RngSpec {
  static constexpr const char* kAlgorithm = "mt19937_64/splitmix64-trial-seed";
  std::uint64_t master_seed = 0;

  RngStream stream(std::uint64_t trial) const {
    return RngStream(trial_seed(master_seed, trial));
  }
};

/// One channel realization; bit i set means source position i was deleted.
struct DeletionMask {
  BitString deleted;

  std::size_t size() const noexcept { return deleted.size(); }
  std::size_t deletion_count() const noexcept { return deleted.count_ones(); }
  bool operator[](std::size_t i) const noexcept { return deleted[i]; }

  /// Number of deleted positions in [begin, end).
  std::size_t deleted_in(std::size_t begin, std::size_t end) const noexcept {
    std::size_t count = 0;
    for (std::size_t i = begin; i < end; ++i) count += deleted[i] ? 1u : 0u;
    return count;
  }

  static DeletionMask none(std::size_t n) { return {BitString(n, false)}; }
  static DeletionMask all(std::size_t n) { return {BitString(n, true)}; }
  static DeletionMask at(std::size_t n,
                         std::initializer_list<std::size_t> positions) {
    DeletionMask m = none(n);
    for (std::size_t i : positions) m.deleted.set(i, true);
    return m;
  }

  friend bool operator==(const DeletionMask&, const DeletionMask&) = default;
};

struct MaskedTrace {
  BitString trace;
  DeletionMask mask;
  std::size_t source_length = 0;
};

inline void check_probability(double p) {
  detail::require(p >= 0.0 && p <= 1.0,
                  "deletion probability must lie in [0,1]");
}

inline DeletionMask sample_mask(std::size_t n, double p, RngStream& rng) {
  check_probability(p);
  DeletionMask mask = DeletionMask::none(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.bernoulli(p)) mask.deleted.set(i, true);
  }
  return mask;
}

inline BitString apply_mask(const BitString& s, const DeletionMask& mask) {
  detail::require(s.size() == mask.size(),
                  "mask length does not match source length");
  BitString out;
  out.reserve(s.size() - mask.deletion_count());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!mask[i]) out.push_back(s[i]);
  }
  return out;
}

inline MaskedTrace make_masked_trace(const BitString& s, DeletionMask mask) {
  BitString trace = apply_mask(s, mask);
  return MaskedTrace{std::move(trace), std::move(mask), s.size()};
}

/// Draws `count` independent traces from `rng`.
inline std::vector<MaskedTrace> sample_traces(const BitString& s, double p,
                                              std::size_t count,
                                              RngStream& rng) {
  check_probability(p);
  detail::require(count >= 1, "empty trace set has undefined sufficiency");
  std::vector<MaskedTrace> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(make_masked_trace(s, sample_mask(s.size(), p, rng)));
  }
  return out;
}

/// Trace set for trial `trial` of an experiment seeded by `spec`.
inline std::vector<MaskedTrace> sample_traces(const BitString& s, double p,
                                              std::size_t count,
                                              const RngSpec& spec,
                                              std::uint64_t trial = 0) {
  RngStream rng = spec.stream(trial);
  return sample_traces(s, p, count, rng);
}

inline std::vector<BitString> traces_of(const std::vector<MaskedTrace>& set) {
  std::vector<BitString> out;
  out.reserve(set.size());
  for (const auto& t : set) out.push_back(t.trace);
  return out;
}

}  // namespace tracerec
