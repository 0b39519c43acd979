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
#include <numeric>
#include <vector>

#include "tracerec/bitstring.hpp"

namespace tracerec {

/// Canonical run decomposition: the first symbol plus ordered run lengths.
/// Runs alternate, so run i carries bit `first_bit ^ (i & 1)`.
struct RunProfile {
  bool first_bit = false;
  std::vector<std::size_t> lengths;

  std::size_t run_count() const noexcept { return lengths.size(); }
  std::size_t total_length() const noexcept {
    return std::accumulate(lengths.begin(), lengths.end(), std::size_t{0});
  }
  bool bit_of_run(std::size_t i) const noexcept {
    return first_bit ^ ((i & 1u) != 0);
  }

  friend bool operator==(const RunProfile&, const RunProfile&) = default;
};

inline RunProfile run_decompose(const BitString& s) {
  detail::require(!s.empty(), "empty string has no runs");
  RunProfile profile;
  profile.first_bit = s[0];
  std::size_t start = 0;
  s.for_each_transition([&](std::size_t i) {
    profile.lengths.push_back(i + 1 - start);
    start = i + 1;
  });
  profile.lengths.push_back(s.size() - start);
  return profile;
}

inline BitString run_compose(const RunProfile& profile) {
  BitString out;
  out.reserve(profile.total_length());
  for (std::size_t i = 0; i < profile.lengths.size(); ++i) {
    detail::require(profile.lengths[i] >= 1, "run lengths must be positive");
    out.append_run(profile.bit_of_run(i), profile.lengths[i]);
  }
  return out;
}

/// Start offset of every run, aligned with `profile.lengths`.
inline std::vector<std::size_t> run_offsets(const RunProfile& profile) {
  std::vector<std::size_t> offsets(profile.lengths.size());
  std::exclusive_scan(profile.lengths.begin(), profile.lengths.end(),
                      offsets.begin(), std::size_t{0});
  return offsets;
}

}  // namespace tracerec
