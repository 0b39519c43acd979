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

// Event detectors evaluated on channel realizations (deletion masks), not on
// the traces alone: two different masks can produce the same trace, and the
// events are statements about which copies or runs were deleted.
//
//   E1 on a span A^f:  some trace deletes no copy of A completely.
//   E2 on a string:    for every run i, some trace keeps run i intact while
//                      deleting no run completely.
//
// Failure of E1 (or of the two other necessary conditions below) proves the
// trace set insufficient; the detector also builds the competing source that
// witnesses this.

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "tracerec/bitstring.hpp"
#include "tracerec/channel.hpp"
#include "tracerec/classes.hpp"
#include "tracerec/runs.hpp"

namespace tracerec {

inline bool copy_fully_deleted(const DeletionMask& mask,
                               const PatternSpan& span, std::size_t j) {
  detail::require(j < span.copies, "copy index out of range");
  detail::require(span.end() <= mask.size(), "span exceeds mask length");
  const std::size_t begin = span.copy_begin(j);
  return mask.deleted_in(begin, begin + span.period) == span.period;
}

inline bool any_copy_fully_deleted(const DeletionMask& mask,
                                   const PatternSpan& span) {
  for (std::size_t j = 0; j < span.copies; ++j) {
    if (copy_fully_deleted(mask, span, j)) return true;
  }
  return false;
}

inline bool holds_e1(std::span<const MaskedTrace> traces,
                     const PatternSpan& span) {
  for (const auto& t : traces) {
    if (!any_copy_fully_deleted(t.mask, span)) return true;
  }
  return false;
}

struct E2Report {
  bool holds = false;
  /// run_preserved[i]: some trace deletes no run fully and keeps run i whole.
  std::vector<bool> run_preserved;
};

inline E2Report holds_e2(std::span<const MaskedTrace> traces,
                         const RunProfile& profile) {
  const std::size_t m = profile.run_count();
  E2Report report;
  report.run_preserved.assign(m, false);
  std::vector<std::size_t> deleted(m);
  for (const auto& t : traces) {
    detail::require(t.mask.size() == profile.total_length(),
                    "run profile does not match the mask length");
    std::size_t pos = 0;
    bool no_run_lost = true;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t len = profile.lengths[i];
      deleted[i] = t.mask.deleted_in(pos, pos + len);
      no_run_lost = no_run_lost && deleted[i] < len;
      pos += len;
    }
    if (!no_run_lost) continue;
    for (std::size_t i = 0; i < m; ++i) {
      if (deleted[i] == 0) report.run_preserved[i] = true;
    }
  }
  report.holds = m > 0;
  for (bool b : report.run_preserved) report.holds = report.holds && b;
  return report;
}

struct EventReport {
  std::vector<bool> e1_holds;  // one per registered span
  E2Report e2;
};

inline EventReport evaluate_events(std::span<const MaskedTrace> traces,
                                   std::span<const PatternSpan> spans,
                                   const RunProfile& profile) {
  EventReport out;
  out.e1_holds.reserve(spans.size());
  for (const auto& span : spans) out.e1_holds.push_back(holds_e1(traces, span));
  out.e2 = holds_e2(traces, profile);
  return out;
}

// ---------------------------------------------------------------------------
// Necessary conditions and their witnesses.

/// Condition 1: A^a at span; no trace may delete a copy of A in every case.
struct RepeatPattern {
  PatternSpan span;
};

/// Condition 2: B^before A B^after at `offset`, A != B and |A| <= |B|.
struct SandwichPattern {
  std::size_t offset = 0;
  BitString inner;  // A
  BitString outer;  // B
  std::size_t before = 1;
  std::size_t after = 1;

  std::size_t length() const {
    return (before + after) * outer.size() + inner.size();
  }
};

/// Condition 3: X^x Y^y at `offset` with X != Y. Covers both A^aB^b and the
/// mirrored B^bA^a form.
struct BlockPairPattern {
  std::size_t offset = 0;
  BitString first;
  BitString second;
  std::size_t first_copies = 1;
  std::size_t second_copies = 1;

  std::size_t length() const {
    return first_copies * first.size() + second_copies * second.size();
  }
};

using NecPattern = std::variant<RepeatPattern, SandwichPattern,
                                BlockPairPattern>;

struct NecViolation {
  int condition = 0;  // 1, 2 or 3
  NecPattern pattern;
  BitString alternative;
};

namespace detail {

struct Interval {
  std::size_t begin;
  std::size_t end;
};

inline BitString repeat(const BitString& block, std::size_t times) {
  BitString out;
  out.reserve(block.size() * times);
  for (std::size_t k = 0; k < times; ++k) out.append(block);
  return out;
}

inline BitString splice(const BitString& s, std::size_t offset,
                        std::size_t len, const BitString& replacement) {
  BitString out = s.substr(0, offset);
  out.append(replacement);
  out.append(s.substr(offset + len, s.size() - offset - len));
  return out;
}

/// Shortest w with block == w^k.
inline BitString primitive_root(const BitString& block) {
  const std::size_t n = block.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    if (span_matches(block, PatternSpan{0, d, n / d})) return block.substr(0, d);
  }
  return block;
}

inline BitString flip_first(BitString block) {
  block.set(0, !block[0]);
  return block;
}

inline bool matches_at(const BitString& s, std::size_t offset,
                       const BitString& expected) {
  if (offset > s.size() || expected.size() > s.size() - offset) return false;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (s[offset + i] != expected[i]) return false;
  }
  return true;
}

inline void append_copies(std::vector<Interval>& out, std::size_t& pos,
                          std::size_t width, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k, pos += width) {
    out.push_back({pos, pos + width});
  }
}

struct PatternGeometry {
  std::size_t offset;
  std::size_t length;
  BitString expected;
  std::vector<Interval> copies;
};

inline PatternGeometry geometry(const BitString& s, const RepeatPattern& p) {
  detail::require(p.span.period >= 1 && p.span.copies >= 1 &&
                      p.span.end() <= s.size(),
                  "declared pattern absent from s");
  PatternGeometry g{p.span.offset, p.span.length(), {}, {}};
  g.expected = repeat(s.substr(p.span.offset, p.span.period), p.span.copies);
  std::size_t pos = p.span.offset;
  append_copies(g.copies, pos, p.span.period, p.span.copies);
  return g;
}

inline PatternGeometry geometry(const BitString&, const SandwichPattern& p) {
  detail::require(!p.inner.empty() && p.inner != p.outer &&
                      p.inner.size() <= p.outer.size() && p.before >= 1 &&
                      p.after >= 1,
                  "sandwich pattern needs A != B, |A| <= |B| and a, b >= 1");
  PatternGeometry g{p.offset, p.length(), repeat(p.outer, p.before), {}};
  g.expected.append(p.inner);
  g.expected.append(repeat(p.outer, p.after));
  std::size_t pos = p.offset;
  append_copies(g.copies, pos, p.outer.size(), p.before);
  pos += p.inner.size();
  append_copies(g.copies, pos, p.outer.size(), p.after);
  return g;
}

inline PatternGeometry geometry(const BitString&, const BlockPairPattern& p) {
  detail::require(!p.first.empty() && !p.second.empty() &&
                      p.first != p.second && p.first_copies >= 1 &&
                      p.second_copies >= 1,
                  "block pair pattern needs distinct nonempty blocks");
  PatternGeometry g{p.offset, p.length(), repeat(p.first, p.first_copies), {}};
  g.expected.append(repeat(p.second, p.second_copies));
  std::size_t pos = p.offset;
  append_copies(g.copies, pos, p.first.size(), p.first_copies);
  append_copies(g.copies, pos, p.second.size(), p.second_copies);
  return g;
}

// Replacement for the pattern's substring. Each is the same length as the
// original and a supersequence of the original with any one copy removed.

inline BitString replacement(const RepeatPattern& p, const BitString& s) {
  const BitString unit = s.substr(p.span.offset, p.span.period);
  BitString out = flip_first(unit);  // D != A, |D| = |A|
  out.append(repeat(unit, p.span.copies - 1));
  return out;
}

inline BitString replacement(const SandwichPattern& p, const BitString& s) {
  // B^{a-1} A B A pad B^{b-1}, pad = 1^{|B|-|A|}. When that reproduces the
  // original (e.g. A = 1, B = 11) the padding bits are switched to 0; the
  // padding is always deleted in the embedding, so either choice works.
  const BitString original = s.substr(p.offset, p.length());
  for (bool pad_bit : {true, false}) {
    BitString out = repeat(p.outer, p.before - 1);
    out.append(p.inner);
    out.append(p.outer);
    out.append(p.inner);
    out.append_run(pad_bit, p.outer.size() - p.inner.size());
    out.append(repeat(p.outer, p.after - 1));
    if (out != original) return out;
  }
  return original;  // unreachable: the two paddings differ
}

inline BitString replacement(const BlockPairPattern& p, const BitString& s) {
  // X^{x-1} Y X Y^{y-1}. It equals the original exactly when XY = YX, i.e.
  // both blocks are powers of one primitive word w; then the whole block is
  // w^k and a deleted copy of X or Y deletes an aligned copy of w, so the
  // repeat witness D w^{k-1} applies.
  BitString out = repeat(p.first, p.first_copies - 1);
  out.append(p.second);
  out.append(p.first);
  out.append(repeat(p.second, p.second_copies - 1));
  const BitString original = s.substr(p.offset, p.length());
  if (out != original) return out;
  const BitString root = primitive_root(original);
  out = flip_first(root);
  out.append(repeat(root, original.size() / root.size() - 1));
  return out;
}

}  // namespace detail

/// True iff every trace fully deletes at least one copy inside the pattern.
inline bool condition_violated(const BitString& s,
                               std::span<const MaskedTrace> traces,
                               const NecPattern& pattern) {
  const auto g = std::visit(
      [&](const auto& p) { return detail::geometry(s, p); }, pattern);
  detail::require(detail::matches_at(s, g.offset, g.expected),
                  "declared pattern absent from s");
  for (const auto& t : traces) {
    detail::require(t.mask.size() == s.size(),
                    "mask length does not match source length");
    bool some_copy_gone = false;
    for (const auto& c : g.copies) {
      if (t.mask.deleted_in(c.begin, c.end) == c.end - c.begin) {
        some_copy_gone = true;
        break;
      }
    }
    if (!some_copy_gone) return false;
  }
  return true;
}

inline int condition_of(const NecPattern& pattern) noexcept {
  return static_cast<int>(pattern.index()) + 1;
}

/// The competing source of the same length built by the pattern's
/// replacement rule.
inline BitString nec_alternative(const BitString& s,
                                 const NecPattern& pattern) {
  return std::visit(
      [&](const auto& p) {
        const auto g = detail::geometry(s, p);
        detail::require(detail::matches_at(s, g.offset, g.expected),
                        "declared pattern absent from s");
        return detail::splice(s, g.offset, g.length,
                              detail::replacement(p, s));
      },
      pattern);
}

/// One violation per declared pattern whose condition fails on every trace.
/// Overlapping declarations are evaluated independently.
inline std::vector<NecViolation> detect_nec_violations(
    const BitString& s, std::span<const MaskedTrace> traces,
    std::span<const NecPattern> patterns) {
  std::vector<NecViolation> out;
  for (const auto& pattern : patterns) {
    if (!condition_violated(s, traces, pattern)) continue;
    out.push_back({condition_of(pattern), pattern, nec_alternative(s, pattern)});
  }
  return out;
}

/**
 * Patterns implied by the run structure of `s`: every run as a repeat of
 * one bit (condition 1), every length-1 run between two runs as a sandwich
 * (condition 2), and every pair of adjacent runs as a block pair
 * (condition 3).
 */
inline std::vector<NecPattern> run_patterns(const BitString& s) {
  std::vector<NecPattern> out;
  if (s.empty()) return out;
  const RunProfile profile = run_decompose(s);
  const auto offsets = run_offsets(profile);
  const std::size_t m = profile.run_count();
  auto unit = [&](std::size_t i) {
    return BitString(1, profile.bit_of_run(i));
  };
  for (std::size_t i = 0; i < m; ++i) {
    out.emplace_back(RepeatPattern{PatternSpan{offsets[i], 1,
                                               profile.lengths[i]}});
  }
  for (std::size_t i = 1; i + 1 < m; ++i) {
    if (profile.lengths[i] != 1) continue;
    out.emplace_back(SandwichPattern{offsets[i - 1], unit(i), unit(i - 1),
                                     profile.lengths[i - 1],
                                     profile.lengths[i + 1]});
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    out.emplace_back(BlockPairPattern{offsets[i], unit(i), unit(i + 1),
                                      profile.lengths[i],
                                      profile.lengths[i + 1]});
  }
  return out;
}

}  // namespace tracerec
