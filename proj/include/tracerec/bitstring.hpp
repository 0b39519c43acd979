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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracerec/error.hpp"

namespace tracerec {

/**
 * A finite binary string packed 64 bits per word.
 *
 * Position 0 is the leftmost symbol (index 1 in the usual 1-based
 * notation). Bits past size() in the last word are always zero, which keeps
 * equality and popcount word-wise.
 */
class BitString {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitString() = default;
  explicit BitString(std::size_t n, bool fill = false)
      : words_(word_count(n), fill ? ~Word{0} : Word{0}), size_(n) {
    trim();
  }

  /// Parses ASCII '0'/'1' text. Anything else is rejected.
  static BitString from_string(std::string_view text) {
    BitString out;
    out.reserve(text.size());
    for (char ch : text) {
      if (ch != '0' && ch != '1') {
        throw Error("bit string literal may only contain '0' and '1'");
      }
      out.push_back(ch == '1');
    }
    return out;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::size_t i) const noexcept {
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
  }

  void set(std::size_t i, bool bit) noexcept {
    const Word mask = Word{1} << (i % kWordBits);
    if (bit) {
      words_[i / kWordBits] |= mask;
    } else {
      words_[i / kWordBits] &= ~mask;
    }
  }

  void reserve(std::size_t n) { words_.reserve(word_count(n)); }

  void push_back(bool bit) {
    if (size_ % kWordBits == 0) words_.push_back(0);
    if (bit) words_.back() |= Word{1} << (size_ % kWordBits);
    ++size_;
  }

  /// Appends `count` copies of `bit`.
  void append_run(bool bit, std::size_t count) {
    reserve(size_ + count);
    for (std::size_t k = 0; k < count; ++k) push_back(bit);
  }

  void append(const BitString& other) {
    reserve(size_ + other.size_);
    for (std::size_t i = 0; i < other.size_; ++i) push_back(other[i]);
  }

  BitString substr(std::size_t pos, std::size_t len) const {
    detail::require(pos <= size_ && len <= size_ - pos,
                    "substring out of range");
    BitString out;
    out.reserve(len);
    for (std::size_t i = pos; i < pos + len; ++i) out.push_back((*this)[i]);
    return out;
  }

  std::size_t count_ones() const noexcept {
    std::size_t total = 0;
    for (Word w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
  }
  std::size_t count_zeros() const noexcept { return size_ - count_ones(); }

  /// Number of maximal runs; 0 for the empty string.
  std::size_t run_count() const noexcept {
    if (size_ == 0) return 0;
    std::size_t transitions = 0;
    for_each_transition_word([&](std::size_t, Word diff) {
      transitions += static_cast<std::size_t>(std::popcount(diff));
    });
    return transitions + 1;
  }

  /**
   * Calls `fn(i)` for every i such that bit i differs from bit i+1, in
   * increasing order. Word-parallel: cost is O(n/64 + transitions).
   */
  template <typename Fn>
  void for_each_transition(Fn&& fn) const {
    for_each_transition_word([&](std::size_t base, Word diff) {
      while (diff != 0) {
        fn(base + static_cast<std::size_t>(std::countr_zero(diff)));
        diff &= diff - 1;
      }
    });
  }

  std::span<const Word> words() const noexcept { return words_; }

  std::string to_string() const {
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
      if ((*this)[i]) out[i] = '1';
    }
    return out;
  }

  friend bool operator==(const BitString& a, const BitString& b) noexcept {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

  /// Lexicographic order over symbols; a proper prefix sorts first.
  friend std::strong_ordering operator<=>(const BitString& a,
                                          const BitString& b) noexcept {
    const std::size_t common = std::min(a.size_, b.size_);
    for (std::size_t i = 0; i < common; ++i) {
      if (a[i] != b[i]) {
        return a[i] ? std::strong_ordering::greater
                    : std::strong_ordering::less;
      }
    }
    return a.size_ <=> b.size_;
  }

  friend std::ostream& operator<<(std::ostream& os, const BitString& s) {
    return os << s.to_string();
  }

 private:
  static std::size_t word_count(std::size_t n) noexcept {
    return (n + kWordBits - 1) / kWordBits;
  }

  void trim() noexcept {
    if (size_ % kWordBits != 0) {
      words_.back() &= (Word{1} << (size_ % kWordBits)) - 1;
    }
  }

  // diff bit j of word k is set iff symbol 64k+j differs from 64k+j+1.
  template <typename Fn>
  void for_each_transition_word(Fn&& fn) const {
    if (size_ < 2) return;
    const std::size_t last = size_ - 2;  // highest valid transition index
    const std::size_t nwords = words_.size();
    for (std::size_t k = 0; k * kWordBits <= last; ++k) {
      const Word next = (k + 1 < nwords) ? words_[k + 1] : Word{0};
      Word diff = words_[k] ^ ((words_[k] >> 1) | (next << 63));
      const std::size_t base = k * kWordBits;
      if (last - base < kWordBits - 1) {
        diff &= (Word{1} << (last - base + 1)) - 1;
      }
      fn(base, diff);
    }
  }

  std::vector<Word> words_;
  std::size_t size_ = 0;
};

namespace literals {
inline BitString operator""_bits(const char* text, std::size_t len) {
  return BitString::from_string(std::string_view(text, len));
}
}  // namespace literals

/// True iff `t` can be obtained from `x` by deleting symbols.
inline bool is_subsequence(const BitString& t, const BitString& x) noexcept {
  if (t.size() > x.size()) return false;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < x.size() && matched < t.size(); ++i) {
    if (x[i] == t[matched]) ++matched;
  }
  return matched == t.size();
}

}  // namespace tracerec
