// Copyright 2026 The qrem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QREM_BITSTRING_HPP
#define QREM_BITSTRING_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qrem/errors.hpp"

namespace qrem {

/// A strictly increasing list of distinct qubit indices selecting a
/// subgroup of bits out of an n-bit string.
class BitSubset {
 public:
  BitSubset() = default;

  static BitSubset of(std::vector<std::size_t> indices) {
    for (std::size_t i = 1; i < indices.size(); ++i) {
      if (indices[i] <= indices[i - 1]) {
        throw std::invalid_argument("BitSubset indices must be strictly increasing");
      }
    }
    if (indices.empty()) {
      throw std::invalid_argument("BitSubset must contain at least one index");
    }
    BitSubset subset;
    subset.indices_ = std::move(indices);
    return subset;
  }

  /// The identity subset (0, 1, ..., n-1).
  static BitSubset full(std::size_t n) {
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) {
      indices[i] = i;
    }
    return of(std::move(indices));
  }

  std::size_t size() const { return indices_.size(); }
  const std::vector<std::size_t> &indices() const { return indices_; }
  std::size_t operator[](std::size_t i) const { return indices_[i]; }

  void validate_for(std::size_t n) const {
    if (indices_.empty() || indices_.back() >= n) {
      throw std::invalid_argument("BitSubset index out of range for " + std::to_string(n) +
                                  " qubits");
    }
  }

  bool operator==(const BitSubset &other) const = default;

 private:
  std::vector<std::size_t> indices_;
};

/// Fixed-length binary outcome word. Bit 0 is the leftmost character of the
/// text form and qubit 0 of the calibration file; that convention is used
/// everywhere in the library. Bits are packed most-significant-first so that
/// comparing the packed words compares the text forms lexicographically.
class Bitstring {
 public:
  Bitstring() = default;

  explicit Bitstring(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static Bitstring zeros(std::size_t n) { return Bitstring(n); }

  static Bitstring ones(std::size_t n) {
    Bitstring b(n);
    for (auto &word : b.words_) {
      word = ~std::uint64_t{0};
    }
    b.mask_tail();
    return b;
  }

  static Bitstring from_text(std::string_view text) {
    Bitstring b(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '1') {
        b.set_bit(i, 1);
      } else if (text[i] != '0') {
        throw ParseError("bitstring text may contain only '0' and '1'");
      }
    }
    return b;
  }

  /// Inverse of to_index for n <= 63: the text form read as a binary
  /// number, leftmost character most significant.
  static Bitstring from_index(std::uint64_t index, std::size_t n) {
    if (n == 0 || n > 63) {
      throw std::invalid_argument("from_index requires 1 <= n <= 63");
    }
    if (index >> n != 0) {
      throw std::invalid_argument("index out of range for bitstring length");
    }
    Bitstring b(n);
    b.words_[0] = index << (64 - n);
    return b;
  }

  std::size_t size() const { return n_; }

  int bit(std::size_t i) const {
    return static_cast<int>((words_[i >> 6] >> (63 - (i & 63))) & 1u);
  }

  void set_bit(std::size_t i, int value) {
    const std::uint64_t mask = std::uint64_t{1} << (63 - (i & 63));
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }

  void flip_bit(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (63 - (i & 63)); }

  std::uint64_t to_index() const {
    if (n_ == 0 || n_ > 63) {
      throw std::invalid_argument("to_index requires 1 <= n <= 63");
    }
    return words_[0] >> (64 - n_);
  }

  std::string to_text() const {
    std::string text(n_, '0');
    for (std::size_t i = 0; i < n_; ++i) {
      if (bit(i)) {
        text[i] = '1';
      }
    }
    return text;
  }

  /// The bits at the subset's indices, in subset order.
  Bitstring select(const BitSubset &subset) const {
    subset.validate_for(n_);
    Bitstring out(subset.size());
    for (std::size_t j = 0; j < subset.size(); ++j) {
      if (bit(subset[j])) {
        out.set_bit(j, 1);
      }
    }
    return out;
  }

  std::size_t count_ones() const {
    std::size_t total = 0;
    for (auto word : words_) {
      total += static_cast<std::size_t>(std::popcount(word));
    }
    return total;
  }

  bool all_zeros() const { return count_ones() == 0; }
  bool all_ones() const { return count_ones() == n_; }

  std::size_t hamming_distance(const Bitstring &other) const {
    std::size_t total = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      total += static_cast<std::size_t>(std::popcount(words_[w] ^ other.words_[w]));
    }
    return total;
  }

  /// Calls fn(i) for every index i with bit(i) == 1, in increasing order.
  template <class F>
  void for_each_one(F &&fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t word = words_[w];
      while (word != 0) {
        const int lead = std::countl_zero(word);
        fn(w * 64 + static_cast<std::size_t>(lead));
        word &= ~(std::uint64_t{1} << (63 - lead));
      }
    }
  }

  const std::vector<std::uint64_t> &words() const { return words_; }

  bool operator==(const Bitstring &other) const = default;

  bool operator<(const Bitstring &other) const {
    if (n_ != other.n_) {
      return n_ < other.n_;
    }
    return words_ < other.words_;
  }

 private:
  void mask_tail() {
    const std::size_t rem = n_ & 63;
    if (rem != 0 && !words_.empty()) {
      words_.back() &= ~std::uint64_t{0} << (64 - rem);
    }
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct BitstringHash {
  std::size_t operator()(const Bitstring &b) const {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ b.size();
    for (auto word : b.words()) {
      h ^= word;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace qrem

#endif
