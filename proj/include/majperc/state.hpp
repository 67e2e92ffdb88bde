// Copyright 2026 The majperc Authors.
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
#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "majperc/common.hpp"

namespace majperc {

// Dense active/inactive flags over the vertices of a graph.
class ActivationState {
 public:
  ActivationState() = default;
  explicit ActivationState(std::size_t n_vertices, bool active = false)
      : size_(n_vertices),
        words_((n_vertices + 63) / 64, active ? ~std::uint64_t{0} : 0) {
    trim();
  }

  static ActivationState from_vertices(std::size_t n_vertices,
                                       std::span<const Vertex> active) {
    ActivationState s(n_vertices);
    for (Vertex v : active) s.set(v);
    return s;
  }

  std::size_t size() const { return size_; }

  bool test(std::size_t v) const {
    return (words_[v >> 6] >> (v & 63)) & 1U;
  }
  bool operator[](std::size_t v) const { return test(v); }

  void set(std::size_t v, bool active = true) {
    const std::uint64_t mask = std::uint64_t{1} << (v & 63);
    if (active)
      words_[v >> 6] |= mask;
    else
      words_[v >> 6] &= ~mask;
  }
  void reset(std::size_t v) { set(v, false); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool all() const { return count() == size_; }
  bool none() const { return count() == 0; }

  // True iff every active vertex of *this is active in other.
  bool is_subset_of(const ActivationState& other) const {
    if (other.size_ != size_) return false;
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }

  ActivationState complement() const {
    ActivationState s(*this);
    for (auto& w : s.words_) w = ~w;
    s.trim();
    return s;
  }

  std::vector<Vertex> active_vertices() const { return collect(true); }
  std::vector<Vertex> inactive_vertices() const { return collect(false); }

  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const ActivationState&,
                         const ActivationState&) = default;

 private:
  void trim() {
    if (size_ % 64 != 0 && !words_.empty())
      words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }

  std::vector<Vertex> collect(bool active) const {
    std::vector<Vertex> out;
    for (std::size_t v = 0; v < size_; ++v)
      if (test(v) == active) out.push_back(static_cast<Vertex>(v));
    return out;
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace majperc
