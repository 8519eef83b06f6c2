#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <iterator>

namespace admg {

/// Index of a vertex inside a graph's universe.
using VertexId = int;

inline constexpr int kMaxVertices = 64;

/// Bit-set over vertex indices of one universe.  Iteration yields indices in
/// ascending order, which is also label order (see Universe).
class VertexSet {
 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = VertexId;
    using difference_type = std::ptrdiff_t;
    using pointer = const VertexId*;
    using reference = VertexId;

    iterator() = default;
    explicit iterator(std::uint64_t rest) : rest_(rest) {}
    VertexId operator*() const { return std::countr_zero(rest_); }
    iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    bool operator==(const iterator&) const = default;

   private:
    std::uint64_t rest_ = 0;
  };

  constexpr VertexSet() = default;
  constexpr explicit VertexSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr VertexSet single(VertexId v) { return VertexSet(std::uint64_t{1} << v); }
  /// {0, ..., n-1}
  static constexpr VertexSet first_n(int n) {
    return VertexSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  int size() const { return std::popcount(bits_); }
  constexpr bool contains(VertexId v) const { return (bits_ >> v) & 1U; }
  constexpr bool contains(VertexSet other) const { return (other.bits_ & ~bits_) == 0; }
  constexpr bool intersects(VertexSet other) const { return (bits_ & other.bits_) != 0; }
  VertexId first() const { return std::countr_zero(bits_); }

  constexpr void insert(VertexId v) { bits_ |= std::uint64_t{1} << v; }
  constexpr void erase(VertexId v) { bits_ &= ~(std::uint64_t{1} << v); }

  iterator begin() const { return iterator(bits_); }
  iterator end() const { return iterator(0); }

  friend constexpr VertexSet operator|(VertexSet a, VertexSet b) { return VertexSet(a.bits_ | b.bits_); }
  friend constexpr VertexSet operator&(VertexSet a, VertexSet b) { return VertexSet(a.bits_ & b.bits_); }
  /// Set difference.
  friend constexpr VertexSet operator-(VertexSet a, VertexSet b) { return VertexSet(a.bits_ & ~b.bits_); }
  VertexSet& operator|=(VertexSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  VertexSet& operator&=(VertexSet o) {
    bits_ &= o.bits_;
    return *this;
  }
  VertexSet& operator-=(VertexSet o) {
    bits_ &= ~o.bits_;
    return *this;
  }
  friend constexpr bool operator==(VertexSet, VertexSet) = default;
  friend constexpr auto operator<=>(VertexSet a, VertexSet b) { return a.bits_ <=> b.bits_; }

 private:
  std::uint64_t bits_ = 0;
};

/// Binary values on a set of vertices: `ones` holds the vertices set to 1,
/// everything else in `domain` is 0.
struct Assignment {
  VertexSet domain;
  VertexSet ones;

  int value(VertexId v) const { return ones.contains(v) ? 1 : 0; }
  Assignment restricted(VertexSet to) const { return {domain & to, ones & to}; }
  /// Values of `other` override ours on the overlap.
  Assignment merged(const Assignment& other) const {
    return {domain | other.domain, (ones - other.domain) | other.ones};
  }
  void set(VertexId v, int value) {
    domain.insert(v);
    if (value != 0) {
      ones.insert(v);
    } else {
      ones.erase(v);
    }
  }
  /// nu^{-1}(0) restricted to `within`.
  VertexSet zeros(VertexSet within) const { return (domain & within) - ones; }
  bool operator==(const Assignment&) const = default;
};

/// Packs the values of `vars` (in ascending index order) into an integer,
/// lowest index in the lowest bit.
inline std::uint64_t pack(VertexSet vars, VertexSet ones) {
  std::uint64_t out = 0;
  int bit = 0;
  for (VertexId v : vars) {
    if (ones.contains(v)) out |= std::uint64_t{1} << bit;
    ++bit;
  }
  return out;
}

/// Inverse of pack: the subset of `vars` whose bits are set in `code`.
inline VertexSet unpack(VertexSet vars, std::uint64_t code) {
  VertexSet out;
  int bit = 0;
  for (VertexId v : vars) {
    if ((code >> bit) & 1U) out.insert(v);
    ++bit;
  }
  return out;
}

}  // namespace admg

template <>
struct std::hash<admg::VertexSet> {
  std::size_t operator()(admg::VertexSet s) const noexcept { return std::hash<std::uint64_t>{}(s.bits()); }
};
