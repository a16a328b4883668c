#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <vector>

namespace boxtopos {

// Fixed-width dynamic bitset. Used for upper sets and frame opens, where the
// carrier can outgrow one machine word; Boolean-algebra elements stay in a
// plain uint64_t mask (atom counts are capped at 64).
class DynBitset {
public:
  DynBitset() = default;
  explicit DynBitset(std::size_t nbits)
      : nbits_(nbits), blocks_((nbits + 63) / 64, 0) {}

  std::size_t size() const { return nbits_; }

  bool test(std::size_t i) const {
    return (blocks_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i) { blocks_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) {
    blocks_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : blocks_) n += std::popcount(b);
    return n;
  }
  bool none() const {
    for (auto b : blocks_)
      if (b) return false;
    return true;
  }
  bool any() const { return !none(); }

  DynBitset& operator|=(const DynBitset& o) {
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] |= o.blocks_[i];
    return *this;
  }
  DynBitset& operator&=(const DynBitset& o) {
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] &= o.blocks_[i];
    return *this;
  }
  friend DynBitset operator|(DynBitset a, const DynBitset& b) { return a |= b; }
  friend DynBitset operator&(DynBitset a, const DynBitset& b) { return a &= b; }

  bool subset_of(const DynBitset& o) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i] & ~o.blocks_[i]) return false;
    return true;
  }
  bool intersects(const DynBitset& o) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i] & o.blocks_[i]) return true;
    return false;
  }

  DynBitset complement() const {
    DynBitset r(nbits_);
    for (std::size_t i = 0; i < blocks_.size(); ++i) r.blocks_[i] = ~blocks_[i];
    r.trim();
    return r;
  }

  static DynBitset full(std::size_t nbits) {
    return DynBitset(nbits).complement();
  }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nbits_; ++i)
      if (test(i)) out.push_back(i);
    return out;
  }

  bool operator==(const DynBitset& o) const {
    return nbits_ == o.nbits_ && blocks_ == o.blocks_;
  }

  // Ascending as little-endian integers: empty set first, full set last.
  std::strong_ordering operator<=>(const DynBitset& o) const {
    if (auto c = nbits_ <=> o.nbits_; c != 0) return c;
    for (std::size_t i = blocks_.size(); i-- > 0;)
      if (auto c = blocks_[i] <=> o.blocks_[i]; c != 0) return c;
    return std::strong_ordering::equal;
  }

private:
  void trim() {
    if (nbits_ & 63) blocks_.back() &= (std::uint64_t{1} << (nbits_ & 63)) - 1;
  }

  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> blocks_;
};

}  // namespace boxtopos
