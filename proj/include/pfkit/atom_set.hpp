#pragma once

/**
 * @file atom_set.hpp
 * @brief Fixed-universe bitset over atom indices [0, size).
 *
 * Storage is inline for up to 128 atoms. Bits at positions >= size are
 * always zero, so word-wise equality and hashing are exact.
 */

#include <boost/container/small_vector.hpp>

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace pfkit {

class AtomSet {
  using Words = boost::container::small_vector<std::uint64_t, 2>;

public:
  AtomSet() = default;
  explicit AtomSet(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}
  AtomSet(std::size_t size, std::initializer_list<std::size_t> members) : AtomSet(size) {
    for (auto m : members) insert(m);
  }

  static AtomSet full(std::size_t size) {
    AtomSet s(size);
    for (auto& w : s.words_) w = ~std::uint64_t{0};
    s.trim();
    return s;
  }

  /// Set whose bits are the low `size` bits of `mask` (size <= 64).
  static AtomSet from_mask(std::size_t size, std::uint64_t mask) {
    if (size > 64) throw std::out_of_range("AtomSet::from_mask supports at most 64 atoms");
    AtomSet s(size);
    if (size > 0) s.words_[0] = mask;
    s.trim();
    return s;
  }

  [[nodiscard]] std::size_t size() const noexcept { return size_; }

  [[nodiscard]] bool contains(std::size_t i) const {
    check(i);
    return (words_[i / 64] >> (i % 64)) & 1U;
  }
  void insert(std::size_t i) {
    check(i);
    words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  void erase(std::size_t i) {
    check(i);
    words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
  }

  [[nodiscard]] std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  [[nodiscard]] bool empty() const noexcept {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  [[nodiscard]] bool is_subset_of(const AtomSet& o) const {
    same_size(o);
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & ~o.words_[k]) return false;
    return true;
  }
  [[nodiscard]] bool intersects(const AtomSet& o) const {
    same_size(o);
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & o.words_[k]) return true;
    return false;
  }

  AtomSet& operator&=(const AtomSet& o) {
    same_size(o);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
    return *this;
  }
  AtomSet& operator|=(const AtomSet& o) {
    same_size(o);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    return *this;
  }
  AtomSet& operator^=(const AtomSet& o) {
    same_size(o);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] ^= o.words_[k];
    return *this;
  }
  AtomSet& operator-=(const AtomSet& o) {
    same_size(o);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
    return *this;
  }
  friend AtomSet operator&(AtomSet a, const AtomSet& b) { return a &= b; }
  friend AtomSet operator|(AtomSet a, const AtomSet& b) { return a |= b; }
  friend AtomSet operator^(AtomSet a, const AtomSet& b) { return a ^= b; }
  friend AtomSet operator-(AtomSet a, const AtomSet& b) { return a -= b; }

  [[nodiscard]] AtomSet complement() const {
    AtomSet s = *this;
    for (auto& w : s.words_) w = ~w;
    s.trim();
    return s;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      auto w = words_[k];
      while (w) {
        auto bit = static_cast<std::size_t>(std::countr_zero(w));
        f(k * 64 + bit);
        w &= w - 1;
      }
    }
  }

  [[nodiscard]] std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  [[nodiscard]] std::uint64_t low_word() const noexcept { return words_.empty() ? 0 : words_[0]; }

  friend bool operator==(const AtomSet& a, const AtomSet& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }
  // Lexicographic on words; only meaningful for equal sizes.
  friend bool operator<(const AtomSet& a, const AtomSet& b) {
    if (a.size_ != b.size_) return a.size_ < b.size_;
    for (std::size_t k = a.words_.size(); k-- > 0;)
      if (a.words_[k] != b.words_[k]) return a.words_[k] < b.words_[k];
    return false;
  }

  [[nodiscard]] std::size_t hash() const noexcept {
    std::size_t h = std::hash<std::size_t>{}(size_);
    for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

private:
  void check(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("atom index out of range");
  }
  void same_size(const AtomSet& o) const {
    if (o.size_ != size_) throw std::invalid_argument("AtomSet size mismatch");
  }
  void trim() {
    if (size_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }

  std::size_t size_ = 0;
  Words words_;
};

} // namespace pfkit

template <>
struct std::hash<pfkit::AtomSet> {
  std::size_t operator()(const pfkit::AtomSet& s) const noexcept { return s.hash(); }
};
