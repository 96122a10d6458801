#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace tstruct {

/// Set of point indices of a fixed-size space, stored as a bitset.
/// Value semantics; all binary ops require equal universe sizes.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(int universe) : n_(universe), bits_((universe + 63) / 64, 0) {}
  PointSet(int universe, std::initializer_list<int> pts) : PointSet(universe) {
    for (int p : pts) add(p);
  }

  static PointSet full(int universe) {
    PointSet s(universe);
    for (int i = 0; i < universe; ++i) s.add(i);
    return s;
  }

  int universe() const { return n_; }
  bool contains(int p) const { return (bits_[p >> 6] >> (p & 63)) & 1u; }
  void add(int p) { bits_[p >> 6] |= uint64_t(1) << (p & 63); }
  void remove(int p) { bits_[p >> 6] &= ~(uint64_t(1) << (p & 63)); }

  int count() const {
    int c = 0;
    for (uint64_t w : bits_) c += __builtin_popcountll(w);
    return c;
  }
  bool empty() const {
    for (uint64_t w : bits_)
      if (w) return false;
    return true;
  }
  bool is_full() const { return count() == n_; }

  PointSet operator|(const PointSet& o) const {
    PointSet r = *this;
    for (size_t i = 0; i < bits_.size(); ++i) r.bits_[i] |= o.bits_[i];
    return r;
  }
  PointSet operator&(const PointSet& o) const {
    PointSet r = *this;
    for (size_t i = 0; i < bits_.size(); ++i) r.bits_[i] &= o.bits_[i];
    return r;
  }
  /// Set difference (this minus o).
  PointSet operator-(const PointSet& o) const {
    PointSet r = *this;
    for (size_t i = 0; i < bits_.size(); ++i) r.bits_[i] &= ~o.bits_[i];
    return r;
  }
  PointSet complement() const { return full(n_) - *this; }

  bool subset_of(const PointSet& o) const {
    for (size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] & ~o.bits_[i]) return false;
    return true;
  }
  bool operator==(const PointSet& o) const { return n_ == o.n_ && bits_ == o.bits_; }
  bool operator!=(const PointSet& o) const { return !(*this == o); }

  std::vector<int> points() const {
    std::vector<int> v;
    for (int i = 0; i < n_; ++i)
      if (contains(i)) v.push_back(i);
    return v;
  }

 private:
  int n_ = 0;
  std::vector<uint64_t> bits_;
};

}  // namespace tstruct
