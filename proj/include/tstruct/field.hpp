#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "tstruct/errors.hpp"

namespace tstruct {

/// Arithmetic in Z/pZ for a prime p chosen at runtime. Elements are the
/// canonical representatives 0..p-1 stored as uint32_t.
class PrimeField {
 public:
  using Elem = uint32_t;

  explicit PrimeField(uint32_t p) : p_(p) {
    if (p < 2) throw ValidationError("field characteristic must be prime");
    for (uint64_t d = 2; d * d <= p; ++d)
      if (p % d == 0)
        throw ValidationError("field characteristic " + std::to_string(p) +
                              " is not prime");
  }

  uint32_t characteristic() const { return p_; }
  Elem zero() const { return 0; }
  Elem one() const { return 1 % p_; }
  bool is_zero(Elem a) const { return a == 0; }

  Elem from_int(long long v) const {
    long long m = v % int64_t(p_);
    if (m < 0) m += p_;
    return Elem(m);
  }

  Elem add(Elem a, Elem b) const { return Elem((uint64_t(a) + b) % p_); }
  Elem sub(Elem a, Elem b) const { return Elem((uint64_t(a) + p_ - b) % p_); }
  Elem mul(Elem a, Elem b) const { return Elem(uint64_t(a) * b % p_); }
  Elem neg(Elem a) const { return a == 0 ? 0 : Elem(p_ - a); }

  Elem inv(Elem a) const {
    if (a == 0) throw InvariantError("inverse of zero");
    // Extended Euclid on (a, p).
    int64_t t = 0, newt = 1, r = int64_t(p_), newr = int64_t(a);
    while (newr != 0) {
      int64_t q = r / newr;
      t -= q * newt;
      std::swap(t, newt);
      r -= q * newr;
      std::swap(r, newr);
    }
    if (t < 0) t += p_;
    return Elem(t);
  }

  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

  std::string to_string(Elem a) const { return std::to_string(a); }

  bool operator==(const PrimeField& o) const { return p_ == o.p_; }
  bool operator!=(const PrimeField& o) const { return p_ != o.p_; }

 private:
  uint32_t p_;
};

/// Exact rational arithmetic with arbitrary-precision integers. No floating
/// point appears anywhere in the numeric stack.
class RationalField {
 public:
  using Elem = boost::multiprecision::cpp_rational;

  uint32_t characteristic() const { return 0; }
  Elem zero() const { return Elem(0); }
  Elem one() const { return Elem(1); }
  bool is_zero(const Elem& a) const { return a == 0; }

  Elem from_int(long long v) const { return Elem(v); }
  Elem from_string(const std::string& s) const { return Elem(s); }

  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem neg(const Elem& a) const { return -a; }

  Elem inv(const Elem& a) const {
    if (a == 0) throw InvariantError("inverse of zero");
    return 1 / a;
  }

  Elem div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }

  std::string to_string(const Elem& a) const { return a.str(); }

  bool operator==(const RationalField&) const { return true; }
  bool operator!=(const RationalField&) const { return false; }
};

}  // namespace tstruct
