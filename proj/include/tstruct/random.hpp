#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "tstruct/complex.hpp"
#include "tstruct/errors.hpp"
#include "tstruct/matrix.hpp"
#include "tstruct/sheaf.hpp"
#include "tstruct/space.hpp"

namespace tstruct {

/// Deterministic random source: a seeded std::mt19937_64 (whose output
/// stream is pinned by the standard) with hand-rolled bounded draws, so the
/// same seed produces the same values on every platform and standard
/// library.  No std distribution objects are used anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  /// Uniform draw from [0, n).  Rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) {
      eng_();  // consume one value so streams stay aligned
      return 0;
    }
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % n;
  }

  /// Uniform draw from [lo, hi], both ends included.
  int in_range(int lo, int hi) {
    if (hi <= lo) {
      eng_();
      return lo;
    }
    return lo + int(below(std::uint64_t(hi - lo + 1)));
  }

 private:
  std::mt19937_64 eng_;
};

namespace detail {

template <class F>
Matrix<F> random_matrix(const F& field, int rows, int cols, Rng& rng) {
  Matrix<F> m(field, rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      m.at(i, j) = field.from_int(rng.in_range(-2, 2));
  return m;
}

/// Longest chain strictly between q and p (0 when p covers q).
inline int strict_gap(const SpaceModel& s, int q, int p) {
  int best = 0;
  for (int m = 0; m < s.n(); ++m)
    if (s.lt(q, m) && s.lt(m, p)) best = std::max(best, 1 + strict_gap(s, q, m));
  return best;
}

}  // namespace detail

/// A random sheaf with stalk dimensions in [0, max_stalk].  Cover-edge
/// transitions are drawn freely; longer transitions are composites along a
/// fixed intermediate point, so on spaces with unique chains (all the test
/// fixtures) the result always validates.  If validation still fails on a
/// more tangled poset, the draw falls back to a direct sum of
/// closure-constant sheaves, which is consistent on any space.
template <class F>
Sheaf<F> random_sheaf(SpacePtr space, F field, Rng& rng, int max_stalk) {
  const SpaceModel& s = *space;
  int n = s.n();
  std::vector<int> dims(size_t(n), 0);
  for (int p = 0; p < n; ++p) dims[size_t(p)] = rng.in_range(0, max_stalk);

  std::vector<std::pair<int, int>> pairs;  // (p, q) with q lt p
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (s.lt(q, p)) pairs.emplace_back(p, q);
  std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
    return detail::strict_gap(s, a.second, a.first) <
           detail::strict_gap(s, b.second, b.first);
  });

  std::map<std::pair<int, int>, Matrix<F>> rho;
  for (const auto& [p, q] : pairs) {
    int mid = -1;
    for (int m = 0; m < n; ++m)
      if (s.lt(q, m) && s.lt(m, p)) {
        mid = m;
        break;
      }
    if (mid < 0) {
      rho.emplace(std::make_pair(p, q),
                  detail::random_matrix(field, dims[size_t(q)],
                                        dims[size_t(p)], rng));
    } else {
      rho.emplace(std::make_pair(p, q),
                  rho.at({mid, q}).mul(rho.at({p, mid})));
    }
  }
  try {
    return Sheaf<F>(space, field, dims, std::move(rho));
  } catch (const ValidationError&) {
    auto acc = Sheaf<F>::zero(space, field);
    for (int p = 0; p < n; ++p) {
      int r = rng.in_range(0, 1);
      if (r > 0)
        acc = direct_sum<F>({acc, Sheaf<F>::closure_constant(space, field, p,
                                                             r)})
                  .sum;
    }
    return acc;
  }
}

struct RandomComplexParams {
  int min_deg = -2;
  int max_deg = 2;
  int max_stalk = 3;
  int max_cones = 2;
};

/// A random bounded complex inside the degree window: a random sheaf placed
/// at a random degree, extended by up to max_cones mapping cones over random
/// chain maps from further single-sheaf complexes.  Differentials square to
/// zero by construction; the result is never the zero complex.
template <class F>
ChainComplex<F> random_complex(SpacePtr space, F field, Rng& rng,
                               const RandomComplexParams& params) {
  auto seed_sheaf = [&]() {
    for (int tries = 0; tries < 5; ++tries) {
      auto f = random_sheaf(space, field, rng, params.max_stalk);
      if (f.total_dim() > 0) return f;
    }
    return Sheaf<F>::closure_constant(space, field, 0);
  };
  auto base = [&]() {
    return ChainComplex<F>::from_sheaf(
        seed_sheaf(), rng.in_range(params.min_deg, params.max_deg));
  };
  ChainComplex<F> cur = base();
  int rounds = rng.in_range(0, params.max_cones);
  for (int i = 0; i < rounds; ++i) {
    auto extra = ChainComplex<F>::from_sheaf(
        seed_sheaf(), rng.in_range(params.min_deg + 1, params.max_deg));
    auto basis = chain_map_basis(extra, cur);
    ChainMap<F> f = ChainMap<F>::zero(extra, cur);
    if (!basis.empty()) {
      f = basis[size_t(rng.below(basis.size()))];
      if (basis.size() >= 2 && rng.in_range(0, 1) == 1)
        f = f.add(basis[size_t(rng.below(basis.size()))]);
      if (rng.in_range(0, 1) == 1) f = f.neg();
    }
    auto next = cone(f).cone.trim();
    if (next.total_dim() > 0) cur = next;
  }
  return cur;
}

}  // namespace tstruct
