#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "tstruct/complex.hpp"
#include "tstruct/derived.hpp"
#include "tstruct/errors.hpp"
#include "tstruct/support.hpp"

namespace tstruct {

namespace detail {

inline void require_t_datum(const SupportDatum& phi) {
  if (!phi.is_monotone())
    throw MonotonicityError(
        "support datum is not monotone, so it defines no t-structure");
}

}  // namespace detail

/// Whether every cohomology sheaf of m in degree k is supported inside the
/// datum's level set at k - n.  This is the lower aisle D^{<=n}.
template <class F>
bool in_leq(const ChainComplex<F>& m, const SupportDatum& phi, int n) {
  detail::require_t_datum(phi);
  require_same_space(*m.space(), *phi.space(), "aisle membership");
  for (int k = m.lo(); k <= m.hi(); ++k) {
    auto h = m.cohomology_sheaf(k);
    if (!h.support().subset_of(phi.level_points(k - n))) return false;
  }
  return true;
}

/// Whether the derived sections with support in each level set Phi^k sit in
/// degrees >= k + n.  This is the upper aisle D^{>=n}.  Levels below min_p
/// repeat the full space, levels above max_p are empty: checking the datum's
/// own value range covers every case.
template <class F>
bool in_geq(const ChainComplex<F>& m, const SupportDatum& phi, int n) {
  detail::require_t_datum(phi);
  require_same_space(*m.space(), *phi.space(), "aisle membership");
  if (m.total_dim() == 0) return true;
  auto rep = injective_replacement(m);
  for (int k = phi.min_p(); k <= phi.max_p(); ++k) {
    auto w = phi.level_points(k);
    if (w.count() == 0) continue;
    auto rg = gamma_w_subcomplex(rep.complex, w).complex;
    int top = std::min(rg.hi(), k + n - 1);
    for (int j = rg.lo(); j <= top; ++j)
      if (rg.cohomology_sheaf(j).total_dim() != 0) return false;
  }
  return true;
}

/// The two halves of a truncation triangle lt -> m -> geq, with lt in
/// D^{<=n-1} and geq in D^{>=n}, together with the maps from m and back.
template <class F>
struct TruncationPieces {
  ChainComplex<F> lt;
  ChainComplex<F> geq;
  ChainMap<F> to_geq;    // m -> geq
  ChainMap<F> from_lt;   // lt -> m
};

/// Truncation for the t-structure attached to a monotone support datum.
///
/// Working up through the datum's levels k, the current complex is cut at
/// each level: sections supported in the level set, in degrees <= k + n - 1,
/// are split off.  The full level (k at the datum's minimum) reduces to the
/// standard truncation of the current complex; proper levels take sections
/// inside an injective replacement, so the quotient computes derived
/// functors correctly.  Each quotient is formed afresh from a new
/// replacement because a quotient of injective terms need not stay
/// injective.  The lower piece is the shifted cone over m -> geq, and both
/// pieces are re-certified against the aisles before returning.
template <class F>
TruncationPieces<F> truncate_t(const ChainComplex<F>& m,
                               const SupportDatum& phi, int n) {
  detail::require_t_datum(phi);
  require_same_space(*m.space(), *phi.space(), "truncation");
  ChainComplex<F> cur = m;
  ChainMap<F> to_geq = ChainMap<F>::identity(m);
  for (int k = phi.min_p(); k <= phi.max_p(); ++k) {
    auto w = phi.level_points(k);
    if (w.count() == 0) continue;
    if (cur.total_dim() == 0) break;
    int cutoff = k + n - 1;
    if (w.is_full()) {
      auto tl = tau_leq(cur, cutoff);
      if (tl.complex.total_dim() == 0) continue;
      auto q = quotient_by_subcomplex(cur, tl.inclusion);
      to_geq = q.projection.after(to_geq);
      cur = q.complex;
    } else {
      auto rep = injective_replacement(cur);
      auto gw = gamma_w_subcomplex(rep.complex, w);
      auto tl = tau_leq(gw.complex, cutoff);
      if (tl.complex.total_dim() == 0) continue;
      auto inc = gw.inclusion.after(tl.inclusion);
      auto q = quotient_by_subcomplex(rep.complex, inc);
      to_geq = q.projection.after(rep.qis).after(to_geq);
      cur = q.complex;
    }
  }
  auto cr = cone(to_geq);
  ChainComplex<F> lt = cr.cone.shift(-1);
  ChainMap<F> from_lt = cr.to_shifted_src.shift(-1);
  if (!in_leq(lt, phi, n - 1))
    throw CertificateFailure("lower truncation piece escapes its aisle");
  if (!in_geq(cur, phi, n))
    throw CertificateFailure("upper truncation piece escapes its aisle");
  return {std::move(lt), std::move(cur), std::move(to_geq),
          std::move(from_lt)};
}

/// The k-th cohomology object of m for the datum's t-structure, computed as
/// the upper piece at k of the lower piece at k + 1.
template <class F>
ChainComplex<F> heart_piece(const ChainComplex<F>& m, const SupportDatum& phi,
                            int k) {
  auto upper = truncate_t(m, phi, k + 1);
  return truncate_t(upper.lt, phi, k).geq;
}

}  // namespace tstruct
