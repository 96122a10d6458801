#pragma once

// Derived-category operations on bounded complexes of sheaves: termwise
// injective replacement, sections supported on a closed subset, derived
// global sections and hom complexes, pushforward along an open immersion,
// and restriction to open subspaces.

#include <algorithm>
#include <utility>
#include <vector>

#include "tstruct/complex.hpp"
#include "tstruct/errors.hpp"
#include "tstruct/matrix.hpp"
#include "tstruct/sheaf.hpp"
#include "tstruct/space.hpp"

namespace tstruct {

/// A termwise injective complex together with a quasi-isomorphism into it
/// whose components are injective on every stalk.
template <class F>
struct InjectiveReplacement {
  ChainComplex<F> complex;
  ChainMap<F> qis;
};

namespace detail {

/// Replacement of a one-term complex: its minimal injective resolution,
/// shifted to start in the same degree.
template <class F>
InjectiveReplacement<F> replace_single(const ChainComplex<F>& m) {
  int deg = m.lo();
  auto res = injective_resolution(m.term(deg));
  ChainComplex<F> j(deg, res.terms, res.maps);
  ChainMap<F> q(m, j, deg, {res.augmentation});
  return {std::move(j), std::move(q)};
}

template <class F>
InjectiveReplacement<F> replace_rec(const ChainComplex<F>& m) {
  int a = m.lo();
  if (m.hi() <= a) return replace_single(m);

  // Split off the bottom term A = m^a and recurse on the tail B: m is the
  // cone of the map A[-1] -> B given by the bottom differential, so a
  // replacement of m is the cone of that map lifted to the replacements.
  auto ca = ChainComplex<F>::from_sheaf(m.term(a), a);
  std::vector<Sheaf<F>> bt;
  std::vector<Morphism<F>> bd;
  for (int k = a + 1; k <= m.hi(); ++k) bt.push_back(m.term(k));
  for (int k = a + 1; k < m.hi(); ++k) bd.push_back(m.diff(k));
  ChainComplex<F> cb(a + 1, std::move(bt), std::move(bd));
  auto ra = replace_single(ca);
  auto rb = replace_rec(cb);

  ChainMap<F> psi(ca.shift(-1), cb, a + 1, {m.diff(a)});
  auto lifted = extend_chain_map(ra.qis.shift(-1), rb.qis.after(psi));
  auto cr = cone(lifted);

  // Degree k of the cone is ra^k (+) rb^k; route m through the two legs.
  std::vector<Morphism<F>> comps;
  auto bottom = direct_sum<F>({ra.complex.term(a), rb.complex.term(a)});
  comps.push_back(bottom.injections[0].after(ra.qis.at(a)));
  for (int k = a + 1; k <= m.hi(); ++k)
    comps.push_back(cr.from_dst.at(k).after(rb.qis.at(k)));
  ChainMap<F> q(m, cr.cone, a, std::move(comps));
  return {std::move(cr.cone), std::move(q)};
}

}  // namespace detail

/// A termwise injective complex quasi-isomorphic to `m`. Term sizes are the
/// sums of the minimal resolution sizes of the input terms; the certificate
/// that the replacement map is a quasi-isomorphism is re-checked here.
template <class F>
InjectiveReplacement<F> injective_replacement(const ChainComplex<F>& m) {
  if (m.total_dim() == 0) return {m, ChainMap<F>::identity(m)};
  auto rep = detail::replace_rec(m);
  if (!is_quasi_iso(rep.qis))
    throw InvariantError("injective replacement is not a quasi-isomorphism");
  return rep;
}

/// The termwise subcomplex of sections supported on the closed set `w`,
/// with its inclusion into `c`. Computes the derived functor when `c` is
/// termwise injective.
template <class F>
SubcomplexResult<F> gamma_w_subcomplex(const ChainComplex<F>& c,
                                       const PointSet& w) {
  if (!c.space()->is_closed(w)) throw NotClosed("support set is not closed");
  std::vector<SubsheafPair<F>> subs;
  for (int k = c.lo(); k <= c.hi(); ++k)
    subs.push_back(sections_with_support(c.term(k), w));
  return subcomplex_from_termwise(c, std::move(subs));
}

/// Derived sections supported on the closed set `w`: replace injectively,
/// then take the supported subcomplex.
template <class F>
ChainComplex<F> r_gamma(const ChainComplex<F>& m, const PointSet& w) {
  auto rep = injective_replacement(m);
  return gamma_w_subcomplex(rep.complex, w).complex;
}

/// The complex of maps from `a` into a termwise injective replacement J of
/// `b`: degree n holds the sum over k of Hom(a^k, J^(k+n)), with
/// differential D(f) = d_J o f - (-1)^n f o d_a. Its degree-n cohomology is
/// the space of degree-n maps a -> b in the derived sense.
template <class F>
VectComplex<F> rhom(const ChainComplex<F>& a, const ChainComplex<F>& b) {
  require_same_space(*a.space(), *b.space(), "hom complex");
  if (!(a.field() == b.field()))
    throw ValidationError("hom complex between different fields");
  const auto& field = a.field();
  auto j = injective_replacement(b).complex;
  if (a.total_dim() == 0 || j.total_dim() == 0)
    return VectComplex<F>(field, 0, {}, {});
  int npts = a.space()->n();
  int lo = j.lo() - a.hi();
  int hi = j.hi() - a.lo();
  int span = hi - lo + 1;

  auto flatten = [&](const Morphism<F>& g) {
    int len = 0;
    for (int p = 0; p < npts; ++p) len += g.dst().dim(p) * g.src().dim(p);
    Matrix<F> col(field, len, 1);
    int r = 0;
    for (int p = 0; p < npts; ++p) {
      auto mat = g.at(p);
      for (int i = 0; i < mat.rows(); ++i)
        for (int t = 0; t < mat.cols(); ++t) col.at(r++, 0) = mat.at(i, t);
    }
    return col;
  };

  // Per degree n, the blocks k in [kmin, kmax], a basis of each hom space,
  // the same basis as a flattened matrix, and the block offsets.
  std::vector<int> kmin(span), kmax(span), dims(span, 0);
  std::vector<std::vector<std::vector<Morphism<F>>>> bases(span);
  std::vector<std::vector<Matrix<F>>> bmats(span);
  std::vector<std::vector<int>> offs(span);
  for (int n = lo; n <= hi; ++n) {
    int i = n - lo;
    kmin[i] = std::max(a.lo(), j.lo() - n);
    kmax[i] = std::min(a.hi(), j.hi() - n);
    int off = 0;
    for (int k = kmin[i]; k <= kmax[i]; ++k) {
      offs[i].push_back(off);
      bases[i].push_back(hom_basis(a.term(k), j.term(k + n)));
      int len = 0;
      for (int p = 0; p < npts; ++p)
        len += j.term(k + n).dim(p) * a.term(k).dim(p);
      Matrix<F> bm(field, len, int(bases[i].back().size()));
      for (size_t c = 0; c < bases[i].back().size(); ++c) {
        auto col = flatten(bases[i].back()[c]);
        for (int r = 0; r < len; ++r) bm.at(r, int(c)) = col.at(r, 0);
      }
      bmats[i].push_back(std::move(bm));
      off += int(bases[i].back().size());
    }
    dims[i] = off;
  }

  // Write the coordinates of g in block (ni, k) into the column `dcol`.
  auto put_coords = [&](int ni, int k, const Morphism<F>& g, Matrix<F>& dcol) {
    if (k < kmin[ni] || k > kmax[ni]) {
      if (!g.is_zero()) throw InvariantError("hom block out of range");
      return;
    }
    int bi = k - kmin[ni];
    auto sol = bmats[ni][bi].solve_matrix(flatten(g));
    if (!sol) throw InvariantError("map does not lie in the hom space");
    for (int r = 0; r < sol->rows(); ++r)
      dcol.at(offs[ni][bi] + r, 0) = sol->at(r, 0);
  };

  std::vector<Matrix<F>> diffs;
  for (int n = lo; n < hi; ++n) {
    int i = n - lo;
    Matrix<F> d(field, dims[i + 1], dims[i]);
    for (int k = kmin[i]; k <= kmax[i]; ++k) {
      int bi = k - kmin[i];
      for (size_t t = 0; t < bases[i][bi].size(); ++t) {
        const auto& f = bases[i][bi][t];
        Matrix<F> dcol(field, dims[i + 1], 1);
        put_coords(i + 1, k, j.diff(k + n).after(f), dcol);
        auto tail = f.after(a.diff(k - 1));
        if (n % 2 == 0) tail = tail.neg();
        put_coords(i + 1, k - 1, tail, dcol);
        for (int r = 0; r < dims[i + 1]; ++r)
          d.at(r, offs[i][bi] + int(t)) = dcol.at(r, 0);
      }
    }
    diffs.push_back(std::move(d));
  }
  return VectComplex<F>(field, lo, std::move(dims), std::move(diffs));
}

/// Derived global sections: maps from the constant sheaf in degree zero.
template <class F>
VectComplex<F> r_sections(const ChainComplex<F>& m) {
  auto unit =
      ChainComplex<F>::from_sheaf(Sheaf<F>::constant(m.space(), m.field()), 0);
  return rhom(unit, m);
}

/// Derived pushforward along the open immersion `sub`: push a termwise
/// injective replacement forward term by term. The result lives on the
/// ambient space.
template <class F>
ChainComplex<F> r_pushforward(const OpenSubspace& sub,
                              const ChainComplex<F>& m) {
  require_same_space(*m.space(), *sub.space, "pushforward");
  auto rep = injective_replacement(m);
  const auto& j = rep.complex;
  if (j.hi() < j.lo())
    return ChainComplex<F>::zero_complex(sub.parent, m.field());
  std::vector<Sheaf<F>> terms;
  std::vector<Morphism<F>> diffs;
  for (int k = j.lo(); k <= j.hi(); ++k)
    terms.push_back(pushforward_sheaf(sub, j.term(k)));
  for (int k = j.lo(); k < j.hi(); ++k)
    diffs.push_back(pushforward_morphism(sub, j.diff(k)));
  return ChainComplex<F>(j.lo(), std::move(terms), std::move(diffs));
}

/// Termwise restriction of a complex to an open subspace (exact, so no
/// replacement is involved).
template <class F>
ChainComplex<F> restrict_complex(const ChainComplex<F>& m,
                                 const OpenSubspace& sub) {
  if (m.hi() < m.lo())
    return ChainComplex<F>::zero_complex(sub.space, m.field());
  std::vector<Sheaf<F>> terms;
  std::vector<Morphism<F>> diffs;
  for (int k = m.lo(); k <= m.hi(); ++k)
    terms.push_back(restrict_sheaf(m.term(k), sub));
  for (int k = m.lo(); k < m.hi(); ++k)
    diffs.push_back(restrict_morphism(m.diff(k), sub));
  return ChainComplex<F>(m.lo(), std::move(terms), std::move(diffs));
}

}  // namespace tstruct
