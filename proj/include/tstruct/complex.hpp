#pragma once

#include <utility>
#include <vector>

#include "tstruct/errors.hpp"
#include "tstruct/matrix.hpp"
#include "tstruct/sheaf.hpp"

namespace tstruct {

/// A bounded complex of sheaves: terms in degrees lo..lo+size-1 and one
/// differential between each adjacent pair.  The constructor checks that
/// differentials connect adjacent terms and square to zero, so a constructed
/// ChainComplex is always a complex.  Accessors extend by zero sheaves and
/// zero morphisms outside the stored range.
template <class F>
class ChainComplex {
 public:
  ChainComplex(int lo, std::vector<Sheaf<F>> terms,
               std::vector<Morphism<F>> diffs)
      : lo_(lo),
        terms_(std::move(terms)),
        diffs_(std::move(diffs)),
        space_(terms_.empty()
                   ? throw ValidationError("use zero_complex when empty")
                   : terms_[0].space()),
        field_(terms_[0].field()) {
    if (diffs_.size() + 1 != terms_.size())
      throw ValidationError("complex needs one differential per adjacent pair");
    for (const auto& t : terms_) {
      require_same_space(*space_, *t.space(), "complex");
      if (!(field_ == t.field()))
        throw ValidationError("complex terms over different fields");
    }
    for (size_t i = 0; i < diffs_.size(); ++i)
      if (!(diffs_[i].src() == terms_[i]) || !(diffs_[i].dst() == terms_[i + 1]))
        throw ValidationError("differential endpoints do not match terms");
    for (size_t i = 0; i + 1 < diffs_.size(); ++i)
      if (!diffs_[i + 1].after(diffs_[i]).is_zero())
        throw ValidationError("differential does not square to zero");
  }

  static ChainComplex zero_complex(SpacePtr space, F field) {
    return ChainComplex(std::move(space), field, 0);
  }

  static ChainComplex from_sheaf(Sheaf<F> s, int degree) {
    return ChainComplex(degree, {std::move(s)}, {});
  }

  const SpacePtr& space() const { return space_; }
  const F& field() const { return field_; }
  int lo() const { return lo_; }
  /// One below lo() when the complex has no terms.
  int hi() const { return lo_ + int(terms_.size()) - 1; }

  Sheaf<F> term(int k) const {
    if (k < lo_ || k > hi()) return Sheaf<F>::zero(space_, field_);
    return terms_[k - lo_];
  }

  /// The differential term(k) -> term(k+1); zero outside the stored range.
  Morphism<F> diff(int k) const {
    if (k >= lo_ && k + 1 <= hi()) return diffs_[k - lo_];
    return Morphism<F>::zero(term(k), term(k + 1));
  }

  int total_dim() const {
    int t = 0;
    for (const auto& s : terms_) t += s.total_dim();
    return t;
  }

  /// Shift: term(k) of the result is term(k + s); odd shifts negate d.
  ChainComplex shift(int s) const {
    if (terms_.empty()) return *this;
    std::vector<Morphism<F>> d = diffs_;
    if (s % 2 != 0)
      for (auto& m : d) m = m.neg();
    return ChainComplex(lo_ - s, terms_, std::move(d));
  }

  /// Drops zero terms at both ends.
  ChainComplex trim() const {
    int a = lo_, b = hi();
    while (a <= b && term(a).total_dim() == 0) ++a;
    while (b >= a && term(b).total_dim() == 0) --b;
    if (a > b) return zero_complex(space_, field_);
    std::vector<Sheaf<F>> t(terms_.begin() + (a - lo_),
                            terms_.begin() + (b - lo_ + 1));
    std::vector<Morphism<F>> d(diffs_.begin() + (a - lo_),
                               diffs_.begin() + (b - lo_));
    return ChainComplex(a, std::move(t), std::move(d));
  }

  /// The cohomology sheaf ker d^k / im d^(k-1).
  Sheaf<F> cohomology_sheaf(int k) const {
    if (k < lo_ || k > hi()) return Sheaf<F>::zero(space_, field_);
    auto ker = kernel_subsheaf(diff(k));
    auto prev = diff(k - 1);
    // Express the image of the previous differential in kernel coordinates.
    std::vector<Matrix<F>> spans;
    for (int p = 0; p < space_->n(); ++p) {
      auto img = prev.at(p).column_space_basis();
      auto x = ker.inclusion.at(p).solve_matrix(img);
      if (!x) throw InvariantError("image does not lie in the kernel");
      spans.push_back(*x);
    }
    return quotient_by_stalk_spans(ker.sub, spans).quot;
  }

  bool operator==(const ChainComplex& o) const {
    return *space_ == *o.space_ && field_ == o.field_ && lo_ == o.lo_ &&
           terms_ == o.terms_ && diffs_ == o.diffs_;
  }
  bool operator!=(const ChainComplex& o) const { return !(*this == o); }

 private:
  ChainComplex(SpacePtr space, F field, int lo)
      : lo_(lo), space_(std::move(space)), field_(field) {}

  int lo_;
  std::vector<Sheaf<F>> terms_;
  std::vector<Morphism<F>> diffs_;
  SpacePtr space_;
  F field_;
};

template <class F>
bool is_exact(const ChainComplex<F>& c) {
  for (int k = c.lo(); k <= c.hi(); ++k)
    if (c.cohomology_sheaf(k).total_dim() != 0) return false;
  return true;
}

/// A map of complexes: one sheaf morphism per degree, commuting with the
/// differentials (checked on construction, with zero fills outside the
/// stored component range).
template <class F>
class ChainMap {
 public:
  ChainMap(ChainComplex<F> src, ChainComplex<F> dst, int lo,
           std::vector<Morphism<F>> comps)
      : src_(std::move(src)),
        dst_(std::move(dst)),
        lo_(lo),
        comps_(std::move(comps)) {
    require_same_space(*src_.space(), *dst_.space(), "chain map");
    if (!(src_.field() == dst_.field()))
      throw ValidationError("chain map between different fields");
    for (size_t i = 0; i < comps_.size(); ++i) {
      int k = lo_ + int(i);
      if (!(comps_[i].src() == src_.term(k)) ||
          !(comps_[i].dst() == dst_.term(k)))
        throw ValidationError("chain map component endpoints mismatch");
    }
    int a = std::min(src_.lo(), dst_.lo()) - 1;
    int b = std::max(src_.hi(), dst_.hi());
    for (int k = a; k <= b; ++k)
      if (!(at(k + 1).after(src_.diff(k)) == dst_.diff(k).after(at(k))))
        throw ValidationError("chain map does not commute with d");
  }

  static ChainMap identity(const ChainComplex<F>& c) {
    std::vector<Morphism<F>> comps;
    for (int k = c.lo(); k <= c.hi(); ++k)
      comps.push_back(Morphism<F>::identity(c.term(k)));
    return ChainMap(c, c, c.lo(), std::move(comps));
  }

  static ChainMap zero(const ChainComplex<F>& src,
                       const ChainComplex<F>& dst) {
    return ChainMap(src, dst, 0, {});
  }

  const ChainComplex<F>& src() const { return src_; }
  const ChainComplex<F>& dst() const { return dst_; }

  Morphism<F> at(int k) const {
    if (k >= lo_ && k < lo_ + int(comps_.size())) return comps_[k - lo_];
    return Morphism<F>::zero(src_.term(k), dst_.term(k));
  }

  /// this o f  (apply f first).
  ChainMap after(const ChainMap& f) const {
    if (!(f.dst_ == src_))
      throw ValidationError("chain map composition mismatch");
    int a = std::min(f.src_.lo(), dst_.lo());
    int b = std::max(f.src_.hi(), dst_.hi());
    std::vector<Morphism<F>> comps;
    for (int k = a; k <= b; ++k) comps.push_back(at(k).after(f.at(k)));
    return ChainMap(f.src_, dst_, a, std::move(comps));
  }

  ChainMap add(const ChainMap& o) const {
    if (!(src_ == o.src_) || !(dst_ == o.dst_))
      throw ValidationError("chain maps are not parallel");
    int a = std::min(lo_, o.lo_);
    int b = std::max(lo_ + int(comps_.size()), o.lo_ + int(o.comps_.size()));
    std::vector<Morphism<F>> comps;
    for (int k = a; k < b; ++k) comps.push_back(at(k).add(o.at(k)));
    return ChainMap(src_, dst_, a, std::move(comps));
  }
  ChainMap sub(const ChainMap& o) const { return add(o.neg()); }
  ChainMap neg() const {
    std::vector<Morphism<F>> comps;
    for (const auto& m : comps_) comps.push_back(m.neg());
    return ChainMap(src_, dst_, lo_, std::move(comps));
  }

  /// The same components viewed as a map between the shifted complexes.
  ChainMap shift(int s) const {
    std::vector<Morphism<F>> comps = comps_;
    return ChainMap(src_.shift(s), dst_.shift(s), lo_ - s, std::move(comps));
  }

  bool is_zero() const {
    for (const auto& m : comps_)
      if (!m.is_zero()) return false;
    return true;
  }

  bool operator==(const ChainMap& o) const {
    if (!(src_ == o.src_) || !(dst_ == o.dst_)) return false;
    int a = std::min(lo_, o.lo_);
    int b = std::max(lo_ + int(comps_.size()), o.lo_ + int(o.comps_.size()));
    for (int k = a; k < b; ++k)
      if (!(at(k) == o.at(k))) return false;
    return true;
  }
  bool operator!=(const ChainMap& o) const { return !(*this == o); }

 private:
  ChainComplex<F> src_;
  ChainComplex<F> dst_;
  int lo_;
  std::vector<Morphism<F>> comps_;
};

template <class F>
struct ConeResult {
  ChainComplex<F> cone;
  ChainMap<F> from_dst;        // dst -> cone
  ChainMap<F> to_shifted_src;  // cone -> src[1]
};

/// Mapping cone: term(n) = src(n+1) (+) dst(n) with differential
/// d(m, x) = (-d m, f m + d x).
template <class F>
ConeResult<F> cone(const ChainMap<F>& f) {
  const auto& src = f.src();
  const auto& dst = f.dst();
  const auto& space = src.space();
  const auto& field = src.field();
  int lo = std::min(src.lo() - 1, dst.lo());
  int hi = std::max(src.hi() - 1, dst.hi());
  if (src.total_dim() == 0 && dst.total_dim() == 0) {
    auto z = ChainComplex<F>::zero_complex(space, field);
    return {z, ChainMap<F>::zero(dst, z), ChainMap<F>::zero(z, src.shift(1))};
  }
  std::vector<SumPair<F>> sums;
  std::vector<Sheaf<F>> terms;
  for (int n = lo; n <= hi; ++n) {
    sums.push_back(direct_sum<F>({src.term(n + 1), dst.term(n)}));
    terms.push_back(sums.back().sum);
  }
  std::vector<Morphism<F>> diffs;
  for (int n = lo; n < hi; ++n) {
    const auto& here = sums[n - lo];
    const auto& next = sums[n - lo + 1];
    auto d = next.injections[0]
                 .after(src.diff(n + 1).neg())
                 .after(here.projections[0])
                 .add(next.injections[1].after(f.at(n + 1)).after(
                     here.projections[0]))
                 .add(next.injections[1].after(dst.diff(n)).after(
                     here.projections[1]));
    diffs.push_back(std::move(d));
  }
  ChainComplex<F> c(lo, std::move(terms), std::move(diffs));
  std::vector<Morphism<F>> in, out;
  for (int n = lo; n <= hi; ++n) {
    in.push_back(sums[n - lo].injections[1]);
    out.push_back(sums[n - lo].projections[0]);
  }
  ChainMap<F> from_dst(dst, c, lo, std::move(in));
  ChainMap<F> to_src(c, src.shift(1), lo, std::move(out));
  return {std::move(c), std::move(from_dst), std::move(to_src)};
}

/// f is a quasi-isomorphism iff its cone is exact.
template <class F>
bool is_quasi_iso(const ChainMap<F>& f) {
  return is_exact(cone(f).cone);
}

template <class F>
struct TruncationLeq {
  ChainComplex<F> complex;
  ChainMap<F> inclusion;  // tau_leq -> original
};

/// Standard truncation: degrees < n unchanged, ker d^n in degree n.
template <class F>
TruncationLeq<F> tau_leq(const ChainComplex<F>& c, int n) {
  if (n >= c.hi()) return {c, ChainMap<F>::identity(c)};
  if (n < c.lo()) {
    auto z = ChainComplex<F>::zero_complex(c.space(), c.field());
    return {z, ChainMap<F>::zero(z, c)};
  }
  auto ker = kernel_subsheaf(c.diff(n));
  std::vector<Sheaf<F>> terms;
  std::vector<Morphism<F>> diffs;
  std::vector<Morphism<F>> incl;
  for (int k = c.lo(); k < n; ++k) {
    terms.push_back(c.term(k));
    incl.push_back(Morphism<F>::identity(c.term(k)));
  }
  terms.push_back(ker.sub);
  incl.push_back(ker.inclusion);
  for (int k = c.lo(); k + 1 < n; ++k) diffs.push_back(c.diff(k));
  if (n > c.lo()) {
    // Factor d^(n-1) through the kernel.
    std::vector<Matrix<F>> mats;
    for (int p = 0; p < c.space()->n(); ++p) {
      auto x = ker.inclusion.at(p).solve_matrix(c.diff(n - 1).at(p));
      if (!x) throw InvariantError("d does not land in ker d");
      mats.push_back(*x);
    }
    diffs.push_back(
        Morphism<F>(c.term(n - 1), ker.sub, std::move(mats)));
  }
  ChainComplex<F> t(c.lo(), std::move(terms), std::move(diffs));
  ChainMap<F> inc(t, c, c.lo(), std::move(incl));
  return {std::move(t), std::move(inc)};
}

template <class F>
struct TruncationGeq {
  ChainComplex<F> complex;
  ChainMap<F> projection;  // original -> tau_geq
};

/// Standard truncation: degrees > n unchanged, coker d^(n-1) in degree n.
template <class F>
TruncationGeq<F> tau_geq(const ChainComplex<F>& c, int n) {
  if (n <= c.lo()) return {c, ChainMap<F>::identity(c)};
  if (n > c.hi()) {
    auto z = ChainComplex<F>::zero_complex(c.space(), c.field());
    return {z, ChainMap<F>::zero(c, z)};
  }
  auto cok = quotient_by_image(c.diff(n - 1));
  std::vector<Sheaf<F>> terms{cok.quot};
  std::vector<Morphism<F>> proj{cok.projection};
  std::vector<Morphism<F>> diffs;
  if (n < c.hi()) {
    // Factor d^n through the cokernel: dbar proj = d^n.
    std::vector<Matrix<F>> mats;
    for (int p = 0; p < c.space()->n(); ++p) {
      auto x = cok.projection.at(p).transpose().solve_matrix(
          c.diff(n).at(p).transpose());
      if (!x) throw InvariantError("d does not factor through coker d");
      mats.push_back(x->transpose());
    }
    diffs.push_back(Morphism<F>(cok.quot, c.term(n + 1), std::move(mats)));
  }
  for (int k = n + 1; k <= c.hi(); ++k) {
    terms.push_back(c.term(k));
    proj.push_back(Morphism<F>::identity(c.term(k)));
    if (k < c.hi()) diffs.push_back(c.diff(k));
  }
  ChainComplex<F> t(n, std::move(terms), std::move(diffs));
  ChainMap<F> pr(c, t, n, std::move(proj));
  return {std::move(t), std::move(pr)};
}

template <class F>
struct SubcomplexResult {
  ChainComplex<F> complex;
  ChainMap<F> inclusion;
};

/// Builds the subcomplex spanned degreewise by the given subsheaves of the
/// terms of c (aligned with degrees c.lo()..c.hi()).  The spans must be
/// carried into each other by the differentials.
template <class F>
SubcomplexResult<F> subcomplex_from_termwise(
    const ChainComplex<F>& c, const std::vector<SubsheafPair<F>>& subs) {
  if (int(subs.size()) != c.hi() - c.lo() + 1)
    throw ValidationError("need one subsheaf per degree");
  std::vector<Sheaf<F>> terms;
  std::vector<Morphism<F>> incl;
  for (const auto& s : subs) {
    terms.push_back(s.sub);
    incl.push_back(s.inclusion);
  }
  std::vector<Morphism<F>> diffs;
  for (int k = c.lo(); k < c.hi(); ++k) {
    std::vector<Matrix<F>> mats;
    for (int p = 0; p < c.space()->n(); ++p) {
      auto moved = c.diff(k).at(p).mul(incl[k - c.lo()].at(p));
      auto x = incl[k - c.lo() + 1].at(p).solve_matrix(moved);
      if (!x) throw InvariantError("spans do not form a subcomplex");
      mats.push_back(*x);
    }
    diffs.push_back(Morphism<F>(terms[k - c.lo()], terms[k - c.lo() + 1],
                                std::move(mats)));
  }
  ChainComplex<F> sub(c.lo(), std::move(terms), std::move(diffs));
  ChainMap<F> inc(sub, c, c.lo(), std::move(incl));
  return {std::move(sub), std::move(inc)};
}

template <class F>
struct QuotientComplexResult {
  ChainComplex<F> complex;
  ChainMap<F> projection;
};

/// Quotient of c by the image of a degreewise-injective chain map into it.
template <class F>
QuotientComplexResult<F> quotient_by_subcomplex(const ChainComplex<F>& c,
                                                const ChainMap<F>& inclusion) {
  if (!(inclusion.dst() == c))
    throw ValidationError("inclusion target mismatch");
  std::vector<Sheaf<F>> terms;
  std::vector<Morphism<F>> proj;
  for (int k = c.lo(); k <= c.hi(); ++k) {
    auto q = quotient_by_image(inclusion.at(k));
    terms.push_back(q.quot);
    proj.push_back(q.projection);
  }
  std::vector<Morphism<F>> diffs;
  for (int k = c.lo(); k < c.hi(); ++k) {
    std::vector<Matrix<F>> mats;
    for (int p = 0; p < c.space()->n(); ++p) {
      auto rhs = proj[k - c.lo() + 1].at(p).mul(c.diff(k).at(p)).transpose();
      auto x = proj[k - c.lo()].at(p).transpose().solve_matrix(rhs);
      if (!x) throw InvariantError("differential does not descend");
      mats.push_back(x->transpose());
    }
    diffs.push_back(Morphism<F>(terms[k - c.lo()], terms[k - c.lo() + 1],
                                std::move(mats)));
  }
  ChainComplex<F> quot(c.lo(), std::move(terms), std::move(diffs));
  ChainMap<F> pr(c, quot, c.lo(), std::move(proj));
  return {std::move(quot), std::move(pr)};
}

namespace detail {

/// Flattened variable layout and homogeneous constraints for chain maps
/// a -> b: one variable per component entry, one row per stalkwise
/// naturality condition and per commuting-square entry.
template <class F>
struct ChainMapSystem {
  int lo;
  int hi;
  int nvars;
  std::vector<std::vector<int>> off_by_deg;
  std::vector<int> deg_off;
  Matrix<F> constraints;
};

template <class F>
ChainMapSystem<F> chain_map_system(const ChainComplex<F>& a,
                                   const ChainComplex<F>& b) {
  require_same_space(*a.space(), *b.space(), "chain map space");
  const auto& field = a.field();
  int n = a.space()->n();
  int lo = std::min(a.lo(), b.lo());
  int hi = std::max(a.hi(), b.hi());
  if (lo > hi) return {lo, hi, 0, {}, {0}, Matrix<F>(field, 0, 0)};
  // Flattened variables: per degree, per point, entries of the component.
  std::vector<std::vector<int>> off_by_deg;
  std::vector<int> deg_off{0};
  for (int k = lo; k <= hi; ++k) {
    std::vector<int> rows, cols;
    for (int p = 0; p < n; ++p) {
      rows.push_back(b.term(k).dim(p));
      cols.push_back(a.term(k).dim(p));
    }
    auto off = flat_offsets(rows, cols);
    off_by_deg.push_back(off);
    deg_off.push_back(deg_off.back() + off[n]);
  }
  int nvars = deg_off.back();

  // Count rows: per-degree naturality + commuting squares.
  std::vector<Matrix<F>> nat;
  int nat_rows = 0;
  for (int k = lo; k <= hi; ++k) {
    nat.push_back(naturality_matrix(a.term(k), b.term(k), off_by_deg[k - lo]));
    nat_rows += nat.back().rows();
  }
  int sq_rows = 0;
  for (int k = lo; k < hi; ++k)
    for (int p = 0; p < n; ++p)
      sq_rows += b.term(k + 1).dim(p) * a.term(k).dim(p);

  Matrix<F> c(field, nat_rows + sq_rows, nvars);
  int row = 0;
  for (int k = lo; k <= hi; ++k) {
    const auto& m = nat[k - lo];
    for (int i = 0; i < m.rows(); ++i, ++row)
      for (int j = 0; j < m.cols(); ++j)
        c.at(row, deg_off[k - lo] + j) = m.at(i, j);
  }
  // Squares: (d_b f_k - f_(k+1) d_a)[i][j] = 0 at each point.
  for (int k = lo; k < hi; ++k)
    for (int p = 0; p < n; ++p) {
      auto db = b.diff(k).at(p);
      auto da = a.diff(k).at(p);
      int bk1 = b.term(k + 1).dim(p), ak = a.term(k).dim(p);
      int bk = b.term(k).dim(p), ak1 = a.term(k + 1).dim(p);
      const auto& offk = off_by_deg[k - lo];
      const auto& offk1 = off_by_deg[k - lo + 1];
      for (int i = 0; i < bk1; ++i)
        for (int j = 0; j < ak; ++j) {
          for (int t = 0; t < bk; ++t) {
            int col = deg_off[k - lo] + offk[p] + t * ak + j;
            c.at(row, col) = field.add(c.at(row, col), db.at(i, t));
          }
          for (int l = 0; l < ak1; ++l) {
            int col = deg_off[k - lo + 1] + offk1[p] + i * ak1 + l;
            c.at(row, col) = field.sub(c.at(row, col), da.at(l, j));
          }
          ++row;
        }
    }
  return {lo, hi, nvars, std::move(off_by_deg), std::move(deg_off),
          std::move(c)};
}

/// Reassemble a chain map from one flat coordinate column of the system.
template <class F>
ChainMap<F> chain_map_from_column(const ChainComplex<F>& a,
                                  const ChainComplex<F>& b,
                                  const ChainMapSystem<F>& sys,
                                  const Matrix<F>& col) {
  int n = a.space()->n();
  std::vector<Morphism<F>> comps;
  for (int k = sys.lo; k <= sys.hi; ++k) {
    Matrix<F> part(a.field(), sys.off_by_deg[k - sys.lo][n], 1);
    for (int r = 0; r < part.rows(); ++r)
      part.at(r, 0) = col.at(sys.deg_off[k - sys.lo] + r, 0);
    comps.push_back(
        unflatten(a.term(k), b.term(k), sys.off_by_deg[k - sys.lo], part));
  }
  return ChainMap<F>(a, b, sys.lo, std::move(comps));
}

}  // namespace detail

/// A basis of the space of chain maps a -> b (components in every degree,
/// commuting with both differentials).
template <class F>
std::vector<ChainMap<F>> chain_map_basis(const ChainComplex<F>& a,
                                         const ChainComplex<F>& b) {
  auto sys = detail::chain_map_system(a, b);
  if (sys.lo > sys.hi) return {};
  auto kerb = sys.constraints.kernel_basis();
  std::vector<ChainMap<F>> out;
  for (int j = 0; j < kerb.cols(); ++j)
    out.push_back(detail::chain_map_from_column(a, b, sys, kerb.column(j)));
  return out;
}

/// Extend a chain map through an injection: given `along`: X -> I with
/// injective components and a chain map f: X -> K, produce g: I -> K with
/// g o along = f. Such a g exists whenever `along` is a degreewise injective
/// quasi-isomorphism and K is termwise injective and bounded; if the solver
/// finds no solution those hypotheses were violated.
template <class F>
ChainMap<F> extend_chain_map(const ChainMap<F>& along, const ChainMap<F>& f) {
  if (!(along.src() == f.src()))
    throw ValidationError("extension sources differ");
  const auto& ic = along.dst();
  const auto& kc = f.dst();
  const auto& x = along.src();
  const auto& field = ic.field();
  int n = ic.space()->n();
  auto sys = detail::chain_map_system(ic, kc);
  if (sys.lo > sys.hi) return ChainMap<F>::zero(ic, kc);

  // Append the inhomogeneous composition rows (g o along)[i][j] = f[i][j].
  int comp_rows = 0;
  for (int k = sys.lo; k <= sys.hi; ++k)
    for (int p = 0; p < n; ++p)
      comp_rows += kc.term(k).dim(p) * x.term(k).dim(p);
  Matrix<F> m(field, sys.constraints.rows() + comp_rows, sys.nvars);
  Matrix<F> rhs(field, m.rows(), 1);
  for (int i = 0; i < sys.constraints.rows(); ++i)
    for (int j = 0; j < sys.nvars; ++j) m.at(i, j) = sys.constraints.at(i, j);
  int row = sys.constraints.rows();
  for (int k = sys.lo; k <= sys.hi; ++k) {
    const auto& off = sys.off_by_deg[k - sys.lo];
    for (int p = 0; p < n; ++p) {
      auto io = along.at(k).at(p);
      auto fk = f.at(k).at(p);
      int kd = kc.term(k).dim(p);
      int xd = x.term(k).dim(p);
      int idim = ic.term(k).dim(p);
      for (int i = 0; i < kd; ++i)
        for (int j = 0; j < xd; ++j) {
          for (int t = 0; t < idim; ++t)
            m.at(row, sys.deg_off[k - sys.lo] + off[p] + i * idim + t) =
                io.at(t, j);
          rhs.at(row, 0) = fk.at(i, j);
          ++row;
        }
    }
  }
  auto sol = m.solve_matrix(rhs);
  if (!sol) throw InvariantError("no chain-map extension along the given map");
  return detail::chain_map_from_column(ic, kc, sys, *sol);
}

/// A bounded complex of plain vector spaces (dimensions and matrices).
template <class F>
class VectComplex {
 public:
  VectComplex(F field, int lo, std::vector<int> dims,
              std::vector<Matrix<F>> diffs)
      : field_(field), lo_(lo), dims_(std::move(dims)),
        diffs_(std::move(diffs)) {
    if (!dims_.empty() && diffs_.size() + 1 != dims_.size())
      throw ValidationError("vector complex needs one matrix per pair");
    if (dims_.empty() && !diffs_.empty())
      throw ValidationError("empty vector complex cannot have maps");
    for (int d : dims_)
      if (d < 0) throw ValidationError("negative dimension");
    for (size_t i = 0; i < diffs_.size(); ++i)
      if (diffs_[i].rows() != dims_[i + 1] || diffs_[i].cols() != dims_[i])
        throw ValidationError("vector complex map shape mismatch");
    for (size_t i = 0; i + 1 < diffs_.size(); ++i)
      if (!diffs_[i + 1].mul(diffs_[i]).is_zero())
        throw ValidationError("vector complex d^2 != 0");
  }

  const F& field() const { return field_; }
  int lo() const { return lo_; }
  int hi() const { return lo_ + int(dims_.size()) - 1; }
  int dim(int k) const {
    if (k < lo_ || k > hi()) return 0;
    return dims_[k - lo_];
  }
  int total_dim() const {
    int t = 0;
    for (int d : dims_) t += d;
    return t;
  }
  int rank_of_diff(int k) const {
    if (k < lo_ || k + 1 > hi()) return 0;
    return diffs_[k - lo_].rank();
  }
  /// dim H^k = dim ker d^k - rank d^(k-1).
  int h_dim(int k) const {
    if (k < lo_ || k > hi()) return 0;
    return dim(k) - rank_of_diff(k) - rank_of_diff(k - 1);
  }

 private:
  F field_;
  int lo_;
  std::vector<int> dims_;
  std::vector<Matrix<F>> diffs_;
};

}  // namespace tstruct
