#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tstruct/errors.hpp"
#include "tstruct/matrix.hpp"
#include "tstruct/point_set.hpp"
#include "tstruct/space.hpp"

namespace tstruct {

/// A sheaf of finite-dimensional vector spaces on a finite space, given by
/// one stalk per point and one transition matrix per comparable pair of
/// points, mapping the stalk at a point to the stalk at each of its
/// generizations.  The constructor checks the functorial identities, so a
/// constructed Sheaf is always a genuine sheaf.
template <class F>
class Sheaf {
 public:
  using Mat = Matrix<F>;

  /// `transitions` must hold exactly one entry per strictly comparable pair,
  /// keyed (p, q) where q is a strict generization of p, with shape
  /// dims[q] x dims[p].
  Sheaf(SpacePtr space, F field, std::vector<int> dims,
        std::map<std::pair<int, int>, Mat> transitions)
      : space_(std::move(space)),
        field_(field),
        dims_(std::move(dims)),
        rho_(std::move(transitions)) {
    if (!space_) throw ValidationError("sheaf needs a space");
    int n = space_->n();
    if (int(dims_.size()) != n)
      throw ValidationError("sheaf needs one stalk dimension per point");
    for (int d : dims_)
      if (d < 0) throw ValidationError("negative stalk dimension");
    for (const auto& [key, m] : rho_) {
      auto [p, q] = key;
      if (p < 0 || p >= n || q < 0 || q >= n || p == q ||
          !space_->lt(q, p))
        throw ValidationError("transition between incomparable points");
      if (m.rows() != dims_[q] || m.cols() != dims_[p])
        throw ValidationError("transition matrix shape mismatch at pair (" +
                              space_->id(p) + ", " + space_->id(q) + ")");
    }
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        if (!space_->lt(q, p)) continue;
        if (!rho_.count({p, q}))
          throw ValidationError("missing transition for pair (" +
                                space_->id(p) + ", " + space_->id(q) + ")");
        for (int r = 0; r < n; ++r)
          if (space_->lt(r, q) &&
              transition(q, r).mul(transition(p, q)) != transition(p, r))
            throw ValidationError("transitions fail to compose at (" +
                                  space_->id(p) + ", " + space_->id(q) +
                                  ", " + space_->id(r) + ")");
      }
  }

  static Sheaf zero(SpacePtr space, F field) {
    return constant_of_rank(std::move(space), field, 0);
  }

  /// Constant sheaf of the given rank: every stalk F^rank, identities.
  static Sheaf constant(SpacePtr space, F field, int rank = 1) {
    return constant_of_rank(std::move(space), field, rank);
  }

  /// Rank `rank` on the closure of `point`, zero outside, identity
  /// transitions inside the closure.  These are the indecomposable
  /// injectives.
  static Sheaf closure_constant(SpacePtr space, F field, int point,
                                int rank = 1) {
    if (point < 0 || point >= space->n())
      throw UnknownPoint("closure_constant point out of range");
    PointSet cl = space->closure(point);
    return locus_constant(std::move(space), field, cl, rank);
  }

  /// Rank `rank` on an open set, zero outside: the extension by zero of the
  /// constant sheaf on that open subspace.
  static Sheaf extension_by_zero(SpacePtr space, F field, const PointSet& u,
                                 int rank = 1) {
    if (!space->is_open(u))
      throw NotOpen("extension_by_zero needs an open subset");
    return locus_constant(std::move(space), field, u, rank);
  }

  const SpacePtr& space() const { return space_; }
  const F& field() const { return field_; }
  int dim(int p) const { return dims_[p]; }
  const std::vector<int>& dims() const { return dims_; }
  int total_dim() const {
    int t = 0;
    for (int d : dims_) t += d;
    return t;
  }

  /// Points with a nonzero stalk.
  PointSet support() const {
    PointSet s(space_->n());
    for (int p = 0; p < space_->n(); ++p)
      if (dims_[p] > 0) s.add(p);
    return s;
  }

  /// Transition from the stalk at p to the stalk at the generization q <= p;
  /// the identity when q == p.
  Mat transition(int p, int q) const {
    if (p == q) return Mat::identity(field_, dims_[p]);
    auto it = rho_.find({p, q});
    if (it == rho_.end())
      throw ValidationError("transition between incomparable points");
    return it->second;
  }

  bool operator==(const Sheaf& o) const {
    return *space_ == *o.space_ && field_ == o.field_ && dims_ == o.dims_ &&
           rho_ == o.rho_;
  }
  bool operator!=(const Sheaf& o) const { return !(*this == o); }

 private:
  static Sheaf constant_of_rank(SpacePtr space, F field, int rank) {
    return locus_constant(space, field, PointSet::full(space->n()), rank);
  }

  /// Constant of rank `rank` on `locus`, zero outside.  Only valid when no
  /// comparable pair leaves and re-enters the locus; both call sites
  /// (closures and open sets) satisfy that.
  static Sheaf locus_constant(SpacePtr space, F field, const PointSet& locus,
                              int rank) {
    if (rank < 0) throw ValidationError("negative rank");
    int n = space->n();
    std::vector<int> dims(n, 0);
    for (int p = 0; p < n; ++p)
      if (locus.contains(p)) dims[p] = rank;
    std::map<std::pair<int, int>, Mat> tr;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        if (!space->lt(q, p)) continue;
        if (locus.contains(p) && locus.contains(q))
          tr.emplace(std::make_pair(p, q), Mat::identity(field, rank));
        else
          tr.emplace(std::make_pair(p, q), Mat(field, dims[q], dims[p]));
      }
    return Sheaf(std::move(space), field, std::move(dims), std::move(tr));
  }

  SpacePtr space_;
  F field_;
  std::vector<int> dims_;
  std::map<std::pair<int, int>, Mat> rho_;
};

/// A morphism of sheaves: one matrix per stalk, checked to commute with all
/// transitions.
template <class F>
class Morphism {
 public:
  using Mat = Matrix<F>;

  Morphism(Sheaf<F> src, Sheaf<F> dst, std::vector<Mat> mats)
      : src_(std::move(src)), dst_(std::move(dst)), mats_(std::move(mats)) {
    require_same_space(*src_.space(), *dst_.space(), "morphism");
    if (!(src_.field() == dst_.field()))
      throw ValidationError("morphism between sheaves over different fields");
    int n = src_.space()->n();
    if (int(mats_.size()) != n)
      throw ValidationError("morphism needs one matrix per point");
    for (int p = 0; p < n; ++p)
      if (mats_[p].rows() != dst_.dim(p) || mats_[p].cols() != src_.dim(p))
        throw ValidationError("morphism component shape mismatch at " +
                              src_.space()->id(p));
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        if (src_.space()->lt(q, p) &&
            dst_.transition(p, q).mul(mats_[p]) !=
                mats_[q].mul(src_.transition(p, q)))
          throw ValidationError("morphism is not natural at pair (" +
                                src_.space()->id(p) + ", " +
                                src_.space()->id(q) + ")");
  }

  static Morphism zero(const Sheaf<F>& src, const Sheaf<F>& dst) {
    std::vector<Mat> mats;
    for (int p = 0; p < src.space()->n(); ++p)
      mats.push_back(Mat(src.field(), dst.dim(p), src.dim(p)));
    return Morphism(src, dst, std::move(mats));
  }

  static Morphism identity(const Sheaf<F>& s) {
    std::vector<Mat> mats;
    for (int p = 0; p < s.space()->n(); ++p)
      mats.push_back(Mat::identity(s.field(), s.dim(p)));
    return Morphism(s, s, std::move(mats));
  }

  const Sheaf<F>& src() const { return src_; }
  const Sheaf<F>& dst() const { return dst_; }
  const Mat& at(int p) const { return mats_[p]; }

  /// this o f  (apply f first).
  Morphism after(const Morphism& f) const {
    if (!(f.dst_ == src_))
      throw ValidationError("composition needs matching middle sheaf");
    std::vector<Mat> mats;
    for (int p = 0; p < src_.space()->n(); ++p)
      mats.push_back(mats_[p].mul(f.mats_[p]));
    return Morphism(f.src_, dst_, std::move(mats));
  }

  Morphism add(const Morphism& o) const {
    require_parallel(o);
    std::vector<Mat> mats;
    for (int p = 0; p < src_.space()->n(); ++p)
      mats.push_back(mats_[p].add(o.mats_[p]));
    return Morphism(src_, dst_, std::move(mats));
  }
  Morphism sub(const Morphism& o) const { return add(o.neg()); }
  Morphism neg() const { return scale(src_.field().neg(src_.field().one())); }
  Morphism scale(const typename F::Elem& c) const {
    std::vector<Mat> mats;
    for (int p = 0; p < src_.space()->n(); ++p)
      mats.push_back(mats_[p].scale(c));
    return Morphism(src_, dst_, std::move(mats));
  }

  bool is_zero() const {
    for (const auto& m : mats_)
      if (!m.is_zero()) return false;
    return true;
  }

  bool operator==(const Morphism& o) const {
    return src_ == o.src_ && dst_ == o.dst_ && mats_ == o.mats_;
  }
  bool operator!=(const Morphism& o) const { return !(*this == o); }

 private:
  void require_parallel(const Morphism& o) const {
    if (!(src_ == o.src_) || !(dst_ == o.dst_))
      throw ValidationError("morphisms are not parallel");
  }

  Sheaf<F> src_;
  Sheaf<F> dst_;
  std::vector<Mat> mats_;
};

template <class F>
struct SubsheafPair {
  Sheaf<F> sub;
  Morphism<F> inclusion;  // sub -> parent
};

template <class F>
struct QuotientPair {
  Sheaf<F> quot;
  Morphism<F> projection;  // parent -> quot
};

/// Builds the subsheaf of `parent` whose stalk at p is spanned by the
/// (independent) columns of bases[p].  The spans must be carried into each
/// other by the transitions; otherwise this throws InvariantError.
template <class F>
SubsheafPair<F> subsheaf_from_stalk_bases(const Sheaf<F>& parent,
                                          std::vector<Matrix<F>> bases) {
  int n = parent.space()->n();
  if (int(bases.size()) != n)
    throw ValidationError("need one stalk basis per point");
  std::vector<int> dims;
  for (int p = 0; p < n; ++p) {
    if (bases[p].rows() != parent.dim(p))
      throw ValidationError("stalk basis row count mismatch");
    dims.push_back(bases[p].cols());
  }
  std::map<std::pair<int, int>, Matrix<F>> tr;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (!parent.space()->lt(q, p)) continue;
      auto moved = parent.transition(p, q).mul(bases[p]);
      auto x = bases[q].solve_matrix(moved);
      if (!x)
        throw InvariantError("stalk spans are not stable under transitions");
      tr.emplace(std::make_pair(p, q), *x);
    }
  Sheaf<F> sub(parent.space(), parent.field(), std::move(dims),
               std::move(tr));
  Morphism<F> inc(sub, parent, std::move(bases));
  return {std::move(sub), std::move(inc)};
}

template <class F>
SubsheafPair<F> kernel_subsheaf(const Morphism<F>& f) {
  std::vector<Matrix<F>> bases;
  for (int p = 0; p < f.src().space()->n(); ++p)
    bases.push_back(f.at(p).kernel_basis());
  return subsheaf_from_stalk_bases(f.src(), std::move(bases));
}

/// The image of f as a subsheaf of its target.
template <class F>
SubsheafPair<F> image_subsheaf(const Morphism<F>& f) {
  std::vector<Matrix<F>> bases;
  for (int p = 0; p < f.src().space()->n(); ++p)
    bases.push_back(f.at(p).column_space_basis());
  return subsheaf_from_stalk_bases(f.dst(), std::move(bases));
}

/// Quotient of `parent` by the stalkwise spans of `spans` (columns need not
/// be independent).  The spans must be transition-stable.
template <class F>
QuotientPair<F> quotient_by_stalk_spans(const Sheaf<F>& parent,
                                        const std::vector<Matrix<F>>& spans) {
  int n = parent.space()->n();
  if (int(spans.size()) != n)
    throw ValidationError("need one span per point");
  std::vector<Matrix<F>> proj;
  std::vector<int> dims;
  for (int p = 0; p < n; ++p) {
    if (spans[p].rows() != parent.dim(p))
      throw ValidationError("span row count mismatch");
    proj.push_back(spans[p].left_kernel_basis());
    dims.push_back(proj.back().rows());
  }
  std::map<std::pair<int, int>, Matrix<F>> tr;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (!parent.space()->lt(q, p)) continue;
      // T proj[p] = proj[q] rho  <=>  proj[p]^T T^T = (proj[q] rho)^T.
      auto rhs = proj[q].mul(parent.transition(p, q)).transpose();
      auto x = proj[p].transpose().solve_matrix(rhs);
      if (!x)
        throw InvariantError("spans are not stable under transitions");
      tr.emplace(std::make_pair(p, q), x->transpose());
    }
  Sheaf<F> quot(parent.space(), parent.field(), std::move(dims),
                std::move(tr));
  Morphism<F> pr(parent, quot, std::move(proj));
  return {std::move(quot), std::move(pr)};
}

/// Quotient of the target of f by the image of f.
template <class F>
QuotientPair<F> quotient_by_image(const Morphism<F>& f) {
  std::vector<Matrix<F>> spans;
  for (int p = 0; p < f.src().space()->n(); ++p) spans.push_back(f.at(p));
  return quotient_by_stalk_spans(f.dst(), spans);
}

template <class F>
struct SumPair {
  Sheaf<F> sum;
  std::vector<Morphism<F>> injections;
  std::vector<Morphism<F>> projections;
};

template <class F>
SumPair<F> direct_sum(const std::vector<Sheaf<F>>& parts) {
  if (parts.empty()) throw ValidationError("direct sum needs a space");
  const auto& space = parts[0].space();
  const auto& field = parts[0].field();
  int n = space->n();
  for (const auto& s : parts) {
    require_same_space(*space, *s.space(), "direct sum");
    if (!(field == s.field()))
      throw ValidationError("direct sum over different fields");
  }
  std::vector<int> dims(n, 0);
  std::vector<std::vector<int>> offset(parts.size(),
                                       std::vector<int>(n, 0));
  for (size_t i = 0; i < parts.size(); ++i)
    for (int p = 0; p < n; ++p) {
      offset[i][p] = dims[p];
      dims[p] += parts[i].dim(p);
    }
  std::map<std::pair<int, int>, Matrix<F>> tr;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (!space->lt(q, p)) continue;
      Matrix<F> block(field, dims[q], dims[p]);
      for (size_t i = 0; i < parts.size(); ++i) {
        auto t = parts[i].transition(p, q);
        for (int r = 0; r < t.rows(); ++r)
          for (int c = 0; c < t.cols(); ++c)
            block.at(offset[i][q] + r, offset[i][p] + c) = t.at(r, c);
      }
      tr.emplace(std::make_pair(p, q), std::move(block));
    }
  Sheaf<F> sum(space, field, dims, std::move(tr));
  SumPair<F> out{sum, {}, {}};
  for (size_t i = 0; i < parts.size(); ++i) {
    std::vector<Matrix<F>> inj, prj;
    for (int p = 0; p < n; ++p) {
      Matrix<F> in(field, dims[p], parts[i].dim(p));
      Matrix<F> pr(field, parts[i].dim(p), dims[p]);
      for (int r = 0; r < parts[i].dim(p); ++r) {
        in.at(offset[i][p] + r, r) = field.one();
        pr.at(r, offset[i][p] + r) = field.one();
      }
      inj.push_back(std::move(in));
      prj.push_back(std::move(pr));
    }
    out.injections.push_back(Morphism<F>(parts[i], sum, std::move(inj)));
    out.projections.push_back(Morphism<F>(sum, parts[i], std::move(prj)));
  }
  return out;
}

namespace detail {

/// Offsets for flattening one matrix per point into one coordinate vector;
/// the entry (i, j) of the matrix at p sits at offset[p] + i * cols(p) + j.
inline std::vector<int> flat_offsets(const std::vector<int>& rows,
                                     const std::vector<int>& cols) {
  std::vector<int> off(rows.size() + 1, 0);
  for (size_t p = 0; p < rows.size(); ++p)
    off[p + 1] = off[p] + rows[p] * cols[p];
  return off;
}

/// The linear system expressing naturality of a morphism a -> b, as rows
/// over the flattened component entries.
template <class F>
Matrix<F> naturality_matrix(const Sheaf<F>& a, const Sheaf<F>& b,
                            const std::vector<int>& off) {
  const auto& field = a.field();
  int n = a.space()->n();
  int nvars = off[n];
  int nrows = 0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (a.space()->lt(q, p)) nrows += b.dim(q) * a.dim(p);
  Matrix<F> c(field, nrows, nvars);
  int row = 0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (!a.space()->lt(q, p)) continue;
      auto rb = b.transition(p, q);
      auto ra = a.transition(p, q);
      // (rb f_p - f_q ra)[i][j] = 0 for i < b.dim(q), j < a.dim(p).
      for (int i = 0; i < b.dim(q); ++i)
        for (int j = 0; j < a.dim(p); ++j) {
          for (int k = 0; k < b.dim(p); ++k)
            c.at(row, off[p] + k * a.dim(p) + j) =
                field.add(c.at(row, off[p] + k * a.dim(p) + j), rb.at(i, k));
          for (int l = 0; l < a.dim(q); ++l)
            c.at(row, off[q] + i * a.dim(q) + l) =
                field.sub(c.at(row, off[q] + i * a.dim(q) + l), ra.at(l, j));
          ++row;
        }
    }
  return c;
}

template <class F>
Morphism<F> unflatten(const Sheaf<F>& a, const Sheaf<F>& b,
                      const std::vector<int>& off, const Matrix<F>& column) {
  std::vector<Matrix<F>> mats;
  for (int p = 0; p < a.space()->n(); ++p) {
    Matrix<F> m(a.field(), b.dim(p), a.dim(p));
    for (int i = 0; i < b.dim(p); ++i)
      for (int j = 0; j < a.dim(p); ++j)
        m.at(i, j) = column.at(off[p] + i * a.dim(p) + j, 0);
    mats.push_back(std::move(m));
  }
  return Morphism<F>(a, b, std::move(mats));
}

}  // namespace detail

/// A basis of the space of morphisms a -> b.
template <class F>
std::vector<Morphism<F>> hom_basis(const Sheaf<F>& a, const Sheaf<F>& b) {
  require_same_space(*a.space(), *b.space(), "hom space");
  int n = a.space()->n();
  std::vector<int> rows, cols;
  for (int p = 0; p < n; ++p) {
    rows.push_back(b.dim(p));
    cols.push_back(a.dim(p));
  }
  auto off = detail::flat_offsets(rows, cols);
  auto c = detail::naturality_matrix(a, b, off);
  auto k = c.kernel_basis();
  std::vector<Morphism<F>> out;
  for (int j = 0; j < k.cols(); ++j)
    out.push_back(detail::unflatten(a, b, off, k.column(j)));
  return out;
}

/// Basis of the sections over an open set: columns are compatible stalk
/// families, rows stacked over the points of `u` in ascending index order.
template <class F>
Matrix<F> sections_basis(const Sheaf<F>& f, const PointSet& u) {
  if (!f.space()->is_open(u))
    throw NotOpen("sections are defined over open sets");
  int n = f.space()->n();
  std::vector<int> offset(n, -1);
  int total = 0;
  for (int p = 0; p < n; ++p)
    if (u.contains(p)) {
      offset[p] = total;
      total += f.dim(p);
    }
  int nrows = 0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (u.contains(p) && u.contains(q) && f.space()->lt(q, p))
        nrows += f.dim(q);
  Matrix<F> c(f.field(), nrows, total);
  int row = 0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (!u.contains(p) || !u.contains(q) || !f.space()->lt(q, p)) continue;
      auto t = f.transition(p, q);
      for (int i = 0; i < f.dim(q); ++i) {
        for (int j = 0; j < f.dim(p); ++j)
          c.at(row, offset[p] + j) = t.at(i, j);
        c.at(row, offset[q] + i) =
            f.field().sub(c.at(row, offset[q] + i), f.field().one());
        ++row;
      }
    }
  return c.kernel_basis();
}

template <class F>
int sections_dim(const Sheaf<F>& f, const PointSet& u) {
  return sections_basis(f, u).cols();
}

/// The subsheaf of sections supported on the closed set w: the stalk at p
/// keeps the vectors killed by every transition leaving w.
template <class F>
SubsheafPair<F> sections_with_support(const Sheaf<F>& f, const PointSet& w) {
  if (!f.space()->is_closed(w))
    throw NotClosed("supported sections need a closed subset");
  int n = f.space()->n();
  std::vector<Matrix<F>> bases;
  for (int p = 0; p < n; ++p) {
    Matrix<F> c(f.field(), 0, f.dim(p));
    for (int q = 0; q < n; ++q)
      if (f.space()->leq(q, p) && !w.contains(q))
        c = c.vstack(f.transition(p, q));
    bases.push_back(c.kernel_basis());
  }
  return subsheaf_from_stalk_bases(f, std::move(bases));
}

/// Basis of the socle at p: the stalk vectors killed by every transition to
/// a strict generization.
template <class F>
Matrix<F> socle_basis(const Sheaf<F>& f, int p) {
  Matrix<F> c(f.field(), 0, f.dim(p));
  for (int q = 0; q < f.space()->n(); ++q)
    if (f.space()->lt(q, p)) c = c.vstack(f.transition(p, q));
  return c.kernel_basis();
}

template <class F>
struct EmbeddingResult {
  Sheaf<F> target;
  Morphism<F> embed;
  /// (point, multiplicity) of each closure-constant summand, ascending.
  std::vector<std::pair<int, int>> components;
};

/// The minimal embedding of f into a sum of closure-constant sheaves, one
/// summand of multiplicity dim Soc_p(f) per point p.
template <class F>
EmbeddingResult<F> minimal_injective_embedding(const Sheaf<F>& f) {
  const auto& space = f.space();
  const auto& field = f.field();
  int n = space->n();
  std::vector<std::pair<int, int>> components;
  std::vector<Sheaf<F>> parts;
  std::vector<Matrix<F>> splittings;  // lambda_p : F_p -> Soc_p coords
  for (int p = 0; p < n; ++p) {
    auto soc = socle_basis(f, p);
    if (soc.cols() == 0) continue;
    components.push_back({p, soc.cols()});
    parts.push_back(Sheaf<F>::closure_constant(space, field, p, soc.cols()));
    // lambda soc = id, i.e. soc^T lambda^T = id.
    auto lt = soc.transpose().solve_matrix(
        Matrix<F>::identity(field, soc.cols()));
    if (!lt) throw InvariantError("socle basis is not independent");
    splittings.push_back(lt->transpose());
  }
  Sheaf<F> target =
      parts.empty() ? Sheaf<F>::zero(space, field) : direct_sum(parts).sum;
  std::vector<Matrix<F>> mats;
  for (int r = 0; r < n; ++r) {
    Matrix<F> u(field, 0, f.dim(r));
    for (size_t i = 0; i < components.size(); ++i) {
      int p = components[i].first;
      if (space->leq(p, r))  // r lies in the closure of p
        u = u.vstack(splittings[i].mul(f.transition(r, p)));
    }
    mats.push_back(std::move(u));
  }
  Morphism<F> embed(f, target, std::move(mats));
  for (int r = 0; r < n; ++r)
    if (embed.at(r).rank() != f.dim(r))
      throw InvariantError("minimal embedding is not injective");
  return {std::move(target), std::move(embed), std::move(components)};
}

template <class F>
struct ResolutionResult {
  std::vector<Sheaf<F>> terms;              // injective terms, degrees 0..L
  std::vector<Morphism<F>> maps;            // terms[k] -> terms[k+1]
  Morphism<F> augmentation;                 // the resolved sheaf -> terms[0]
  std::vector<std::vector<std::pair<int, int>>> components;
};

/// Minimal injective resolution by iterated socle embeddings.  Terminates in
/// at most #points steps; the cap guards the invariant.
template <class F>
ResolutionResult<F> injective_resolution(const Sheaf<F>& f) {
  int cap = f.space()->n() + 2;
  auto e = minimal_injective_embedding(f);
  std::vector<Sheaf<F>> terms{e.target};
  std::vector<std::vector<std::pair<int, int>>> components{e.components};
  std::vector<Morphism<F>> maps;
  Morphism<F> augmentation = e.embed;
  Morphism<F> inclusion = e.embed;  // current object -> terms.back()
  for (int step = 0;; ++step) {
    if (step > cap)
      throw ResolutionCapExceeded("injective resolution did not terminate");
    auto q = quotient_by_image(inclusion);
    if (q.quot.total_dim() == 0) break;
    auto next = minimal_injective_embedding(q.quot);
    maps.push_back(next.embed.after(q.projection));
    terms.push_back(next.target);
    components.push_back(next.components);
    inclusion = next.embed;
  }
  return {std::move(terms), std::move(maps), std::move(augmentation),
          std::move(components)};
}

/// Given an injection m : A -> B and any f : A -> I with I injective, finds
/// g : B -> I with g m = f.  Throws InvariantError when no extension exists
/// (e.g. when m is not injective or I not injective).
template <class F>
Morphism<F> extend_along_injection(const Morphism<F>& m,
                                   const Morphism<F>& f) {
  if (!(m.src() == f.src()))
    throw ValidationError("extension needs a common source");
  const Sheaf<F>& b = m.dst();
  const Sheaf<F>& i = f.dst();
  const auto& field = b.field();
  int n = b.space()->n();
  std::vector<int> rows, cols;
  for (int p = 0; p < n; ++p) {
    rows.push_back(i.dim(p));
    cols.push_back(b.dim(p));
  }
  auto off = detail::flat_offsets(rows, cols);
  auto nat = detail::naturality_matrix(b, i, off);
  // Composition constraints: (g_p m_p)[r][j] = f_p[r][j].
  int extra = 0;
  for (int p = 0; p < n; ++p) extra += i.dim(p) * m.src().dim(p);
  Matrix<F> comp(field, extra, off[n]);
  Matrix<F> rhs(field, nat.rows() + extra, 1);
  int row = 0;
  for (int p = 0; p < n; ++p) {
    for (int r = 0; r < i.dim(p); ++r)
      for (int j = 0; j < m.src().dim(p); ++j) {
        for (int k = 0; k < b.dim(p); ++k)
          comp.at(row, off[p] + r * b.dim(p) + k) = m.at(p).at(k, j);
        rhs.at(nat.rows() + row, 0) = f.at(p).at(r, j);
        ++row;
      }
  }
  auto sol = nat.vstack(comp).solve_matrix(rhs);
  if (!sol) throw InvariantError("no extension along the given map");
  return detail::unflatten(b, i, off, *sol);
}

/// Pullback along the inclusion of an open subspace.
template <class F>
Sheaf<F> restrict_sheaf(const Sheaf<F>& f, const OpenSubspace& sub) {
  require_same_space(*f.space(), *sub.parent, "restriction");
  int m = sub.space->n();
  std::vector<int> dims;
  for (int p = 0; p < m; ++p) dims.push_back(f.dim(sub.to_parent[p]));
  std::map<std::pair<int, int>, Matrix<F>> tr;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      if (sub.space->lt(q, p))
        tr.emplace(std::make_pair(p, q),
                   f.transition(sub.to_parent[p], sub.to_parent[q]));
  return Sheaf<F>(sub.space, f.field(), std::move(dims), std::move(tr));
}

template <class F>
Morphism<F> restrict_morphism(const Morphism<F>& f, const OpenSubspace& sub) {
  std::vector<Matrix<F>> mats;
  for (int p = 0; p < sub.space->n(); ++p)
    mats.push_back(f.at(sub.to_parent[p]));
  return Morphism<F>(restrict_sheaf(f.src(), sub),
                     restrict_sheaf(f.dst(), sub), std::move(mats));
}

namespace detail {

/// The subspace-side points of u ∩ (minimal open of ambient p).
template <class F>
PointSet pushforward_locus(const OpenSubspace& sub, const Sheaf<F>& g,
                           int ambient_p) {
  PointSet v(sub.space->n());
  for (int q = 0; q < sub.space->n(); ++q)
    if (sub.parent->leq(sub.to_parent[q], ambient_p)) v.add(q);
  (void)g;
  return v;
}

/// Rows of `basis` (stacked over the points of `from`) restricted to the
/// points of `to` (a subset of `from`).
template <class F>
Matrix<F> restrict_family_rows(const Sheaf<F>& g, const PointSet& from,
                               const PointSet& to, const Matrix<F>& basis) {
  int n = g.space()->n();
  Matrix<F> out(g.field(), 0, basis.cols());
  int off = 0;
  for (int p = 0; p < n; ++p) {
    if (!from.contains(p)) continue;
    if (to.contains(p)) out = out.vstack(basis.submatrix(off, 0, g.dim(p),
                                                         basis.cols()));
    off += g.dim(p);
  }
  return out;
}

}  // namespace detail

/// Pushforward along an open inclusion: the stalk at an ambient point is the
/// space of sections of g over the trace of its minimal open set.
template <class F>
Sheaf<F> pushforward_sheaf(const OpenSubspace& sub, const Sheaf<F>& g) {
  require_same_space(*g.space(), *sub.space, "pushforward");
  int n = sub.parent->n();
  std::vector<PointSet> loci;
  std::vector<Matrix<F>> bases;
  std::vector<int> dims;
  for (int p = 0; p < n; ++p) {
    loci.push_back(detail::pushforward_locus(sub, g, p));
    bases.push_back(sections_basis(g, loci.back()));
    dims.push_back(bases.back().cols());
  }
  std::map<std::pair<int, int>, Matrix<F>> tr;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (!sub.parent->lt(q, p)) continue;
      auto restricted =
          detail::restrict_family_rows(g, loci[p], loci[q], bases[p]);
      auto x = bases[q].solve_matrix(restricted);
      if (!x) throw InvariantError("pushforward restriction failed");
      tr.emplace(std::make_pair(p, q), *x);
    }
  return Sheaf<F>(sub.parent, g.field(), std::move(dims),
                  std::move(tr));
}

template <class F>
Morphism<F> pushforward_morphism(const OpenSubspace& sub,
                                 const Morphism<F>& f) {
  const Sheaf<F>& g = f.src();
  const Sheaf<F>& h = f.dst();
  auto pg = pushforward_sheaf(sub, g);
  auto ph = pushforward_sheaf(sub, h);
  int n = sub.parent->n();
  std::vector<Matrix<F>> mats;
  for (int p = 0; p < n; ++p) {
    auto locus = detail::pushforward_locus(sub, g, p);
    auto bg = sections_basis(g, locus);
    auto bh = sections_basis(h, locus);
    // Apply f stalkwise to each section family.
    Matrix<F> applied(g.field(), 0, bg.cols());
    int off = 0;
    for (int q = 0; q < sub.space->n(); ++q) {
      if (!locus.contains(q)) continue;
      applied = applied.vstack(
          f.at(q).mul(bg.submatrix(off, 0, g.dim(q), bg.cols())));
      off += g.dim(q);
    }
    auto x = bh.solve_matrix(applied);
    if (!x) throw InvariantError("pushforward of morphism failed");
    mats.push_back(*x);
  }
  return Morphism<F>(std::move(pg), std::move(ph), std::move(mats));
}

}  // namespace tstruct
