#include "tstruct/support.hpp"

#include <algorithm>

#include "tstruct/errors.hpp"

namespace tstruct {

// ---------------------------------------------------------------- families

FamilyOfSupports FamilyOfSupports::from_points(SpacePtr space,
                                               const PointSet& pts) {
  if (pts.universe() != space->n())
    throw ValidationError("family point set has wrong universe size");
  PointSet cl = space->closure(pts);
  return FamilyOfSupports(std::move(space), cl);
}

FamilyOfSupports FamilyOfSupports::all(SpacePtr space) {
  PointSet f = PointSet::full(space->n());
  return FamilyOfSupports(std::move(space), f);
}

FamilyOfSupports FamilyOfSupports::none(SpacePtr space) {
  PointSet e(space->n());
  return FamilyOfSupports(std::move(space), e);
}

bool FamilyOfSupports::contains(const PointSet& z) const {
  if (!space_->is_closed(z)) throw NotClosed("family membership needs a closed set");
  return z.subset_of(members_);
}

FamilyOfSupports FamilyOfSupports::meet(const FamilyOfSupports& o) const {
  require_same_space(*space_, *o.space_, "family meet");
  return FamilyOfSupports(space_, members_ & o.members_);
}

FamilyOfSupports FamilyOfSupports::join(const FamilyOfSupports& o) const {
  require_same_space(*space_, *o.space_, "family join");
  return FamilyOfSupports(space_, members_ | o.members_);
}

bool FamilyOfSupports::subset_of(const FamilyOfSupports& o) const {
  require_same_space(*space_, *o.space_, "family subset");
  return members_.subset_of(o.members_);
}

bool FamilyOfSupports::operator==(const FamilyOfSupports& o) const {
  require_same_space(*space_, *o.space_, "family compare");
  return members_ == o.members_;
}

FamilyOfSupports FamilyOfSupports::restrict_open(const OpenSubspace& sub) const {
  PointSet m(sub.space->n());
  for (int i = 0; i < sub.space->n(); ++i)
    if (members_.contains(sub.to_parent[i])) m.add(i);
  return FamilyOfSupports(sub.space, m);
}

// ------------------------------------------------------------------- datum

SupportDatum::SupportDatum(SpacePtr space, std::vector<int> p)
    : space_(std::move(space)), p_(std::move(p)) {
  if (int(p_.size()) != space_->n())
    throw ValidationError("datum value vector has wrong length");
  if (auto w = monotonicity_witness())
    throw MonotonicityError("datum not monotone: p('" + space_->id(w->first) +
                            "') = " + std::to_string(p_[w->first]) + " > p('" +
                            space_->id(w->second) +
                            "') = " + std::to_string(p_[w->second]) +
                            " on a specialization");
}

SupportDatum SupportDatum::unchecked(SpacePtr space, std::vector<int> p) {
  return SupportDatum(std::move(space), std::move(p), Unchecked{});
}

SupportDatum SupportDatum::trivial(SpacePtr space) {
  std::vector<int> p(space->n(), 0);
  return SupportDatum(std::move(space), std::move(p), Unchecked{});
}

SupportDatum SupportDatum::codim_datum(SpacePtr space) {
  std::vector<int> p(space->n());
  for (int i = 0; i < space->n(); ++i) p[i] = space->codim(i);
  return SupportDatum(std::move(space), std::move(p), Unchecked{});
}

SupportDatum SupportDatum::from_levels(SpacePtr space,
                                       const std::map<int, PointSet>& levels,
                                       std::optional<int> full_below) {
  const int n = space->n();
  for (const auto& [lvl, pts] : levels)
    if (pts.universe() != n)
      throw ValidationError("level " + std::to_string(lvl) +
                            " has wrong universe size");
  if (!levels.empty() && full_below && *full_below >= levels.begin()->first)
    throw ValidationError("full_below must lie strictly below the least level key");
  // Decreasing across consecutive keys (omitted levels inherit the key above).
  for (auto it = levels.begin(); it != levels.end(); ++it) {
    auto nx = std::next(it);
    if (nx == levels.end()) break;
    if (!nx->second.subset_of(it->second))
      throw NotDecreasing("level " + std::to_string(nx->first) +
                          " is not contained in level " +
                          std::to_string(it->first));
  }
  if (levels.empty() && !full_below)
    throw NotBounded("no levels and no full_below; datum undetermined");

  std::vector<int> p(n, kInfiniteCodim);
  for (int i = 0; i < n; ++i) {
    bool found = false;
    for (auto it = levels.rbegin(); it != levels.rend(); ++it)
      if (it->second.contains(i)) {
        p[i] = it->first;
        found = true;
        break;
      }
    if (!found) {
      if (!full_below)
        throw NotBounded("point '" + space->id(i) +
                         "' appears in no level and full_below is absent");
      p[i] = *full_below;
    }
  }
  return SupportDatum(std::move(space), std::move(p));
}

int SupportDatum::min_p() const {
  return *std::min_element(p_.begin(), p_.end());
}
int SupportDatum::max_p() const {
  return *std::max_element(p_.begin(), p_.end());
}

PointSet SupportDatum::level_points(int n) const {
  PointSet s(space_->n());
  for (int i = 0; i < space_->n(); ++i)
    if (p_[i] >= n) s.add(i);
  return s;
}

FamilyOfSupports SupportDatum::level(int n) const {
  return FamilyOfSupports::from_points(space_, level_points(n));
}

SupportDatum SupportDatum::sigma_leq(int n) const {
  std::vector<int> p(p_);
  for (int& v : p) v = std::min(v, n);
  return SupportDatum(space_, std::move(p), Unchecked{});
}

SupportDatum SupportDatum::meet(const SupportDatum& o) const {
  require_same_space(*space_, *o.space_, "datum meet");
  std::vector<int> p(space_->n());
  for (int i = 0; i < space_->n(); ++i) p[i] = std::min(p_[i], o.p_[i]);
  return SupportDatum(space_, std::move(p));
}

SupportDatum SupportDatum::join(const SupportDatum& o) const {
  require_same_space(*space_, *o.space_, "datum join");
  std::vector<int> p(space_->n());
  for (int i = 0; i < space_->n(); ++i) p[i] = std::max(p_[i], o.p_[i]);
  return SupportDatum(space_, std::move(p));
}

bool SupportDatum::subset_of(const SupportDatum& o) const {
  require_same_space(*space_, *o.space_, "datum subset");
  for (int i = 0; i < space_->n(); ++i)
    if (p_[i] > o.p_[i]) return false;
  return true;
}

bool SupportDatum::operator==(const SupportDatum& o) const {
  require_same_space(*space_, *o.space_, "datum compare");
  return p_ == o.p_;
}

bool SupportDatum::is_monotone() const { return !monotonicity_witness(); }

std::optional<std::pair<int, int>> SupportDatum::monotonicity_witness() const {
  for (int x = 0; x < space_->n(); ++x)
    for (int y = 0; y < space_->n(); ++y)
      if (space_->lt(x, y) && p_[y] < p_[x]) return std::make_pair(x, y);
  return std::nullopt;
}

SupportDatum SupportDatum::restrict_open(const OpenSubspace& sub) const {
  std::vector<int> p(sub.space->n());
  for (int i = 0; i < sub.space->n(); ++i) p[i] = p_[sub.to_parent[i]];
  return SupportDatum(sub.space, std::move(p));
}

// ------------------------------------------------------------- convolution

namespace {

// Level sets {y : p(y) >= k} of a datum on a space with <= 64 points, packed
// into machine words and clamped outside the active range (full below the
// minimum, empty above the maximum).
struct LevelMasks {
  int lo = 0, hi = -1;
  uint64_t all = 0;
  std::vector<uint64_t> at;

  explicit LevelMasks(const SupportDatum& d) {
    const int npts = d.space()->n();
    lo = d.min_p();
    hi = d.max_p();
    all = (npts >= 64) ? ~uint64_t(0) : ((uint64_t(1) << npts) - 1);
    at.assign(size_t(hi - lo + 1), 0);
    for (int y = 0; y < npts; ++y)
      for (int k = lo; k <= std::min(d.p(y), hi); ++k)
        at[size_t(k - lo)] |= uint64_t(1) << y;
  }

  uint64_t level(int k) const {
    if (k <= lo) return all;
    if (k > hi) return 0;
    return at[size_t(k - lo)];
  }
};

}  // namespace

PointSet convolve_level_union_route(const SupportDatum& a,
                                    const SupportDatum& b, int n) {
  require_same_space(*a.space(), *b.space(), "convolution");
  PointSet acc(a.space()->n());
  const int lo = std::min(a.min_p(), n - b.max_p()) - 1;
  const int hi = std::max(a.max_p(), n - b.min_p()) + 1;
  for (int i = lo; i <= hi; ++i)
    acc = acc | (a.level_points(i) & b.level_points(n - i));
  return acc;
}

PointSet convolve_level_intersection_route(const SupportDatum& a,
                                           const SupportDatum& b, int n) {
  require_same_space(*a.space(), *b.space(), "convolution");
  PointSet acc = PointSet::full(a.space()->n());
  // Terms with either side saturated full impose no constraint.
  for (int i = a.min_p() + 1; i <= n - b.min_p(); ++i)
    acc = acc & (a.level_points(i) | b.level_points(n + 1 - i));
  return acc;
}

SupportDatum convolve(const SupportDatum& a, const SupportDatum& b) {
  require_same_space(*a.space(), *b.space(), "convolution");
  std::vector<int> p(a.space()->n());
  for (int i = 0; i < a.space()->n(); ++i) p[i] = a.p(i) + b.p(i);
  SupportDatum out(a.space(), std::move(p));
  // The three routes (pointwise sum, union of meets, intersection of joins)
  // must agree on every level in and around the active window.
  if (a.space()->n() <= 64) {
    const LevelMasks la(a), lb(b), ls(out);
    for (int n = out.min_p() - 1; n <= out.max_p() + 1; ++n) {
      const uint64_t want = ls.level(n);
      uint64_t uni = 0;
      const int lo = std::min(a.min_p(), n - b.max_p()) - 1;
      const int hi = std::max(a.max_p(), n - b.min_p()) + 1;
      for (int i = lo; i <= hi; ++i) uni |= la.level(i) & lb.level(n - i);
      uint64_t inter = ls.all;
      for (int i = a.min_p() + 1; i <= n - b.min_p(); ++i)
        inter &= la.level(i) | lb.level(n + 1 - i);
      if (uni != want || inter != want)
        throw InvariantError("convolution level routes disagree at level " +
                             std::to_string(n));
    }
    return out;
  }
  for (int n = out.min_p() - 1; n <= out.max_p() + 1; ++n) {
    PointSet want = out.level_points(n);
    if (convolve_level_union_route(a, b, n) != want ||
        convolve_level_intersection_route(a, b, n) != want)
      throw InvariantError("convolution level routes disagree at level " +
                           std::to_string(n));
  }
  return out;
}

// ------------------------------------------------------------------- duals

SupportDatum dual_star(const SupportDatum& a) {
  const SpaceModel& x = *a.space();
  const int npts = x.n();
  const int kmin = a.min_p(), kmax = a.max_p();
  const int n_hi = x.max_codim() - kmin;
  const int n_lo = -kmax;  // always satisfied there

  if (npts <= 64) {
    // Same bounded evaluation as below, with the level sets of `a`, the
    // codim sublevel sets, and the closures packed into machine words.
    const int ctop = x.max_codim() + 1;
    std::vector<uint64_t> lvl(size_t(kmax - kmin + 1), 0);
    for (int y = 0; y < npts; ++y)
      for (int k = kmin; k <= std::min(a.p(y), kmax); ++k)
        lvl[size_t(k - kmin)] |= uint64_t(1) << y;
    std::vector<uint64_t> below(size_t(ctop) + 1, 0);  // {y : codim(y) < c}
    for (int c = 1; c <= ctop; ++c) {
      below[size_t(c)] = below[size_t(c) - 1];
      for (int y = 0; y < npts; ++y)
        if (x.codim(y) == c - 1) below[size_t(c)] |= uint64_t(1) << y;
    }
    std::vector<int> out(npts);
    for (int pt = 0; pt < npts; ++pt) {
      uint64_t cl = 0;
      for (int y = 0; y < npts; ++y)
        if (x.leq(pt, y)) cl |= uint64_t(1) << y;
      int val = n_lo;
      for (int n = n_hi; n >= n_lo; --n) {
        bool ok = true;
        for (int k = kmin; k <= kmax && ok; ++k) {
          const int c = n + k;
          if (c <= 0) continue;
          if (cl & lvl[size_t(k - kmin)] & below[size_t(std::min(c, ctop))])
            ok = false;
        }
        if (ok) {
          val = n;
          break;
        }
      }
      out[pt] = val;
    }
    return SupportDatum(a.space(), std::move(out));
  }

  std::vector<int> out(x.n());
  for (int pt = 0; pt < x.n(); ++pt) {
    const PointSet cl = x.closure(pt);
    int val = n_lo;
    for (int n = n_hi; n >= n_lo; --n) {
      bool ok = true;
      for (int k = kmin; k <= kmax && ok; ++k) {
        // closure(pt) meet level_k(a) must sit inside codim level n + k.
        for (int y = 0; y < x.n() && ok; ++y)
          if (cl.contains(y) && a.p(y) >= k && x.codim(y) < n + k) ok = false;
      }
      if (ok) {
        val = n;
        break;
      }
    }
    out[pt] = val;
  }
  return SupportDatum(a.space(), std::move(out));
}

ResiduationOutcome residuate(const SupportDatum& phi,
                             const SupportDatum& theta) {
  require_same_space(*phi.space(), *theta.space(), "residuation");
  const SpaceModel& x = *phi.space();
  std::vector<int> p(x.n());
  for (int pt = 0; pt < x.n(); ++pt) {
    int v = kInfiniteCodim;
    for (int y = 0; y < x.n(); ++y)
      if (x.leq(pt, y)) v = std::min(v, theta.p(y) - phi.p(y));
    p[pt] = v;
  }
  SupportDatum psi(phi.space(), std::move(p));
  if (convolve(phi, psi) == theta) return ResiduationOutcome{psi, std::nullopt};
  // No solution: exhibit a specialization pair whose phi-jump exceeds the
  // theta-jump (must exist when the verification fails).
  for (int a = 0; a < x.n(); ++a)
    for (int b = 0; b < x.n(); ++b)
      if (x.leq(a, b) && phi.p(b) - phi.p(a) > theta.p(b) - theta.p(a))
        return ResiduationOutcome{std::nullopt, std::make_pair(a, b)};
  throw InvariantError("residuation failed but no witness pair exists");
}

SupportDatum psi_truncated(const SupportDatum& phi, const SupportDatum& theta,
                           int a) {
  require_same_space(*phi.space(), *theta.space(), "truncated residuation");
  const SpaceModel& x = *phi.space();
  // Constraints for k below min(a, min p_phi) are implied by that k; above
  // min(a, max p_phi) the level is empty, so this window is the literal answer.
  const int k_lo = std::min(a, phi.min_p());
  const int k_hi = std::min(a, phi.max_p());
  const int n_hi = theta.max_p() - k_lo;
  const int n_lo = theta.min_p() - k_hi;
  std::vector<int> out(x.n());
  for (int pt = 0; pt < x.n(); ++pt) {
    const PointSet cl = x.closure(pt);
    int val = n_lo;
    for (int n = n_hi; n >= n_lo; --n) {
      bool ok = true;
      for (int k = k_lo; k <= k_hi && ok; ++k)
        for (int y = 0; y < x.n() && ok; ++y)
          if (cl.contains(y) && phi.p(y) >= k && theta.p(y) < k + n) ok = false;
      if (ok) {
        val = n;
        break;
      }
    }
    out[pt] = val;
  }
  SupportDatum res(phi.space(), std::move(out));
  // Cross-check against the pointwise-min closed form.
  for (int pt = 0; pt < x.n(); ++pt) {
    int v = kInfiniteCodim;
    for (int y = 0; y < x.n(); ++y)
      if (x.leq(pt, y))
        v = std::min(v, theta.p(y) - std::min(a, phi.p(y)));
    if (v != res.p(pt))
      throw InvariantError("truncated residuation routes disagree at '" +
                           x.id(pt) + "'");
  }
  return res;
}

// --------------------------------------------------------------- criterion

CriterionReport check_criterion(const SupportDatum& phi) {
  const SpaceModel& x = *phi.space();
  CriterionReport rep;

  // Jump condition: p(y) - p(x) <= codim(y) - codim(x) along specializations.
  rep.jump_condition = true;
  for (int a = 0; a < x.n() && rep.jump_condition; ++a)
    for (int b = 0; b < x.n(); ++b)
      if (x.leq(a, b) && phi.p(b) - phi.p(a) > x.codim(b) - x.codim(a)) {
        rep.jump_condition = false;
        rep.witness_pair = std::make_pair(a, b);
        break;
      }

  const SupportDatum codim = SupportDatum::codim_datum(phi.space());
  rep.dual_convolution = (convolve(phi, dual_star(phi)) == codim);

  rep.residuation_exists = residuate(phi, codim).psi.has_value();

  // Level filtration: for each active n, dual levels of the two adjacent
  // sigma-truncations nest modulo level n of phi.
  rep.level_filtration = true;
  const bool small = phi.space()->n() <= 64;
  for (int n = phi.min_p() + 1; n <= phi.max_p() && rep.level_filtration; ++n) {
    const SupportDatum dual_below = dual_star(phi.sigma_leq(n - 1));
    const SupportDatum dual_at = dual_star(phi.sigma_leq(n));
    const int k_lo = std::min(dual_below.min_p(), dual_at.min_p()) - 1;
    const int k_hi = std::max(dual_below.max_p(), dual_at.max_p()) + 1;
    if (small) {
      const LevelMasks mb(dual_below), ma(dual_at), mp(phi);
      const uint64_t level_n = mp.level(n);
      for (int k = k_lo; k <= k_hi; ++k)
        if (mb.level(k) & ~(level_n | ma.level(k))) {
          rep.level_filtration = false;
          rep.witness_level = std::make_pair(n, k);
          break;
        }
      continue;
    }
    const PointSet level_n = phi.level_points(n);
    for (int k = k_lo; k <= k_hi; ++k)
      if (!dual_below.level_points(k).subset_of(level_n |
                                                dual_at.level_points(k))) {
        rep.level_filtration = false;
        rep.witness_level = std::make_pair(n, k);
        break;
      }
  }

  if (rep.jump_condition != rep.dual_convolution ||
      rep.jump_condition != rep.residuation_exists ||
      rep.jump_condition != rep.level_filtration)
    throw InvariantError(
        "criterion characterizations disagree: jump=" +
        std::to_string(rep.jump_condition) +
        " dual=" + std::to_string(rep.dual_convolution) +
        " residuation=" + std::to_string(rep.residuation_exists) +
        " filtration=" + std::to_string(rep.level_filtration));
  rep.verdict = rep.jump_condition;
  return rep;
}

}  // namespace tstruct
