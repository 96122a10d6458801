#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "tstruct/space.hpp"

namespace tstruct {

/// A family of supports on a space: a nonempty collection of closed sets,
/// closed under subsets-that-are-closed and finite unions. Such a family is
/// determined by its set of member points (itself closed): Z belongs to the
/// family iff Z is closed and contained in the member-point set.
class FamilyOfSupports {
 public:
  /// Smallest family containing the closures of the given points.
  static FamilyOfSupports from_points(SpacePtr space, const PointSet& pts);
  /// The family of all closed subsets of the space.
  static FamilyOfSupports all(SpacePtr space);
  /// The family containing only the empty set.
  static FamilyOfSupports none(SpacePtr space);

  const SpacePtr& space() const { return space_; }
  const PointSet& member_points() const { return members_; }
  bool is_empty_family() const { return members_.empty(); }

  /// Membership test; throws NotClosed on non-closed input.
  bool contains(const PointSet& z) const;

  FamilyOfSupports meet(const FamilyOfSupports& o) const;  // intersection
  FamilyOfSupports join(const FamilyOfSupports& o) const;  // union
  bool subset_of(const FamilyOfSupports& o) const;
  bool operator==(const FamilyOfSupports& o) const;

  /// Restriction {Z intersect U : Z in family} to an open subspace.
  FamilyOfSupports restrict_open(const OpenSubspace& sub) const;

 private:
  FamilyOfSupports(SpacePtr space, PointSet members)
      : space_(std::move(space)), members_(std::move(members)) {}
  SpacePtr space_;
  PointSet members_;
};

/// A support datum: a bounded, monotone assignment p of integers to points
/// (y in closure(x) implies p(y) >= p(x)), equivalently a decreasing chain of
/// families that is eventually everything / eventually empty. Level n is
/// {x : p(x) >= n}.
class SupportDatum {
 public:
  /// Validates monotonicity; throws MonotonicityError.
  SupportDatum(SpacePtr space, std::vector<int> p);

  /// Test-only factory that skips validation (negative controls).
  static SupportDatum unchecked(SpacePtr space, std::vector<int> p);

  /// The datum constant 0: every closed set at every level <= 0.
  static SupportDatum trivial(SpacePtr space);
  /// The datum p(x) = codim(x).
  static SupportDatum codim_datum(SpacePtr space);

  /// Builds a datum from explicit level sets. `levels` maps n to the points
  /// of level n; `full_below` (optional) declares every level <= that value
  /// full. Omitted levels between keys are inferred from the next key above;
  /// levels above the max key are empty. Throws NotDecreasing, NotBounded.
  static SupportDatum from_levels(SpacePtr space,
                                  const std::map<int, PointSet>& levels,
                                  std::optional<int> full_below);

  const SpacePtr& space() const { return space_; }
  int p(int i) const { return p_[i]; }
  const std::vector<int>& values() const { return p_; }
  int min_p() const;
  int max_p() const;

  PointSet level_points(int n) const;
  FamilyOfSupports level(int n) const;

  /// Truncation from above: pointwise min(p, n).
  SupportDatum sigma_leq(int n) const;

  SupportDatum meet(const SupportDatum& o) const;  // pointwise min
  SupportDatum join(const SupportDatum& o) const;  // pointwise max

  /// Levelwise containment (p <= o.p pointwise).
  bool subset_of(const SupportDatum& o) const;
  bool operator==(const SupportDatum& o) const;
  bool operator!=(const SupportDatum& o) const { return !(*this == o); }

  bool is_monotone() const;
  /// First (x, y) with y in closure(x) and p(y) < p(x), if any.
  std::optional<std::pair<int, int>> monotonicity_witness() const;

  SupportDatum restrict_open(const OpenSubspace& sub) const;

 private:
  struct Unchecked {};
  SupportDatum(SpacePtr space, std::vector<int> p, Unchecked)
      : space_(std::move(space)), p_(std::move(p)) {}
  SpacePtr space_;
  std::vector<int> p_;
};

/// Convolution: level n is the union over i+j=n of meets of levels, equally
/// the intersection over i+j=n+1 of joins; pointwise p_a + p_b. All three
/// routes are evaluated and must agree (asserted).
SupportDatum convolve(const SupportDatum& a, const SupportDatum& b);

/// Level-set routes of convolution, exposed for cross-checking.
PointSet convolve_level_union_route(const SupportDatum& a,
                                    const SupportDatum& b, int n);
PointSet convolve_level_intersection_route(const SupportDatum& a,
                                           const SupportDatum& b, int n);

/// The dual datum: level n collects the closed Z with Z meet level_k(a)
/// inside codim-level (n+k) for all k, evaluated literally over the bounded
/// active range of k (outside it the condition is implied / vacuous).
SupportDatum dual_star(const SupportDatum& a);

struct ResiduationOutcome {
  /// The unique psi with convolve(phi, psi) == theta, when it exists.
  std::optional<SupportDatum> psi;
  /// On failure: (x, y), y in closure(x), where the jump of phi exceeds the
  /// jump of theta.
  std::optional<std::pair<int, int>> witness;
};

/// Solves convolve(phi, psi) == theta for psi via the pointwise-min formula
/// p_psi(x) = min{p_theta(y) - p_phi(y) : y in closure(x)}, then verifies.
ResiduationOutcome residuate(const SupportDatum& phi, const SupportDatum& theta);

/// Truncated residuation: the constraint family is restricted to k <= a,
/// evaluated literally over the bounded window that is equivalent to the
/// unbounded evaluation. Always a valid datum for fixed a.
SupportDatum psi_truncated(const SupportDatum& phi, const SupportDatum& theta,
                           int a);

struct CriterionReport {
  bool jump_condition = false;       // pointwise jump test against codim
  bool dual_convolution = false;     // convolve(phi, dual_star(phi)) == codim
  bool residuation_exists = false;   // residuate(phi, codim) solvable
  bool level_filtration = false;     // dual levels of the sigma-truncations nest
  bool verdict = false;              // the common value (all four agree)
  std::optional<std::pair<int, int>> witness_pair;   // (x, y) for jump failure
  std::optional<std::pair<int, int>> witness_level;  // (n, k) for filtration failure
};

/// Evaluates the four equivalent characterizations of a datum defining a
/// t-structure on the coherent side; throws InvariantError if they disagree.
CriterionReport check_criterion(const SupportDatum& phi);

}  // namespace tstruct
