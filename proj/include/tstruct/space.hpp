#pragma once

#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tstruct/point_set.hpp"

namespace tstruct {

/// Codimension reported for the empty set.
constexpr int kInfiniteCodim = std::numeric_limits<int>::max();

struct SpacePoint {
  std::string id;
  int codim = 0;
};

/// Finite topological space presented as a specialization poset.
///
/// Convention: `leq(a, b)` holds iff b lies in the closure of a (b is a
/// specialization of a; a is at least as generic). Closed sets are the
/// specialization-closed ones; open sets are their complements. Each point
/// carries a codimension, strictly increasing along strict specializations.
class SpaceModel {
 public:
  /// `edges` lists pairs (a, b) meaning "b specializes a". The relation is
  /// closed reflexively/transitively. Throws DuplicatePoint, UnknownPoint,
  /// CycleError, CodimError.
  SpaceModel(std::vector<SpacePoint> points,
             const std::vector<std::pair<std::string, std::string>>& edges);

  int n() const { return int(pts_.size()); }
  const std::string& id(int i) const { return pts_[i].id; }
  int codim(int i) const { return pts_[i].codim; }
  int max_codim() const { return max_codim_; }
  /// Index of a point id; throws UnknownPoint.
  int index(const std::string& id) const;
  bool has_id(const std::string& id) const { return index_.count(id) > 0; }

  bool leq(int a, int b) const { return leq_[a][b]; }
  /// Strict specialization: b in closure(a), b != a.
  bool lt(int a, int b) const { return a != b && leq_[a][b]; }

  PointSet closure(int p) const;
  PointSet closure(const PointSet& s) const;
  /// Points q with p in closure(q): the minimal open neighborhood of p.
  PointSet generizations(int p) const;

  bool is_closed(const PointSet& s) const { return closure(s) == s; }
  bool is_open(const PointSet& s) const { return is_closed(s.complement()); }

  /// Min codim over the set; kInfiniteCodim for the empty set.
  int codim_of_set(const PointSet& s) const;

  /// Minimal (most generic) points of a closed set; throws NotClosed.
  std::vector<int> irreducible_components(const PointSet& z) const;

  /// All specialization-closed subsets, in increasing bitmask order.
  /// Desk-scale helper; refuses spaces with more than 20 points.
  std::vector<PointSet> closed_subsets() const;

  bool operator==(const SpaceModel& o) const {
    return pts_same(o) && leq_ == o.leq_;
  }
  bool operator!=(const SpaceModel& o) const { return !(*this == o); }

  PointSet empty_set() const { return PointSet(n()); }
  PointSet full_set() const { return PointSet::full(n()); }

 private:
  bool pts_same(const SpaceModel& o) const;

  std::vector<SpacePoint> pts_;
  std::map<std::string, int> index_;
  std::vector<std::vector<bool>> leq_;
  int max_codim_ = 0;
};

using SpacePtr = std::shared_ptr<const SpaceModel>;

/// Throws SpaceMismatch unless both objects live over equal space models.
void require_same_space(const SpaceModel& a, const SpaceModel& b,
                        const char* what);

/// Open subspace with index translation back to the ambient space.
struct OpenSubspace {
  SpacePtr space;                // the subspace as a model of its own
  SpacePtr parent;               // the ambient space (a value-equal copy)
  std::vector<int> to_parent;    // subspace index -> ambient index
  std::vector<int> from_parent;  // ambient index -> subspace index or -1
};

/// Restricts to an open subset (codims inherited); throws NotOpen.
OpenSubspace open_subspace(const SpaceModel& x, const PointSet& u);

}  // namespace tstruct
