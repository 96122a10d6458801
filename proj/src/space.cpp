#include "tstruct/space.hpp"

#include <algorithm>

#include "tstruct/errors.hpp"

namespace tstruct {

SpaceModel::SpaceModel(
    std::vector<SpacePoint> points,
    const std::vector<std::pair<std::string, std::string>>& edges)
    : pts_(std::move(points)) {
  if (pts_.empty()) throw ValidationError("space must have at least one point");
  for (int i = 0; i < n(); ++i) {
    if (pts_[i].id.empty()) throw ValidationError("empty point id");
    if (pts_[i].codim < 0)
      throw CodimError("negative codim at point '" + pts_[i].id + "'");
    if (!index_.emplace(pts_[i].id, i).second)
      throw DuplicatePoint("duplicate point id '" + pts_[i].id + "'");
    max_codim_ = std::max(max_codim_, pts_[i].codim);
  }

  leq_.assign(n(), std::vector<bool>(n(), false));
  for (int i = 0; i < n(); ++i) leq_[i][i] = true;
  for (const auto& [a, b] : edges) leq_[index(a)][index(b)] = true;

  // Reflexive-transitive closure (Floyd-Warshall on the boolean relation).
  for (int k = 0; k < n(); ++k)
    for (int i = 0; i < n(); ++i)
      if (leq_[i][k])
        for (int j = 0; j < n(); ++j)
          if (leq_[k][j]) leq_[i][j] = true;

  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j) {
      if (i != j && leq_[i][j] && leq_[j][i])
        throw CycleError("specialization cycle through '" + pts_[i].id +
                         "' and '" + pts_[j].id + "'");
      if (i != j && leq_[i][j] && pts_[i].codim >= pts_[j].codim)
        throw CodimError("codim not strictly increasing from '" + pts_[i].id +
                         "' to its specialization '" + pts_[j].id + "'");
    }
}

int SpaceModel::index(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw UnknownPoint("unknown point id '" + id + "'");
  return it->second;
}

PointSet SpaceModel::closure(int p) const {
  PointSet s(n());
  for (int j = 0; j < n(); ++j)
    if (leq_[p][j]) s.add(j);
  return s;
}

PointSet SpaceModel::closure(const PointSet& s) const {
  PointSet r(n());
  for (int i = 0; i < n(); ++i)
    if (s.contains(i))
      for (int j = 0; j < n(); ++j)
        if (leq_[i][j]) r.add(j);
  return r;
}

PointSet SpaceModel::generizations(int p) const {
  PointSet s(n());
  for (int j = 0; j < n(); ++j)
    if (leq_[j][p]) s.add(j);
  return s;
}

int SpaceModel::codim_of_set(const PointSet& s) const {
  int c = kInfiniteCodim;
  for (int i = 0; i < n(); ++i)
    if (s.contains(i)) c = std::min(c, pts_[i].codim);
  return c;
}

std::vector<int> SpaceModel::irreducible_components(const PointSet& z) const {
  if (!is_closed(z)) throw NotClosed("irreducible_components needs a closed set");
  std::vector<int> mins;
  for (int i = 0; i < n(); ++i) {
    if (!z.contains(i)) continue;
    bool minimal = true;
    for (int j = 0; j < n(); ++j)
      if (z.contains(j) && lt(j, i)) {
        minimal = false;
        break;
      }
    if (minimal) mins.push_back(i);
  }
  return mins;
}

std::vector<PointSet> SpaceModel::closed_subsets() const {
  if (n() > 20)
    throw ValidationError("closed_subsets is a desk-scale helper (max 20 points)");
  std::vector<PointSet> out;
  for (uint32_t mask = 0; mask < (uint32_t(1) << n()); ++mask) {
    PointSet s(n());
    for (int i = 0; i < n(); ++i)
      if ((mask >> i) & 1u) s.add(i);
    if (is_closed(s)) out.push_back(s);
  }
  return out;
}

bool SpaceModel::pts_same(const SpaceModel& o) const {
  if (pts_.size() != o.pts_.size()) return false;
  for (size_t i = 0; i < pts_.size(); ++i)
    if (pts_[i].id != o.pts_[i].id || pts_[i].codim != o.pts_[i].codim)
      return false;
  return true;
}

void require_same_space(const SpaceModel& a, const SpaceModel& b,
                        const char* what) {
  if (&a == &b) return;
  if (a != b)
    throw SpaceMismatch(std::string(what) + ": operands live over different spaces");
}

OpenSubspace open_subspace(const SpaceModel& x, const PointSet& u) {
  if (!x.is_open(u)) throw NotOpen("open_subspace needs an open subset");
  if (u.empty()) throw ValidationError("open_subspace needs a nonempty subset");
  OpenSubspace res;
  res.from_parent.assign(x.n(), -1);
  std::vector<SpacePoint> pts;
  for (int i = 0; i < x.n(); ++i)
    if (u.contains(i)) {
      res.from_parent[i] = int(pts.size());
      res.to_parent.push_back(i);
      pts.push_back({x.id(i), x.codim(i)});
    }
  std::vector<std::pair<std::string, std::string>> edges;
  for (int a : res.to_parent)
    for (int b : res.to_parent)
      if (a != b && x.leq(a, b)) edges.emplace_back(x.id(a), x.id(b));
  res.space = std::make_shared<SpaceModel>(std::move(pts), edges);
  res.parent = std::make_shared<SpaceModel>(x);
  return res;
}

}  // namespace tstruct
