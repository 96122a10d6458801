#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tstruct/space.hpp"
#include "tstruct/support.hpp"

namespace tstruct {

/// Every space model on exactly m labeled points "p0".."p{m-1}": all acyclic
/// specialization relations (deduplicated after transitive closure) paired
/// with every codimension vector in [0, max_codim] that increases strictly
/// along specializations.  Deterministic order; desk scale (m <= 5 or so).
inline std::vector<SpacePtr> enumerate_spaces_exact(int m, int max_codim) {
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) slots.emplace_back(i, j);
  std::set<std::string> seen;
  std::vector<SpacePtr> out;
  for (long long mask = 0; mask < (1LL << slots.size()); ++mask) {
    std::vector<std::vector<bool>> r(size_t(m), std::vector<bool>(m, false));
    for (size_t t = 0; t < slots.size(); ++t)
      if (mask >> t & 1) r[size_t(slots[t].first)][size_t(slots[t].second)] = true;
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i)
        if (r[size_t(i)][size_t(k)])
          for (int j = 0; j < m; ++j)
            if (r[size_t(k)][size_t(j)]) r[size_t(i)][size_t(j)] = true;
    bool cyclic = false;
    for (int i = 0; i < m && !cyclic; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j && r[size_t(i)][size_t(j)] && r[size_t(j)][size_t(i)])
          cyclic = true;
    if (cyclic) continue;
    std::string rel;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        rel += (i != j && r[size_t(i)][size_t(j)]) ? '1' : '0';

    int total = 1;
    for (int i = 0; i < m; ++i) total *= max_codim + 1;
    for (int code = 0; code < total; ++code) {
      std::vector<int> c(m);
      int rest = code;
      for (int i = 0; i < m; ++i) {
        c[size_t(i)] = rest % (max_codim + 1);
        rest /= (max_codim + 1);
      }
      bool ok = true;
      for (int i = 0; i < m && ok; ++i)
        for (int j = 0; j < m; ++j)
          if (i != j && r[size_t(i)][size_t(j)] && c[size_t(j)] <= c[size_t(i)]) {
            ok = false;
            break;
          }
      if (!ok) continue;
      std::string key = rel + "|";
      for (int i = 0; i < m; ++i) key += std::to_string(c[size_t(i)]) + ",";
      if (!seen.insert(key).second) continue;

      std::vector<SpacePoint> pts(m);
      std::vector<std::pair<std::string, std::string>> edges;
      for (int i = 0; i < m; ++i)
        pts[size_t(i)] = {"p" + std::to_string(i), c[size_t(i)]};
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          if (i != j && r[size_t(i)][size_t(j)])
            edges.emplace_back(pts[size_t(i)].id, pts[size_t(j)].id);
      out.push_back(std::make_shared<SpaceModel>(std::move(pts), edges));
    }
  }
  return out;
}

/// The cumulative window: every space with 1..max_points points.
inline std::vector<SpacePtr> enumerate_spaces(int max_points, int max_codim) {
  std::vector<SpacePtr> out;
  for (int m = 1; m <= max_points; ++m) {
    auto part = enumerate_spaces_exact(m, max_codim);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

/// Every monotone support datum on the space with values in [lo, hi], in
/// deterministic (odometer) order.
inline std::vector<SupportDatum> enumerate_monotone_data(const SpacePtr& space,
                                                         int lo, int hi) {
  const int m = space->n();
  const int width = hi - lo + 1;
  long long total = 1;
  for (int i = 0; i < m; ++i) total *= width;
  std::vector<SupportDatum> out;
  for (long long code = 0; code < total; ++code) {
    std::vector<int> p(m);
    long long rest = code;
    for (int i = 0; i < m; ++i) {
      p[size_t(i)] = lo + int(rest % width);
      rest /= width;
    }
    bool mono = true;
    for (int i = 0; i < m && mono; ++i)
      for (int j = 0; j < m; ++j)
        if (space->lt(i, j) && p[size_t(j)] < p[size_t(i)]) {
          mono = false;
          break;
        }
    if (mono) out.emplace_back(space, std::move(p));
  }
  return out;
}

}  // namespace tstruct
