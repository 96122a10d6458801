#pragma once
// Verification suites: exhaustive and seeded property checks for the support
// calculus (criterion agreement, convolution laws, residuation) and for the
// sheaf-level machinery (local-section lemmas, truncation axioms, exactness),
// reported as deterministic JSON-line records. Every suite runs through a
// shared case runner that has a serial reference path and an OpenMP path
// producing byte-identical reports.
//
// Testing builds (-DTSTRUCT_ENABLE_MUTATIONS) additionally support injected
// defects ("mutations") that must turn specific checks red; release builds
// reject mutation requests at runtime and compile none of the defect code.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tstruct/enumerate.hpp"
#include "tstruct/field.hpp"
#include "tstruct/random.hpp"
#include "tstruct/tstructure.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tstruct::verify {

// ----------------------------------------------------------------- records

enum class MutationMode { kNone, kDropMonotonicity, kBreakD2, kSigmaFlip };

inline std::string mutation_name(MutationMode m) {
  switch (m) {
    case MutationMode::kNone:
      return "none";
    case MutationMode::kDropMonotonicity:
      return "drop-monotonicity";
    case MutationMode::kBreakD2:
      return "break-d2";
    case MutationMode::kSigmaFlip:
      return "sigma-flip";
  }
  return "none";
}

inline MutationMode parse_mutation(const std::string& name) {
  if (name == "none") return MutationMode::kNone;
  if (name == "drop-monotonicity") return MutationMode::kDropMonotonicity;
  if (name == "break-d2") return MutationMode::kBreakD2;
  if (name == "sigma-flip") return MutationMode::kSigmaFlip;
  throw ValidationError("unknown mutation mode '" + name + "'");
}

inline void require_mutation_supported(MutationMode m) {
  if (m == MutationMode::kNone) return;
#ifndef TSTRUCT_ENABLE_MUTATIONS
  throw ValidationError("mutation '" + mutation_name(m) +
                        "' is only available in testing builds");
#endif
}

struct CheckRecord {
  std::string suite;
  std::string case_id;
  std::uint64_t seed = 0;
  bool pass = true;
  std::string witness;
};

inline nlohmann::json record_to_json(const CheckRecord& r) {
  nlohmann::json j;
  j["suite"] = r.suite;
  j["case_id"] = r.case_id;
  j["seed"] = r.seed;
  j["verdict"] = r.pass ? "pass" : "fail";
  j["witness"] = r.witness;
  return j;
}

inline void sort_records(std::vector<CheckRecord>& recs) {
  std::sort(recs.begin(), recs.end(),
            [](const CheckRecord& a, const CheckRecord& b) {
              if (a.suite != b.suite) return a.suite < b.suite;
              if (a.case_id != b.case_id) return a.case_id < b.case_id;
              return a.witness < b.witness;
            });
}

inline std::string report_lines(std::vector<CheckRecord> recs) {
  sort_records(recs);
  std::string out;
  for (const auto& r : recs) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

struct Summary {
  long long checks = 0;
  long long failures = 0;
};

inline Summary summarize(const std::vector<CheckRecord>& recs) {
  Summary s;
  s.checks = (long long)recs.size();
  for (const auto& r : recs)
    if (!r.pass) ++s.failures;
  return s;
}

struct SuiteOptions {
  std::uint64_t seed = 0;
  int max_points = 4;
  int max_codim = 3;
  int value_lo = -2;
  int value_hi = 3;
  /// 0 keeps each suite's published sample size; positive values scale the
  /// seeded blocks down/up for quick runs.
  int samples = 0;
  bool parallel = true;
  MutationMode mutation = MutationMode::kNone;
};

// ------------------------------------------------------------------ runner

namespace detail {

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t idx) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (idx + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::string pad(long long v, int width) {
  std::string s = std::to_string(v);
  while ((int)s.size() < width) s.insert(s.begin(), '0');
  return s;
}

/// Runs `fn(i)` for i in [0, ncases), serially or across OpenMP threads,
/// and returns the concatenated records sorted into report order. Each case
/// is independent (it derives its own seed), so both paths produce the same
/// records; exceptions become failing records instead of escaping the loop.
template <class Fn>
std::vector<CheckRecord> run_indexed(const std::string& suite, int ncases,
                                     bool parallel, Fn&& fn) {
  std::vector<std::vector<CheckRecord>> buf((size_t)std::max(ncases, 0));
  auto guarded = [&](int i) -> std::vector<CheckRecord> {
    try {
      return fn(i);
    } catch (const std::exception& e) {
      return {{suite, "case-" + pad(i, 5) + "-unhandled", 0, false,
               std::string("unhandled error: ") + e.what()}};
    } catch (...) {
      return {{suite, "case-" + pad(i, 5) + "-unhandled", 0, false,
               "unhandled non-standard exception"}};
    }
  };
  bool threaded = false;
#ifdef _OPENMP
  threaded = parallel && ncases > 1;
#else
  (void)parallel;
#endif
  if (threaded) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < ncases; ++i) buf[(size_t)i] = guarded(i);
#endif
  } else {
    for (int i = 0; i < ncases; ++i) buf[(size_t)i] = guarded(i);
  }
  std::vector<CheckRecord> out;
  for (auto& v : buf)
    for (auto& r : v) out.push_back(std::move(r));
  sort_records(out);
  return out;
}

// ------------------------------------------------------------ small tools

inline std::string datum_str(const SupportDatum& d) {
  std::string s = "(";
  for (int i = 0; i < d.space()->n(); ++i) {
    if (i) s += ",";
    s += d.space()->id(i) + ":" + std::to_string(d.p(i));
  }
  return s + ")";
}

inline std::string set_str(const SpaceModel& x, const PointSet& ps) {
  std::string s = "{";
  bool first = true;
  for (int i = 0; i < x.n(); ++i)
    if (ps.contains(i)) {
      if (!first) s += ",";
      s += x.id(i);
      first = false;
    }
  return s + "}";
}

/// Independent recomputation of the specialization-jump condition: along
/// every specialization the datum may not climb faster than the codimension.
inline bool jump_condition(const SupportDatum& d) {
  const SpaceModel& x = *d.space();
  for (int a = 0; a < x.n(); ++a)
    for (int b = 0; b < x.n(); ++b)
      if (x.leq(a, b) && d.p(b) - d.p(a) > x.codim(b) - x.codim(a))
        return false;
  return true;
}

/// The three fixed sheaf-level test spaces (value-equal to the JSON models
/// shipped under data/).
inline SpacePtr sierpinski_space() {
  return std::make_shared<SpaceModel>(
      std::vector<SpacePoint>{{"eta", 0}, {"x", 1}},
      std::vector<std::pair<std::string, std::string>>{{"eta", "x"}});
}

inline SpacePtr chain3_space() {
  return std::make_shared<SpaceModel>(
      std::vector<SpacePoint>{{"eta", 0}, {"y", 1}, {"x", 2}},
      std::vector<std::pair<std::string, std::string>>{{"eta", "y"},
                                                       {"y", "x"}});
}

inline SpacePtr two_branch_space() {
  return std::make_shared<SpaceModel>(
      std::vector<SpacePoint>{{"eta", 0}, {"a", 1}, {"b", 1}},
      std::vector<std::pair<std::string, std::string>>{{"eta", "a"},
                                                       {"eta", "b"}});
}

/// Dispatches a generic lambda on the field selected by `rational`.
template <class Fn>
void dispatch_field(bool rational, Fn&& fn) {
  if (rational)
    fn(RationalField{});
  else
    fn(PrimeField(2));
}

template <class F>
std::vector<int> coh_dims(const ChainComplex<F>& c, int k) {
  auto h = c.cohomology_sheaf(k);
  std::vector<int> dims((size_t)c.space()->n(), 0);
  for (int p = 0; p < c.space()->n(); ++p) dims[(size_t)p] = h.dim(p);
  return dims;
}

template <class F>
std::optional<std::string> coh_mismatch(const ChainComplex<F>& a,
                                        const ChainComplex<F>& b) {
  int lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi());
  for (int k = lo; k <= hi; ++k) {
    auto da = coh_dims(a, k), db = coh_dims(b, k);
    if (da != db) {
      std::string s = "cohomology differs in degree " + std::to_string(k) +
                      ": (";
      for (size_t i = 0; i < da.size(); ++i)
        s += (i ? "," : "") + std::to_string(da[i]);
      s += ") vs (";
      for (size_t i = 0; i < db.size(); ++i)
        s += (i ? "," : "") + std::to_string(db[i]);
      return s + ")";
    }
  }
  return std::nullopt;
}

template <class F>
bool coh_zero(const ChainComplex<F>& c) {
  for (int k = c.lo(); k <= c.hi(); ++k)
    if (c.cohomology_sheaf(k).total_dim() != 0) return false;
  return true;
}

#ifdef TSTRUCT_ENABLE_MUTATIONS
/// All value assignments in the window, monotone or not — the enumeration a
/// build would see if the monotonicity filter were dropped.
inline std::vector<SupportDatum> all_data_unfiltered(const SpacePtr& s, int lo,
                                                     int hi) {
  std::vector<SupportDatum> out;
  const int n = s->n();
  std::vector<int> v((size_t)n, lo);
  while (true) {
    out.push_back(SupportDatum::unchecked(s, v));
    int i = 0;
    while (i < n) {
      if (v[(size_t)i] < hi) {
        ++v[(size_t)i];
        break;
      }
      v[(size_t)i] = lo;
      ++i;
    }
    if (i == n) break;
  }
  return out;
}

/// The filtration condition evaluated with the deliberately wrong strict
/// truncation convention (lower truncation taken at n instead of n-1): both
/// duals coincide, so the nesting holds vacuously for every datum.
inline bool filtration_condition_flipped(const SupportDatum& phi) {
  for (int n = phi.min_p() + 1; n <= phi.max_p(); ++n) {
    const SupportDatum dual_below = dual_star(phi.sigma_leq(n));  // flipped
    const SupportDatum dual_at = dual_star(phi.sigma_leq(n));
    const PointSet level_n = phi.level_points(n);
    const int k_lo = std::min(dual_below.min_p(), dual_at.min_p()) - 1;
    const int k_hi = std::max(dual_below.max_p(), dual_at.max_p()) + 1;
    for (int k = k_lo; k <= k_hi; ++k)
      if (!dual_below.level_points(k).subset_of(level_n |
                                                dual_at.level_points(k)))
        return false;
  }
  return true;
}
#endif  // TSTRUCT_ENABLE_MUTATIONS

}  // namespace detail

// ------------------------------------------------- criterion agreement

/// For every enumerated space and every datum in the value window, the four
/// t-structure characterizations must return one common verdict, the datum
/// must be monotone, and the library's verdict must match an independent
/// recomputation of the jump condition.
inline std::vector<CheckRecord> run_criterion_agreement(const SuiteOptions& o) {
  require_mutation_supported(o.mutation);
  const std::string suite = "criterion-agreement";
  auto spaces = enumerate_spaces(o.max_points, o.max_codim);
  return detail::run_indexed(suite, (int)spaces.size(), o.parallel, [&](int i) {
    const SpacePtr& s = spaces[(size_t)i];
    const std::string cid = "space-" + detail::pad(i, 4);
    const std::uint64_t cs = detail::derive_seed(o.seed, (std::uint64_t)i);
    std::vector<CheckRecord> recs;

    std::vector<SupportDatum> data;
    if (o.mutation == MutationMode::kDropMonotonicity) {
#ifdef TSTRUCT_ENABLE_MUTATIONS
      data = detail::all_data_unfiltered(s, o.value_lo, o.value_hi);
#endif
    } else {
      data = enumerate_monotone_data(s, o.value_lo, o.value_hi);
    }

    const SupportDatum codim = SupportDatum::codim_datum(s);
    for (size_t di = 0; di < data.size(); ++di) {
      const SupportDatum& d = data[di];
      const std::string did = cid + "-d" + detail::pad((long long)di, 4);

      if (auto w = d.monotonicity_witness()) {
        recs.push_back({suite, did + "-monotone", cs, false,
                        "datum " + detail::datum_str(d) +
                            " climbs down along " + s->id(w->first) + " ~> " +
                            s->id(w->second)});
        continue;
      }

      if (o.mutation == MutationMode::kSigmaFlip) {
#ifdef TSTRUCT_ENABLE_MUTATIONS
        const bool jump = detail::jump_condition(d);
        const bool dualc = (convolve(d, dual_star(d)) == codim);
        const bool resid = residuate(d, codim).psi.has_value();
        const bool filt = detail::filtration_condition_flipped(d);
        if (!(jump == dualc && jump == resid && jump == filt))
          recs.push_back(
              {suite, did + "-agree", cs, false,
               "conditions disagree on " + detail::datum_str(d) + ": jump=" +
                   std::to_string(jump) + " dual=" + std::to_string(dualc) +
                   " residuation=" + std::to_string(resid) +
                   " filtration=" + std::to_string(filt)});
#endif
        continue;
      }

      try {
        const CriterionReport rep = check_criterion(d);
        if (rep.verdict != detail::jump_condition(d)) {
          recs.push_back({suite, did + "-verdict", cs, false,
                          "library verdict differs from the independent jump "
                          "recomputation on " +
                              detail::datum_str(d)});
        } else if (!rep.verdict && !rep.witness_pair) {
          recs.push_back({suite, did + "-witness", cs, false,
                          "failing datum " + detail::datum_str(d) +
                              " carries no witness pair"});
        }
      } catch (const InvariantError& e) {
        recs.push_back({suite, did + "-agree", cs, false,
                        "on " + detail::datum_str(d) + ": " + e.what()});
      }
    }

    if (recs.empty()) recs.push_back({suite, cid, cs, true, ""});
    return recs;
  });
}

// ------------------------------------------------- convolution algebra

/// Pointwise-sum identity, commutativity, unit law, distributivity over meet
/// and join, cancellation, and monotonicity of the result. Pairs run
/// exhaustively on spaces with at most three points and as seeded samples on
/// four-point spaces; triple laws run exhaustively on spaces with at most
/// two points, as seeded samples above that, and exhaustively in scalar form
/// over the whole value window (the laws are pointwise, so the scalar sweep
/// covers the per-point content of every larger instance).
inline std::vector<CheckRecord> run_convolution_algebra(const SuiteOptions& o) {
  require_mutation_supported(o.mutation);
  const std::string suite = "convolution-algebra";
  auto spaces = enumerate_spaces(o.max_points, o.max_codim);
  const int pair_sample = o.samples > 0 ? o.samples * 10 : 200;
  const int triple_sample = o.samples > 0 ? o.samples * 10 : 200;
  const int ncases = (int)spaces.size() + 1;

  return detail::run_indexed(suite, ncases, o.parallel, [&](int i) {
    const std::uint64_t cs = detail::derive_seed(o.seed, (std::uint64_t)i);
    std::vector<CheckRecord> recs;

    if (i == (int)spaces.size()) {
      // Scalar window: the per-point content of the triple laws.
      std::string bad;
      for (int a = o.value_lo; a <= o.value_hi && bad.empty(); ++a)
        for (int b = o.value_lo; b <= o.value_hi && bad.empty(); ++b)
          for (int c = o.value_lo; c <= o.value_hi; ++c) {
            bool dist_meet = a + std::min(b, c) == std::min(a + b, a + c);
            bool dist_join = a + std::max(b, c) == std::max(a + b, a + c);
            bool cancel = ((a + c <= b + c) == (a <= b));
            if (!(dist_meet && dist_join && cancel)) {
              bad = "scalar triple (" + std::to_string(a) + "," +
                    std::to_string(b) + "," + std::to_string(c) + ")";
              break;
            }
          }
      recs.push_back({suite, "scalar-window", cs, bad.empty(), bad});
      return recs;
    }

    const SpacePtr& s = spaces[(size_t)i];
    const std::string cid = "space-" + detail::pad(i, 4);
    auto data = enumerate_monotone_data(s, o.value_lo, o.value_hi);
    const int nd = (int)data.size();
    Rng rng(cs);

    // --- pairwise block: sum identity, commutativity spot checks,
    // monotone results.
    std::string pair_bad;
    auto check_pair = [&](const SupportDatum& a, const SupportDatum& b,
                          bool check_comm) {
      SupportDatum c = convolve(a, b);
      for (int x = 0; x < s->n(); ++x)
        if (c.p(x) != a.p(x) + b.p(x)) {
          pair_bad = "sum identity fails at '" + s->id(x) + "' for " +
                     detail::datum_str(a) + " * " + detail::datum_str(b);
          return;
        }
      if (!c.is_monotone()) {
        pair_bad = "convolution of monotone data is not monotone: " +
                   detail::datum_str(c);
        return;
      }
      if (check_comm && !(convolve(b, a) == c))
        pair_bad = "convolution is not commutative on " +
                   detail::datum_str(a) + " * " + detail::datum_str(b);
    };
    if (s->n() <= 3) {
      for (int ai = 0; ai < nd && pair_bad.empty(); ++ai)
        for (int bi = ai; bi < nd && pair_bad.empty(); ++bi)
          check_pair(data[(size_t)ai], data[(size_t)bi], bi < ai + 8);
    } else {
      for (int t = 0; t < pair_sample && pair_bad.empty(); ++t)
        check_pair(data[(size_t)rng.below(nd)], data[(size_t)rng.below(nd)],
                   t < 8);
    }
    recs.push_back({suite, cid + "-pairs", cs, pair_bad.empty(), pair_bad});

    // --- unit block: the everywhere-zero datum is neutral.
    const SupportDatum unit = SupportDatum::trivial(s);
    std::string unit_bad;
    for (int di = 0; di < nd && unit_bad.empty(); ++di) {
      const SupportDatum& d = data[(size_t)di];
      if (!(convolve(unit, d) == d) ||
          (di < 8 && !(convolve(d, unit) == d)))
        unit_bad = "unit law fails for " + detail::datum_str(d);
    }
    recs.push_back({suite, cid + "-unit", cs, unit_bad.empty(), unit_bad});

    // --- triple block: distributivity and cancellation through the
    // library route.
    std::string tri_bad;
    auto check_triple = [&](const SupportDatum& f, const SupportDatum& a,
                            const SupportDatum& b) {
      SupportDatum fa = convolve(f, a), fb = convolve(f, b);
      if (!(convolve(f, a.meet(b)) == fa.meet(fb))) {
        tri_bad = "meet distributivity fails for f=" + detail::datum_str(f) +
                  " a=" + detail::datum_str(a) + " b=" + detail::datum_str(b);
        return;
      }
      if (!(convolve(f, a.join(b)) == fa.join(fb))) {
        tri_bad = "join distributivity fails for f=" + detail::datum_str(f) +
                  " a=" + detail::datum_str(a) + " b=" + detail::datum_str(b);
        return;
      }
      if (fa.subset_of(fb) && !a.subset_of(b))
        tri_bad = "cancellation fails for f=" + detail::datum_str(f) +
                  " a=" + detail::datum_str(a) + " b=" + detail::datum_str(b);
    };
    if (s->n() <= 2) {
      for (int fi = 0; fi < nd && tri_bad.empty(); ++fi)
        for (int ai = 0; ai < nd && tri_bad.empty(); ++ai)
          for (int bi = 0; bi < nd && tri_bad.empty(); ++bi)
            check_triple(data[(size_t)fi], data[(size_t)ai],
                         data[(size_t)bi]);
    } else {
      for (int t = 0; t < triple_sample && tri_bad.empty(); ++t) {
        const SupportDatum& f = data[(size_t)rng.below(nd)];
        const SupportDatum& a = data[(size_t)rng.below(nd)];
        const SupportDatum& b = data[(size_t)rng.below(nd)];
        check_triple(f, a, b);
        if (tri_bad.empty()) check_triple(f, a, a.join(b));
      }
    }
    recs.push_back({suite, cid + "-triples", cs, tri_bad.empty(), tri_bad});

    return recs;
  });
}

// ------------------------------------------------------- residuation

/// Division facts: the solver finds the unique factor exactly when the jump
/// inequality allows one, the returned factor convolves back exactly, window
/// enumeration finds no second solution, and the dual swaps the zero datum
/// with the codimension datum on every space.
inline std::vector<CheckRecord> run_residuation(const SuiteOptions& o) {
  require_mutation_supported(o.mutation);
  const std::string suite = "residuation";
  auto spaces = enumerate_spaces(o.max_points, o.max_codim);
  const int pair_sample = o.samples > 0 ? o.samples * 10 : 500;

  return detail::run_indexed(suite, (int)spaces.size(), o.parallel, [&](int i) {
    const SpacePtr& s = spaces[(size_t)i];
    const std::string cid = "space-" + detail::pad(i, 4);
    const std::uint64_t cs = detail::derive_seed(o.seed, (std::uint64_t)i);
    std::vector<CheckRecord> recs;
    auto data = enumerate_monotone_data(s, o.value_lo, o.value_hi);
    const int nd = (int)data.size();
    const int n = s->n();
    Rng rng(cs);

    // Independent form of the existence test: the jump of phi never exceeds
    // the jump of theta along any specialization.
    auto exists_pred = [&](const SupportDatum& f, const SupportDatum& t) {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (s->leq(a, b) && f.p(b) - f.p(a) > t.p(b) - t.p(a)) return false;
      return true;
    };

    std::string solve_bad;
    auto check_solve = [&](const SupportDatum& f, const SupportDatum& t) {
      auto out = residuate(f, t);
      const bool want = exists_pred(f, t);
      if (out.psi.has_value() != want) {
        solve_bad = "solvability mismatch for phi=" + detail::datum_str(f) +
                    " theta=" + detail::datum_str(t) + ": solver says " +
                    (out.psi ? "yes" : "no");
        return;
      }
      if (out.psi) {
        if (!(convolve(f, *out.psi) == t)) {
          solve_bad = "returned factor does not convolve back for phi=" +
                      detail::datum_str(f) + " theta=" + detail::datum_str(t);
          return;
        }
        if (!out.psi->is_monotone())
          solve_bad = "returned factor is not monotone for phi=" +
                      detail::datum_str(f) + " theta=" + detail::datum_str(t);
      } else {
        if (!out.witness) {
          solve_bad = "no-solution outcome carries no witness for phi=" +
                      detail::datum_str(f) + " theta=" + detail::datum_str(t);
          return;
        }
        auto [a, b] = *out.witness;
        if (!s->leq(a, b) || f.p(b) - f.p(a) <= t.p(b) - t.p(a))
          solve_bad = "witness pair does not violate the jump inequality for "
                      "phi=" +
                      detail::datum_str(f) + " theta=" + detail::datum_str(t);
      }
    };
    if (n <= 3) {
      for (int fi = 0; fi < nd && solve_bad.empty(); ++fi)
        for (int ti = 0; ti < nd && solve_bad.empty(); ++ti)
          check_solve(data[(size_t)fi], data[(size_t)ti]);
    } else {
      for (int t = 0; t < pair_sample && solve_bad.empty(); ++t)
        check_solve(data[(size_t)rng.below(nd)], data[(size_t)rng.below(nd)]);
    }
    recs.push_back({suite, cid + "-solve", cs, solve_bad.empty(), solve_bad});

    // Uniqueness by enumeration over the full candidate window.
    std::string uniq_bad;
    auto check_unique = [&](const SupportDatum& f, const SupportDatum& t) {
      const int lo = t.min_p() - f.max_p(), hi = t.max_p() - f.min_p();
      int found = 0;
      std::vector<int> v((size_t)n, lo);
      while (true) {
        bool sum_ok = true, mono = true;
        for (int x = 0; x < n && sum_ok; ++x)
          if (f.p(x) + v[(size_t)x] != t.p(x)) sum_ok = false;
        if (sum_ok) {
          for (int a = 0; a < n && mono; ++a)
            for (int b = 0; b < n && mono; ++b)
              if (s->lt(a, b) && v[(size_t)b] < v[(size_t)a]) mono = false;
          if (mono) {
            SupportDatum cand(s, v);
            if (convolve(f, cand) == t) ++found;
          }
        }
        int ix = 0;
        while (ix < n) {
          if (v[(size_t)ix] < hi) {
            ++v[(size_t)ix];
            break;
          }
          v[(size_t)ix] = lo;
          ++ix;
        }
        if (ix == n) break;
      }
      const int want = exists_pred(f, t) ? 1 : 0;
      if (found != want)
        uniq_bad = "enumeration finds " + std::to_string(found) +
                   " factors (want " + std::to_string(want) + ") for phi=" +
                   detail::datum_str(f) + " theta=" + detail::datum_str(t);
    };
    if (n <= 2) {
      for (int fi = 0; fi < nd && uniq_bad.empty(); ++fi)
        for (int ti = 0; ti < nd && uniq_bad.empty(); ++ti)
          check_unique(data[(size_t)fi], data[(size_t)ti]);
    } else {
      const int uniq_sample =
          o.samples > 0 ? o.samples : (n == 3 ? 100 : 5);
      for (int t = 0; t < uniq_sample && uniq_bad.empty(); ++t)
        check_unique(data[(size_t)rng.below(nd)],
                     data[(size_t)rng.below(nd)]);
    }
    recs.push_back({suite, cid + "-unique", cs, uniq_bad.empty(), uniq_bad});

    // Dual involution on the two distinguished data.
    const SupportDatum unit = SupportDatum::trivial(s);
    const SupportDatum codim = SupportDatum::codim_datum(s);
    std::string dual_bad;
    if (!(dual_star(unit) == codim))
      dual_bad = "dual of the zero datum is not the codimension datum";
    else if (!(dual_star(codim) == unit))
      dual_bad = "dual of the codimension datum is not the zero datum";
    recs.push_back({suite, cid + "-dual", cs, dual_bad.empty(), dual_bad});

    return recs;
  });
}

// ------------------------------------------------------ sheaf lemmas

/// Local-section functor facts on the two fixed spaces, against seeded
/// random complexes: composing supported-section functors equals the functor
/// of the intersection; below the bottom cohomology degree nothing appears
/// and at the bottom degree the sections of the cohomology match; pushing
/// forward commutes with taking supported sections.
inline std::vector<CheckRecord> run_sheaf_lemmas(const SuiteOptions& o) {
  require_mutation_supported(o.mutation);
  const std::string suite = "sheaf-lemmas";
  const int samples = o.samples > 0 ? o.samples : 20;
  std::vector<std::pair<std::string, SpacePtr>> spaces = {
      {"sier", detail::sierpinski_space()},
      {"chain3", detail::chain3_space()}};
  const int ncases = (int)spaces.size() * samples;

  return detail::run_indexed(suite, ncases, o.parallel, [&](int idx) {
    const int si = idx / samples, i = idx % samples;
    const auto& [sname, s] = spaces[(size_t)si];
    const std::string cid = sname + "-" + detail::pad(i, 3);
    const std::uint64_t cs = detail::derive_seed(o.seed, (std::uint64_t)idx);
    std::vector<CheckRecord> recs;
    Rng rng(cs);

    detail::dispatch_field(i % 5 == 4, [&](auto field) {
      using F = decltype(field);
      auto m = random_complex<F>(s, field, rng, {});
      auto rep = injective_replacement(m);
      const auto closed = s->closed_subsets();

      // Lemma block 1: nested supported sections equal the intersection.
      std::string bad1;
      for (const auto& w2 : closed) {
        auto inner = gamma_w_subcomplex(rep.complex, w2).complex;
        for (const auto& w1 : closed) {
          auto lhs = gamma_w_subcomplex(inner, w1).complex;
          auto rhs = gamma_w_subcomplex(rep.complex, w1 & w2).complex;
          if (auto bad = detail::coh_mismatch(lhs, rhs)) {
            bad1 = "W=" + detail::set_str(*s, w1) + " W'=" +
                   detail::set_str(*s, w2) + ": " + *bad;
            break;
          }
        }
        if (!bad1.empty()) break;
      }
      recs.push_back({suite, cid + "-compose", cs, bad1.empty(), bad1});

      // Lemma block 2: bottom-degree behaviour. Find the lowest degree with
      // nonzero cohomology; below it the supported sections must vanish, and
      // at it they must equal the supported sections of the cohomology.
      std::string bad2;
      std::optional<int> n0;
      for (int k = m.lo(); k <= m.hi(); ++k)
        if (m.cohomology_sheaf(k).total_dim() != 0) {
          n0 = k;
          break;
        }
      if (n0) {
        auto h0 = ChainComplex<F>::from_sheaf(m.cohomology_sheaf(*n0), *n0);
        for (const auto& w : closed) {
          auto rg = gamma_w_subcomplex(rep.complex, w).complex;
          for (int j = rg.lo(); j < *n0; ++j)
            if (rg.cohomology_sheaf(j).total_dim() != 0) {
              bad2 = "W=" + detail::set_str(*s, w) +
                     ": sections appear in degree " + std::to_string(j) +
                     " below the bottom degree " + std::to_string(*n0);
              break;
            }
          if (bad2.empty()) {
            auto want = gamma_w_subcomplex(h0, w).complex;
            auto got_dims = detail::coh_dims(rg, *n0);
            auto want_dims = detail::coh_dims(want, *n0);
            if (got_dims != want_dims)
              bad2 = "W=" + detail::set_str(*s, w) +
                     ": bottom-degree sections differ from the sections of "
                     "the bottom cohomology";
          }
          if (!bad2.empty()) break;
        }
      }
      recs.push_back({suite, cid + "-bottom", cs, bad2.empty(), bad2});

      // Lemma block 3: pushforward commutes with supported sections.
      std::string bad3;
      for (const auto& z : closed) {
        PointSet u = z.complement();
        if (u.empty()) continue;
        auto sub = open_subspace(*s, u);
        auto mu = restrict_complex(m, sub);
        auto rep_u = injective_replacement(mu);
        auto push_m = r_pushforward(sub, mu);
        auto rep_push = injective_replacement(push_m);
        for (const auto& w : closed) {
          PointSet wu(sub.space->n());
          for (int p = 0; p < sub.space->n(); ++p)
            if (w.contains(sub.to_parent[(size_t)p])) wu.add(p);
          auto lhs = r_pushforward(
              sub, gamma_w_subcomplex(rep_u.complex, wu).complex);
          auto rhs = gamma_w_subcomplex(rep_push.complex, w).complex;
          if (auto bad = detail::coh_mismatch(lhs, rhs)) {
            bad3 = "U=" + detail::set_str(*s, u) + " W=" +
                   detail::set_str(*s, w) + ": " + *bad;
            break;
          }
        }
        if (!bad3.empty()) break;
      }
      recs.push_back({suite, cid + "-pushforward", cs, bad3.empty(), bad3});
    });

    return recs;
  });
}

// --------------------------------------------------- t-structure axioms

/// Truncation behaves like a t-structure on the three fixed spaces for the
/// zero datum, the codimension datum, and the doubled-codimension datum:
/// truncation succeeds with valid certificates, morphism complexes between
/// produced pieces vanish in degrees <= 0, the cone of the connecting map
/// recovers the upper piece, truncation is idempotent on both pieces, and
/// for the zero datum it agrees with standard truncation.
inline std::vector<CheckRecord> run_tstructure_axioms(const SuiteOptions& o) {
  require_mutation_supported(o.mutation);
  const std::string suite = "t-structure-axioms";
  const int samples = o.samples > 0 ? o.samples : 50;
  std::vector<std::pair<std::string, SpacePtr>> spaces = {
      {"sier", detail::sierpinski_space()},
      {"chain3", detail::chain3_space()},
      {"branch", detail::two_branch_space()}};
  const char* dnames[3] = {"trv", "cdm", "gap"};
  const int per_space = 3 * samples;
  int ncases = (int)spaces.size() * per_space;
  const bool probe = o.mutation == MutationMode::kBreakD2;
  if (probe) ++ncases;

  return detail::run_indexed(suite, ncases, o.parallel, [&](int idx) {
    const std::uint64_t cs = detail::derive_seed(o.seed, (std::uint64_t)idx);
    std::vector<CheckRecord> recs;

    if (probe && idx == ncases - 1) {
#ifdef TSTRUCT_ENABLE_MUTATIONS
      // Injected defect: a three-term "complex" whose consecutive
      // differentials are both the identity. The raw square check must flag
      // it and the complex constructor must refuse it.
      auto s = detail::sierpinski_space();
      PrimeField f2(2);
      auto kx = Sheaf<PrimeField>::constant(s, f2);
      std::vector<Matrix<PrimeField>> mats;
      for (int p = 0; p < s->n(); ++p)
        mats.push_back(Matrix<PrimeField>::identity(f2, kx.dim(p)));
      Morphism<PrimeField> d(kx, kx, mats);
      auto sq = d.after(d);
      std::string w;
      if (!sq.is_zero())
        for (int p = 0; p < s->n(); ++p)
          if (!sq.at(p).is_zero()) {
            w = "composite of consecutive differentials is nonzero at '" +
                s->id(p) + "'";
            break;
          }
      recs.push_back({suite, "mutation-d2-probe", cs, w.empty(), w});
      bool rejected = false;
      try {
        ChainComplex<PrimeField> c(0, {kx, kx, kx}, {d, d});
      } catch (const ValidationError&) {
        rejected = true;
      }
      recs.push_back({suite, "mutation-d2-rejected", cs, rejected,
                      rejected ? ""
                               : "constructor accepted a non-complex"});
#endif
      return recs;
    }

    const int si = idx / per_space;
    const int dj = (idx % per_space) / samples;
    const int i = idx % samples;
    const auto& [sname, s] = spaces[(size_t)si];
    const SupportDatum codim = SupportDatum::codim_datum(s);
    const SupportDatum phi = dj == 0   ? SupportDatum::trivial(s)
                             : dj == 1 ? codim
                                       : convolve(codim, codim);
    const std::string cid =
        sname + "-" + dnames[dj] + "-" + detail::pad(i, 3);
    const int n = (i % 3) - 1;
    Rng rng(cs);

    detail::dispatch_field(i % 4 == 3, [&](auto field) {
      using F = decltype(field);
      auto m = random_complex<F>(s, field, rng, {});

      // truncate_t validates its own certificates and throws on any defect;
      // a throw surfaces as a failing record through the case runner.
      TruncationPieces<F> tr = truncate_t(m, phi, n);
      recs.push_back({suite, cid + "-trunc", cs, true, ""});

      // Morphism-complex vanishing in degrees <= 0 between the pieces.
      std::string rhom_bad;
      auto vc = rhom(tr.lt, tr.geq);
      for (int j = vc.lo(); j <= 0; ++j)
        if (vc.h_dim(j) != 0) {
          rhom_bad = "maps of degree " + std::to_string(j) +
                     " exist between the pieces (dim " +
                     std::to_string(vc.h_dim(j)) + ")";
          break;
        }
      recs.push_back({suite, cid + "-rhom", cs, rhom_bad.empty(), rhom_bad});

      // Cross-pair sampling: pieces of two different complexes, same datum
      // and cut, must also have no maps in degrees <= 0.
      if (i % 3 == 1) {
        auto m2 = random_complex<F>(s, field, rng, {});
        auto tr2 = truncate_t(m2, phi, n);
        std::string xbad;
        auto vx = rhom(tr2.lt, tr.geq);
        for (int j = vx.lo(); j <= 0; ++j)
          if (vx.h_dim(j) != 0) {
            xbad = "maps of degree " + std::to_string(j) +
                   " exist across complexes (dim " +
                   std::to_string(vx.h_dim(j)) + ")";
            break;
          }
        recs.push_back({suite, cid + "-xrhom", cs, xbad.empty(), xbad});
      }

      // Cone of the connecting map recovers the upper piece.
      auto c = cone(tr.from_lt);
      std::string cone_bad;
      if (auto bad = detail::coh_mismatch(c.cone, tr.geq)) cone_bad = *bad;
      recs.push_back({suite, cid + "-cone", cs, cone_bad.empty(), cone_bad});

      // Idempotence on both pieces.
      std::string idem_bad;
      auto up2 = truncate_t(tr.geq, phi, n);
      if (!detail::coh_zero(up2.lt))
        idem_bad = "re-truncating the upper piece sheds a lower part";
      else if (auto bad = detail::coh_mismatch(up2.geq, tr.geq))
        idem_bad = "upper piece moves under re-truncation: " + *bad;
      if (idem_bad.empty()) {
        auto lo2 = truncate_t(tr.lt, phi, n);
        if (!detail::coh_zero(lo2.geq))
          idem_bad = "re-truncating the lower piece sheds an upper part";
        else if (auto bad = detail::coh_mismatch(lo2.lt, tr.lt))
          idem_bad = "lower piece moves under re-truncation: " + *bad;
      }
      recs.push_back({suite, cid + "-idem", cs, idem_bad.empty(), idem_bad});

      // For the zero datum the output is the standard truncation.
      if (dj == 0) {
        std::string std_bad;
        for (int k = m.lo() - 1; k <= m.hi() + 1 && std_bad.empty(); ++k) {
          auto want_lt = k < n ? detail::coh_dims(m, k)
                               : std::vector<int>((size_t)s->n(), 0);
          auto want_geq = k >= n ? detail::coh_dims(m, k)
                                 : std::vector<int>((size_t)s->n(), 0);
          if (detail::coh_dims(tr.lt, k) != want_lt)
            std_bad = "lower piece differs from standard truncation in "
                      "degree " +
                      std::to_string(k);
          else if (detail::coh_dims(tr.geq, k) != want_geq)
            std_bad = "upper piece differs from standard truncation in "
                      "degree " +
                      std::to_string(k);
        }
        recs.push_back({suite, cid + "-std", cs, std_bad.empty(), std_bad});
      }
    });

    return recs;
  });
}

// -------------------------------------------------------- exactness

/// Taking sections with support in any closed subset preserves both halves
/// of the codimension-datum decomposition, with members produced by the
/// truncation itself.
inline std::vector<CheckRecord> run_exactness(const SuiteOptions& o) {
  require_mutation_supported(o.mutation);
  const std::string suite = "exactness";
  const int samples = o.samples > 0 ? o.samples : 20;
  std::vector<std::pair<std::string, SpacePtr>> spaces = {
      {"sier", detail::sierpinski_space()},
      {"chain3", detail::chain3_space()},
      {"branch", detail::two_branch_space()}};
  const int ncases = (int)spaces.size() * samples;

  return detail::run_indexed(suite, ncases, o.parallel, [&](int idx) {
    const int si = idx / samples, i = idx % samples;
    const auto& [sname, s] = spaces[(size_t)si];
    const std::string cid = sname + "-" + detail::pad(i, 3);
    const std::uint64_t cs = detail::derive_seed(o.seed, (std::uint64_t)idx);
    std::vector<CheckRecord> recs;
    Rng rng(cs);
    const SupportDatum codim = SupportDatum::codim_datum(s);

    detail::dispatch_field(i % 4 == 3, [&](auto field) {
      using F = decltype(field);
      auto m = random_complex<F>(s, field, rng, {});
      auto upper = truncate_t(m, codim, 0).geq;
      auto lower = truncate_t(m, codim, 1).lt;
      auto rep_up = injective_replacement(upper);
      auto rep_lo = injective_replacement(lower);

      std::string up_bad, lo_bad;
      for (const auto& z : s->closed_subsets()) {
        if (up_bad.empty()) {
          auto g = gamma_w_subcomplex(rep_up.complex, z).complex;
          if (!in_geq(g, codim, 0))
            up_bad = "upper piece leaves the upper class after sections "
                     "with support in " +
                     detail::set_str(*s, z);
        }
        if (lo_bad.empty()) {
          auto g = gamma_w_subcomplex(rep_lo.complex, z).complex;
          if (!in_leq(g, codim, 0))
            lo_bad = "lower piece leaves the lower class after sections "
                     "with support in " +
                     detail::set_str(*s, z);
        }
      }
      recs.push_back({suite, cid + "-upper", cs, up_bad.empty(), up_bad});
      recs.push_back({suite, cid + "-lower", cs, lo_bad.empty(), lo_bad});
    });

    return recs;
  });
}

// -------------------------------------------------------- dispatch

inline std::vector<std::string> suite_names() {
  return {"criterion-agreement", "convolution-algebra", "residuation",
          "sheaf-lemmas",        "t-structure-axioms",  "exactness"};
}

inline std::vector<CheckRecord> run_suite(const std::string& name,
                                          const SuiteOptions& o) {
  if (name == "criterion-agreement") return run_criterion_agreement(o);
  if (name == "convolution-algebra") return run_convolution_algebra(o);
  if (name == "residuation") return run_residuation(o);
  if (name == "sheaf-lemmas") return run_sheaf_lemmas(o);
  if (name == "t-structure-axioms") return run_tstructure_axioms(o);
  if (name == "exactness") return run_exactness(o);
  if (name == "all") {
    std::vector<CheckRecord> out;
    for (const auto& n : suite_names()) {
      auto part = run_suite(n, o);
      out.insert(out.end(), std::make_move_iterator(part.begin()),
                 std::make_move_iterator(part.end()));
    }
    sort_records(out);
    return out;
  }
  throw ValidationError("unknown suite '" + name + "'");
}

}  // namespace tstruct::verify
