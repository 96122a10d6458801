#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "tstruct/complex.hpp"
#include "tstruct/field.hpp"
#include "tstruct/random.hpp"
#include "tstruct/sheaf.hpp"

using namespace tstruct;
using namespace tstruct::testutil;

namespace {
RationalField Q;

template <class F>
std::string coh_signature(const ChainComplex<F>& c) {
  std::string s;
  for (int k = c.lo(); k <= c.hi(); ++k) {
    s += std::to_string(k) + ":";
    for (int d : c.cohomology_sheaf(k).dims()) s += std::to_string(d) + ",";
    s += ";";
  }
  return s;
}
}  // namespace

TEST_CASE("bounded draws are deterministic and in range") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 200; ++i) {
    auto x = a.below(10);
    CHECK(x == b.below(10));
    CHECK(x < 10);
    if (x != c.below(10)) differs = true;
    int r = a.in_range(-2, 3);
    CHECK(r >= -2);
    CHECK(r <= 3);
    b.in_range(-2, 3);
    c.in_range(-2, 3);
  }
  CHECK(differs);
  Rng d(7);
  for (int i = 0; i < 50; ++i) CHECK(d.below(1) == 0);
}

TEST_CASE("random sheaves are valid and bounded") {
  for (const auto& s : {make_sier(), make_chain3(), make_vspace()}) {
    Rng rng(11);
    for (int i = 0; i < 30; ++i) {
      auto f = random_sheaf(s, Q, rng, 3);
      for (int d : f.dims()) CHECK(d <= 3);
      CHECK(*f.space() == *s);
    }
    Rng r1(5), r2(5);
    auto f1 = random_sheaf(s, PrimeField(2), r1, 2);
    auto f2 = random_sheaf(s, PrimeField(2), r2, 2);
    CHECK(f1.dims() == f2.dims());
  }
}

TEST_CASE("random complexes respect the degree window and vary") {
  auto s = make_sier();
  RandomComplexParams params;  // defaults: degrees [-2,2], stalks <= 3
  Rng rng(2026);
  std::set<std::string> signatures;
  for (int i = 0; i < 50; ++i) {
    auto m = random_complex(s, Q, rng, params);
    CHECK(m.lo() >= -2);
    CHECK(m.hi() <= 2);
    CHECK(m.total_dim() > 0);
    signatures.insert(coh_signature(m));
  }
  CHECK(signatures.size() >= 3);

  // Same seed, same stream of complexes.
  Rng r1(99), r2(99);
  for (int i = 0; i < 5; ++i) {
    auto m1 = random_complex(s, Q, r1, params);
    auto m2 = random_complex(s, Q, r2, params);
    CHECK(m1 == m2);
  }
}

TEST_CASE("random complexes over prime fields and larger spaces") {
  RandomComplexParams params;
  for (const auto& s : {make_chain3(), make_vspace()}) {
    Rng rng(31);
    PrimeField f5(5);
    for (int i = 0; i < 20; ++i) {
      auto m = random_complex(s, f5, rng, params);
      CHECK(m.lo() >= -2);
      CHECK(m.hi() <= 2);
      CHECK(m.total_dim() > 0);
    }
  }
}

TEST_CASE("random complexes on open subspaces") {
  auto c3 = make_chain3();
  auto sub = open_subspace(*c3, PointSet(3, {0, 1}));
  RandomComplexParams params;
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    auto m = random_complex(sub.space, Q, rng, params);
    CHECK(*m.space() == *sub.space);
    CHECK(m.total_dim() > 0);
  }
}
