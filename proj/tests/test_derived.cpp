#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "test_util.hpp"
#include "tstruct/complex.hpp"
#include "tstruct/derived.hpp"
#include "tstruct/errors.hpp"
#include "tstruct/field.hpp"
#include "tstruct/sheaf.hpp"

using namespace tstruct;
using namespace tstruct::testutil;

using QS = Sheaf<RationalField>;
using QC = ChainComplex<RationalField>;
using QMap = ChainMap<RationalField>;
using QMor = Morphism<RationalField>;

namespace {
RationalField Q;

using Dims = std::vector<int>;

// Fixtures on the two-point chain ("eta" open, "x" closed):
//   kX = constant sheaf, kx = skyscraper at x, jk = extension by zero from
//   the open point.  jshriek is jk placed in degree 0; two_term is the
//   quasi-isomorphic resolution [kX -> kx].
struct SierKit {
  SpacePtr s;
  QS kX;
  QS kx;
  QS jk;
  QC jshriek;
  QC two_term;
  PointSet closed_pt;

  SierKit()
      : s(make_sier()),
        kX(QS::constant(s, Q)),
        kx(QS::closure_constant(s, Q, 1)),
        jk(QS::extension_by_zero(s, Q, PointSet(2, {0}))),
        jshriek(QC::from_sheaf(jk, 0)),
        two_term(0, {kX, kx}, {hom_basis(kX, kx)[0]}),
        closed_pt(2, {1}) {}
};

Dims h_dims(const QC& c, int k) { return c.cohomology_sheaf(k).dims(); }

bool is_injective_sheaf(const QS& f) {
  return injective_resolution(f).maps.empty();
}
}  // namespace

TEST_CASE("chain map shift") {
  SierKit kit;
  auto id = QMap::identity(kit.two_term);
  auto sh = id.shift(1);
  CHECK(sh.src() == kit.two_term.shift(1));
  CHECK(sh.dst() == kit.two_term.shift(1));
  CHECK(sh.at(-1) == QMor::identity(kit.kX));
  CHECK(sh.at(0) == QMor::identity(kit.kx));
  CHECK(sh.shift(-1) == id);

  // Shifting preserves commuting squares even for non-identity maps.
  auto maps = chain_map_basis(kit.two_term, kit.two_term);
  for (const auto& m : maps) CHECK(m.shift(3).shift(-3) == m);
}

TEST_CASE("extension of chain maps along an injective quasi-isomorphism") {
  SierKit kit;
  auto rep = injective_replacement(kit.jshriek);

  // Extend the replacement map along itself: g o qis = qis.
  auto g = extend_chain_map(rep.qis, rep.qis);
  CHECK(g.src() == rep.complex);
  CHECK(g.dst() == rep.complex);
  CHECK(g.after(rep.qis) == rep.qis);

  // Extending the zero map yields a map killing the image of qis.
  auto g0 = extend_chain_map(rep.qis, QMap::zero(kit.jshriek, rep.complex));
  CHECK(g0.after(rep.qis).is_zero());

  // No extension of a nonzero map along the zero map can exist.
  CHECK_THROWS_AS(
      extend_chain_map(QMap::zero(kit.jshriek, rep.complex), rep.qis),
      InvariantError);
}

TEST_CASE("injective replacement of a single sheaf matches its resolution") {
  SierKit kit;

  auto rep = injective_replacement(kit.jshriek);
  CHECK(rep.complex.lo() == 0);
  CHECK(rep.complex.hi() == 1);
  CHECK(rep.complex.term(0) == kit.kX);
  CHECK(rep.complex.term(1) == kit.kx);
  auto res = injective_resolution(kit.jk);
  CHECK(rep.qis.at(0) == res.augmentation);
  CHECK(is_quasi_iso(rep.qis));

  // An already injective sheaf is its own replacement via the identity.
  auto repX = injective_replacement(QC::from_sheaf(kit.kX, 0));
  CHECK(repX.complex.lo() == 0);
  CHECK(repX.complex.hi() == 0);
  CHECK(repX.complex.term(0) == kit.kX);
  CHECK(repX.qis.at(0) == QMor::identity(kit.kX));

  // Degree placement is respected.
  auto rep3 = injective_replacement(QC::from_sheaf(kit.jk, -2));
  CHECK(rep3.complex.lo() == -2);
  CHECK(rep3.complex.hi() == -1);
  CHECK(rep3.complex.term(-2) == kit.kX);
  CHECK(is_quasi_iso(rep3.qis));
}

TEST_CASE("injective replacement of complexes") {
  SierKit kit;
  auto incl = hom_basis(kit.jk, kit.kX)[0];
  auto quot = hom_basis(kit.kX, kit.kx)[0];
  std::vector<QC> cases = {
      kit.two_term,
      kit.jshriek,
      QC(0, {kit.jk, kit.jk}, {QMor::zero(kit.jk, kit.jk)}),
      QC(0, {kit.jk, kit.kX, kit.kx}, {incl, quot}),
      kit.two_term.shift(2),
      kit.jshriek.shift(-1),
  };
  for (const auto& m : cases) {
    auto rep = injective_replacement(m);
    REQUIRE(rep.qis.src() == m);
    REQUIRE(rep.qis.dst() == rep.complex);
    REQUIRE(is_quasi_iso(rep.qis));
    // Terms are injective and cohomology is preserved degree by degree.
    for (int k = rep.complex.lo(); k <= rep.complex.hi(); ++k)
      REQUIRE(is_injective_sheaf(rep.complex.term(k)));
    for (int k = m.lo() - 1; k <= rep.complex.hi() + 1; ++k)
      REQUIRE(h_dims(rep.complex, k) == h_dims(m, k));
    // The replacement map is injective on every stalk in every degree.
    for (int k = m.lo(); k <= m.hi(); ++k)
      for (int p = 0; p < kit.s->n(); ++p)
        REQUIRE(rep.qis.at(k).at(p).rank() == m.term(k).dim(p));
  }

  // Frozen term sizes: replacing [jk -0-> jk] stacks the two resolutions.
  auto rep2 =
      injective_replacement(QC(0, {kit.jk, kit.jk}, {QMor::zero(kit.jk, kit.jk)}));
  CHECK(rep2.complex.lo() == 0);
  CHECK(rep2.complex.hi() == 2);
  CHECK(rep2.complex.term(0).dims() == Dims{1, 1});
  CHECK(rep2.complex.term(1).dims() == Dims{1, 2});
  CHECK(rep2.complex.term(2).dims() == Dims{0, 1});

  // A termwise injective complex keeps its term sizes.
  auto repT = injective_replacement(kit.two_term);
  CHECK(repT.complex.term(0).dims() == Dims{1, 1});
  CHECK(repT.complex.term(1).dims() == Dims{0, 1});

  // Zero complexes are their own replacement.
  auto repZ = injective_replacement(QC::zero_complex(kit.s, Q));
  CHECK(repZ.complex.total_dim() == 0);
  CHECK(repZ.qis.is_zero());
}

TEST_CASE("local cohomology on the two-point chain") {
  SierKit kit;

  // Sections of j_! supported on the closed point live in degree 1.
  auto rg = r_gamma(kit.jshriek, kit.closed_pt);
  CHECK(h_dims(rg, 0) == Dims{0, 0});
  CHECK(h_dims(rg, 1) == Dims{0, 1});
  CHECK(h_dims(rg, 2) == Dims{0, 0});
  CHECK(h_dims(rg, -1) == Dims{0, 0});

  // The constant sheaf has no cohomology supported on the closed point.
  auto rgX = r_gamma(QC::from_sheaf(kit.kX, 0), kit.closed_pt);
  for (int k = -1; k <= 3; ++k) CHECK(h_dims(rgX, k) == Dims{0, 0});

  // The skyscraper is already supported there.
  auto rgx = r_gamma(QC::from_sheaf(kit.kx, 0), kit.closed_pt);
  CHECK(h_dims(rgx, 0) == Dims{0, 1});
  CHECK(h_dims(rgx, 1) == Dims{0, 0});

  // Support on the whole space changes nothing; empty support kills all.
  auto rg_full = r_gamma(kit.two_term, PointSet::full(2));
  for (int k = -1; k <= 3; ++k)
    CHECK(h_dims(rg_full, k) == h_dims(kit.two_term, k));
  CHECK(r_gamma(kit.two_term, PointSet(2)).total_dim() == 0);

  // The supporting set must be closed.
  CHECK_THROWS_AS(r_gamma(kit.jshriek, PointSet(2, {0})), ValidationError);

  // The supported subcomplex includes into the replacement it was cut from.
  auto rep = injective_replacement(kit.jshriek);
  auto gs = gamma_w_subcomplex(rep.complex, kit.closed_pt);
  CHECK(gs.inclusion.dst() == rep.complex);
  CHECK(h_dims(gs.complex, 1) == Dims{0, 1});

  // Quasi-isomorphic inputs give the same local cohomology.
  auto rg_res = r_gamma(kit.two_term, kit.closed_pt);
  for (int k = -1; k <= 3; ++k) CHECK(h_dims(rg_res, k) == h_dims(rg, k));
}

TEST_CASE("local cohomology of injective generators across small spaces") {
  PrimeField f3(3);
  auto spaces = all_small_spaces(3, 2);
  for (size_t i = 0; i < spaces.size(); i += 3) {
    const auto& sp = spaces[i];
    for (const auto& w : sp->closed_subsets()) {
      for (int p = 0; p < sp->n(); ++p) {
        auto ip = Sheaf<PrimeField>::closure_constant(sp, f3, p);
        auto rg = r_gamma(ChainComplex<PrimeField>::from_sheaf(ip, 0), w);
        std::vector<int> expect(sp->n(), 0);
        if (w.contains(p))
          for (int q = 0; q < sp->n(); ++q) expect[q] = ip.dim(q);
        REQUIRE(rg.cohomology_sheaf(0).dims() == expect);
        for (int k = rg.lo() - 1; k <= rg.hi() + 1; ++k) {
          if (k == 0) continue;
          REQUIRE(rg.cohomology_sheaf(k).total_dim() == 0);
        }
      }
    }
  }
}

TEST_CASE("derived global sections") {
  SierKit kit;

  // RGamma of j_! vanishes: the two resolution sections cancel.
  auto gs = r_sections(kit.jshriek);
  for (int k = -1; k <= 3; ++k) CHECK(gs.h_dim(k) == 0);

  // Constant and skyscraper sheaves on contractible spaces: one H^0.
  auto gX = r_sections(QC::from_sheaf(kit.kX, 0));
  CHECK(gX.h_dim(0) == 1);
  CHECK(gX.h_dim(1) == 0);
  auto gx = r_sections(QC::from_sheaf(kit.kx, 0));
  CHECK(gx.h_dim(0) == 1);
  CHECK(gx.h_dim(1) == 0);

  for (auto sp : {make_chain3(), make_vspace(), make_wspace()}) {
    auto g = r_sections(QC::from_sheaf(QS::constant(sp, Q), 0));
    REQUIRE(g.h_dim(0) == 1);
    for (int k = 1; k <= 4; ++k) REQUIRE(g.h_dim(k) == 0);
  }
}

TEST_CASE("derived sections of the circle") {
  // The four-point circle model has one-dimensional H^0 and H^1.
  auto sp = make_circle();
  auto g = r_sections(QC::from_sheaf(QS::constant(sp, Q), 0));
  CHECK(g.h_dim(0) == 1);
  CHECK(g.h_dim(1) == 1);
  CHECK(g.h_dim(2) == 0);
  CHECK(g.h_dim(-1) == 0);

  PrimeField f2(2);
  auto g2 = r_sections(
      ChainComplex<PrimeField>::from_sheaf(Sheaf<PrimeField>::constant(sp, f2), 0));
  CHECK(g2.h_dim(0) == 1);
  CHECK(g2.h_dim(1) == 1);
  CHECK(g2.h_dim(2) == 0);

  // A skyscraper on the circle has no higher cohomology.
  auto ga = r_sections(QC::from_sheaf(QS::closure_constant(sp, Q, 2), 0));
  CHECK(ga.h_dim(0) == 1);
  CHECK(ga.h_dim(1) == 0);
}

TEST_CASE("derived hom complexes on the two-point chain") {
  SierKit kit;
  auto kX0 = QC::from_sheaf(kit.kX, 0);
  auto kx0 = QC::from_sheaf(kit.kx, 0);

  // Frozen table of Hom-space cohomology (maps in the derived sense).
  auto hXX = rhom(kX0, kX0);
  CHECK(hXX.h_dim(0) == 1);
  for (int k = -2; k <= 2; ++k)
    if (k != 0) CHECK(hXX.h_dim(k) == 0);

  auto hxX = rhom(kx0, kX0);
  for (int k = -2; k <= 2; ++k) CHECK(hxX.h_dim(k) == 0);

  auto hXx = rhom(kX0, kx0);
  CHECK(hXx.h_dim(0) == 1);
  CHECK(hXx.h_dim(1) == 0);

  auto hxx = rhom(kx0, kx0);
  CHECK(hxx.h_dim(0) == 1);
  CHECK(hxx.h_dim(1) == 0);

  // Maps from the skyscraper into j_! appear one degree up.
  auto hxj = rhom(kx0, kit.jshriek);
  CHECK(hxj.h_dim(0) == 0);
  CHECK(hxj.h_dim(1) == 1);
  CHECK(hxj.h_dim(2) == 0);
  CHECK(hxj.h_dim(-1) == 0);

  auto hjx = rhom(kit.jshriek, kx0);
  for (int k = -2; k <= 2; ++k) CHECK(hjx.h_dim(k) == 0);

  auto hjj = rhom(kit.jshriek, kit.jshriek);
  CHECK(hjj.h_dim(0) == 1);
  CHECK(hjj.h_dim(1) == 0);

  auto hjX = rhom(kit.jshriek, kX0);
  CHECK(hjX.h_dim(0) == 1);
  CHECK(hjX.h_dim(1) == 0);

  // rhom(kX, j_!) computes the global sections of j_!: zero.
  auto hXj = rhom(kX0, kit.jshriek);
  for (int k = -2; k <= 2; ++k) CHECK(hXj.h_dim(k) == 0);

  // Shift invariance: Hom into a shifted target moves degrees.
  auto hshift = rhom(kx0, kit.jshriek.shift(1));
  CHECK(hshift.h_dim(0) == 1);
  CHECK(hshift.h_dim(1) == 0);

  // Quasi-isomorphism invariance in the first argument.
  auto hres = rhom(kit.two_term, kit.jshriek);
  CHECK(hres.h_dim(0) == 1);
  CHECK(hres.h_dim(1) == 0);
  CHECK(hres.h_dim(-1) == 0);
}

TEST_CASE("derived pushforward along open immersions") {
  SierKit kit;

  // Constant sheaf on the open point extends to the constant sheaf.
  auto sub = open_subspace(*kit.s, PointSet(2, {0}));
  auto mu = QC::from_sheaf(QS::constant(sub.space, Q), 0);
  auto rp = r_pushforward(sub, mu);
  REQUIRE(*rp.space() == *kit.s);
  CHECK(h_dims(rp, 0) == Dims{1, 1});
  CHECK(h_dims(rp, 1) == Dims{0, 0});
  CHECK(h_dims(rp, -1) == Dims{0, 0});

  // On the three-point chain, push forward from the open pair {eta, y}.
  auto c3 = make_chain3();
  auto sub3 = open_subspace(*c3, PointSet(3, {0, 1}));

  // A skyscraper at y (closed in U) extends to the skyscraper on cl(y).
  auto sky = QC::from_sheaf(QS::closure_constant(sub3.space, Q, 1), 0);
  auto rp_sky = r_pushforward(sub3, sky);
  CHECK(h_dims(rp_sky, 0) == Dims{0, 1, 1});
  CHECK(h_dims(rp_sky, 1) == Dims{0, 0, 0});

  // Extension by zero from {eta} inside U pushes to extension by zero on X
  // with no higher direct images (its sections over U and U_x vanish).
  auto ju = QC::from_sheaf(QS::extension_by_zero(sub3.space, Q, PointSet(2, {0})), 0);
  auto rp_ju = r_pushforward(sub3, ju);
  CHECK(h_dims(rp_ju, 0) == Dims{1, 0, 0});
  CHECK(h_dims(rp_ju, 1) == Dims{0, 0, 0});
  CHECK(h_dims(rp_ju, 2) == Dims{0, 0, 0});

  // Quasi-isomorphism invariance: the resolved form of ju pushes the same.
  auto kU = QS::constant(sub3.space, Q);
  auto ky = QS::closure_constant(sub3.space, Q, 1);
  auto res_ju = QC(0, {kU, ky}, {hom_basis(kU, ky)[0]});
  auto rp_res = r_pushforward(sub3, res_ju);
  for (int k = -1; k <= 3; ++k) REQUIRE(h_dims(rp_res, k) == h_dims(rp_ju, k));

  // On the V-shaped space, pushing the constant sheaf from {eta} fills in
  // both closed points.
  auto v = make_vspace();
  auto subv = open_subspace(*v, PointSet(3, {0}));
  auto rv = r_pushforward(subv, QC::from_sheaf(QS::constant(subv.space, Q), 0));
  CHECK(h_dims(rv, 0) == Dims{1, 1, 1});
  CHECK(h_dims(rv, 1) == Dims{0, 0, 0});
}

TEST_CASE("restriction of complexes to open subspaces") {
  SierKit kit;
  auto sub = open_subspace(*kit.s, PointSet(2, {0}));
  auto rest = restrict_complex(kit.two_term, sub);
  CHECK(rest.lo() == 0);
  CHECK(rest.term(0) == QS::constant(sub.space, Q));
  CHECK(rest.term(1).total_dim() == 0);
  CHECK(rest.cohomology_sheaf(0).dims() == Dims{1});
  CHECK(rest.cohomology_sheaf(1).total_dim() == 0);

  // Restricting a pushforward back to the open set recovers the input
  // cohomology (the unit of the adjunction is an isomorphism on opens).
  auto mu = QC::from_sheaf(QS::constant(sub.space, Q), 0);
  auto back = restrict_complex(r_pushforward(sub, mu), sub);
  for (int k = -1; k <= 2; ++k)
    REQUIRE(back.cohomology_sheaf(k).dims() == mu.cohomology_sheaf(k).dims());
}

TEST_CASE("derived functors over a prime field") {
  // Key frozen values reproduce over F_5.
  PrimeField f5(5);
  auto s = make_sier();
  using FS = Sheaf<PrimeField>;
  using FC = ChainComplex<PrimeField>;
  auto jk = FS::extension_by_zero(s, f5, PointSet(2, {0}));
  auto rg = r_gamma(FC::from_sheaf(jk, 0), PointSet(2, {1}));
  CHECK(rg.cohomology_sheaf(0).dims() == Dims{0, 0});
  CHECK(rg.cohomology_sheaf(1).dims() == Dims{0, 1});

  auto kX = FS::constant(s, f5);
  auto h = rhom(FC::from_sheaf(kX, 0), FC::from_sheaf(kX, 0));
  CHECK(h.h_dim(0) == 1);
  CHECK(h.h_dim(1) == 0);
}
