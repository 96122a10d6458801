// Contract tests for the command-line front end, driven end to end through
// the shipped binary (and its mutation-enabled testing twin). The binary
// paths and the data directory are baked in by the build:
//   TSTRUCT_CLI_PATH      release-style binary (no mutation support)
//   TSTRUCT_CLI_MUT_PATH  testing binary with --mutate compiled in
//   TSTRUCT_DATA_DIR      directory with the shipped JSON models
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "json.hpp"
#include "tstruct/json_io.hpp"

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& cmd) {
  RunResult r;
  FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.exit_code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

const std::string kBin = TSTRUCT_CLI_PATH;
const std::string kMut = TSTRUCT_CLI_MUT_PATH;
const std::string kData = TSTRUCT_DATA_DIR;

std::string data(const std::string& f) { return kData + "/" + f; }

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("check-datum passes the codimension datum and fails the gap datum") {
  auto pass = run(kBin + " check-datum --space " + data("sier.json") +
                  " --datum " + data("codim.json"));
  CHECK(pass.exit_code == 0);
  json jp = json::parse(pass.out);
  CHECK(jp.at("verdict") == "pass");
  CHECK(jp.at("conditions").at("jump") == true);
  CHECK(jp.at("conditions").at("dual-convolution") == true);
  CHECK(jp.at("conditions").at("residuation") == true);
  CHECK(jp.at("conditions").at("level-filtration") == true);
  CHECK(!jp.contains("witnesses"));

  auto fail = run(kBin + " check-datum --space " + data("sier.json") +
                  " --datum " + data("gap.json"));
  CHECK(fail.exit_code == 1);
  json jf = json::parse(fail.out);
  CHECK(jf.at("verdict") == "fail");
  CHECK(jf.at("conditions").at("jump") == false);
  CHECK(jf.at("witnesses").at("pair") == json::array({"eta", "x"}));
}

TEST_CASE("check-datum accepts the levels form of a datum") {
  auto a = run(kBin + " check-datum --space " + data("sier.json") +
               " --datum " + data("gap.json"));
  auto b = run(kBin + " check-datum --space " + data("sier.json") +
               " --datum " + data("gap_levels.json"));
  CHECK(a.exit_code == 1);
  CHECK(b.exit_code == 1);
  CHECK(a.out == b.out);
}

TEST_CASE("check-datum degenerate single-point space passes") {
  auto r = run(kBin + " check-datum --space " + data("point.json") +
               " --datum " + data("point_trivial.json"));
  CHECK(r.exit_code == 0);
  CHECK(json::parse(r.out).at("verdict") == "pass");
}

TEST_CASE("convolve doubles the codimension datum into the gap datum") {
  auto r = run(kBin + " convolve --space " + data("sier.json") + " --datum " +
               data("codim.json") + " --datum2 " + data("codim.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == "{\"p\":{\"eta\":0,\"x\":2}}\n");
}

TEST_CASE("dual swaps the zero and codimension data") {
  auto r1 = run(kBin + " dual --space " + data("sier.json") + " --datum " +
                data("trivial.json"));
  CHECK(r1.exit_code == 0);
  CHECK(r1.out == "{\"p\":{\"eta\":0,\"x\":1}}\n");

  auto r2 = run(kBin + " dual --space " + data("chain3.json") +
                " --datum " + data("chain3_trivial.json"));
  CHECK(r2.exit_code == 0);
  CHECK(r2.out == "{\"p\":{\"eta\":0,\"x\":2,\"y\":1}}\n");
}

TEST_CASE("residuate solves and reports no-solution with a witness") {
  // codim \ gap: psi = codim since codim * codim = gap.
  auto ok = run(kBin + " residuate --space " + data("sier.json") +
                " --datum " + data("codim.json") + " --datum2 " +
                data("gap.json"));
  CHECK(ok.exit_code == 0);
  CHECK(ok.out == "{\"p\":{\"eta\":0,\"x\":1}}\n");

  // gap \ codim: the gap datum climbs faster than codim, no factor exists.
  auto no = run(kBin + " residuate --space " + data("sier.json") +
                " --datum " + data("gap.json") + " --datum2 " +
                data("codim.json"));
  CHECK(no.exit_code == 1);
  json jn = json::parse(no.out);
  CHECK(jn.at("no_solution") == true);
  CHECK(jn.at("witness") == json::array({"eta", "x"}));
}

TEST_CASE("truncate splits extension-by-zero under the gap datum") {
  auto r = run(kBin + " truncate --space " + data("sier.json") + " --datum " +
               data("gap.json") + " --complex " + data("jshriek.json") +
               " --n 0");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j.at("certificates").at("verified") == true);
  CHECK(j.at("certificates").at("geq-bound") == 0);
  CHECK(j.at("certificates").at("lt-bound") == -1);

  // Parse the emitted pieces back and check their cohomology shape: the
  // upper piece is a constant sheaf in degree 0, the lower piece is a
  // skyscraper in cohomological degree 1.
  auto space = tstruct::jsonio::load_space(data("sier.json"));
  tstruct::PrimeField f2(2);
  auto geq = tstruct::jsonio::complex_from_json(j.at("geq"), space, f2);
  auto lt = tstruct::jsonio::complex_from_json(j.at("lt"), space, f2);
  const int eta = space->index("eta"), x = space->index("x");
  auto h0 = geq.cohomology_sheaf(0);
  CHECK(h0.dim(eta) == 1);
  CHECK(h0.dim(x) == 1);
  CHECK(geq.cohomology_sheaf(1).total_dim() == 0);
  CHECK(geq.cohomology_sheaf(-1).total_dim() == 0);
  auto h1 = lt.cohomology_sheaf(1);
  CHECK(h1.dim(eta) == 0);
  CHECK(h1.dim(x) == 1);
  CHECK(lt.cohomology_sheaf(0).total_dim() == 0);
  CHECK(lt.cohomology_sheaf(2).total_dim() == 0);
}

TEST_CASE("truncate of the constant sheaf under the codimension datum") {
  // The constant sheaf is a heart object: lower piece vanishes.
  auto r = run(kBin + " truncate --space " + data("sier.json") + " --datum " +
               data("codim.json") + " --complex " + data("constant.json"));
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  auto space = tstruct::jsonio::load_space(data("sier.json"));
  tstruct::PrimeField f2(2);
  auto lt = tstruct::jsonio::complex_from_json(j.at("lt"), space, f2);
  for (int k = lt.lo(); k <= lt.hi(); ++k)
    CHECK(lt.cohomology_sheaf(k).total_dim() == 0);
}

TEST_CASE("phi-cohomology extracts the heart piece in a given degree") {
  auto r = run(kBin + " phi-cohomology --space " + data("sier.json") +
               " --datum " + data("gap.json") + " --complex " +
               data("jshriek.json") + " --n 0");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j.at("degree") == 0);
  auto space = tstruct::jsonio::load_space(data("sier.json"));
  tstruct::PrimeField f2(2);
  auto piece = tstruct::jsonio::complex_from_json(j.at("piece"), space, f2);
  auto h0 = piece.cohomology_sheaf(0);
  CHECK(h0.dim(space->index("eta")) == 1);
  CHECK(h0.dim(space->index("x")) == 1);
}

TEST_CASE("validation problems exit with code 2") {
  // Missing file.
  CHECK(run(kBin + " check-datum --space " + data("sier.json") +
            " --datum " + data("no-such-file.json"))
            .exit_code == 2);
  // Missing required flag.
  CHECK(run(kBin + " convolve --space " + data("sier.json") + " --datum " +
            data("codim.json"))
            .exit_code == 2);
  // Unknown command.
  CHECK(run(kBin + " frobnicate").exit_code == 2);
  // Field mismatch between --field and the complex file.
  CHECK(run(kBin + " truncate --space " + data("sier.json") + " --datum " +
            data("codim.json") + " --complex " + data("constant.json") +
            " --field Q")
            .exit_code == 2);
  // Datum on the wrong space.
  CHECK(run(kBin + " check-datum --space " + data("chain3.json") +
            " --datum " + data("gap.json"))
            .exit_code == 2);
}

TEST_CASE("verify emits sorted records and a summary, deterministically") {
  const std::string cmd = kBin + " verify --suite criterion-agreement" +
                          " --max-points 2 --seed 5";
  auto a = run(cmd);
  CHECK(a.exit_code == 0);
  CHECK(!a.out.empty());

  // Last line is the summary; every earlier line is a pass record, and the
  // records arrive sorted by case id.
  auto lines_end = a.out.rfind("checks: ");
  REQUIRE(lines_end != std::string::npos);
  CHECK(contains(a.out.substr(lines_end), "failures: 0"));
  std::string prev_case;
  size_t pos = 0;
  int nrecords = 0;
  while (pos < lines_end) {
    size_t eol = a.out.find('\n', pos);
    REQUIRE(eol != std::string::npos);
    json rec = json::parse(a.out.substr(pos, eol - pos));
    CHECK(rec.at("suite") == "criterion-agreement");
    CHECK(rec.at("verdict") == "pass");
    std::string cid = rec.at("case_id").get<std::string>();
    CHECK(prev_case <= cid);
    prev_case = cid;
    ++nrecords;
    pos = eol + 1;
  }
  CHECK(nrecords == 32);  // enumerated spaces with at most two points

  auto b = run(cmd);
  CHECK(a.out == b.out);
}

TEST_CASE("verify runs every suite by name") {
  for (const std::string suite :
       {"convolution-algebra", "residuation", "sheaf-lemmas",
        "t-structure-axioms", "exactness"}) {
    auto r = run(kBin + " verify --suite " + suite +
                 " --max-points 2 --samples 2 --seed 11");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "failures: 0"));
  }
  CHECK(run(kBin + " verify --suite no-such-suite").exit_code == 2);
}

TEST_CASE("TSTRUCT_SEED environment variable overrides --seed") {
  const std::string tail = " verify --suite t-structure-axioms --samples 1";
  auto env = run("TSTRUCT_SEED=123 " + kBin + tail + " --seed 7");
  auto flag = run(kBin + tail + " --seed 123");
  auto other = run(kBin + tail + " --seed 7");
  CHECK(env.exit_code == 0);
  CHECK(env.out == flag.out);
  CHECK(env.out != other.out);
}

TEST_CASE("enumerate lists the small spaces with a count") {
  auto r = run(kBin + " enumerate --max-points 2");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "spaces: 32"));
  // First line is the one-point space.
  size_t eol = r.out.find('\n');
  json first = json::parse(r.out.substr(0, eol));
  CHECK(first.at("index") == 0);
  CHECK(first.at("points") == 1);
  CHECK(first.at("space").contains("points"));
}

TEST_CASE("the shipped binary rejects --mutate; the testing twin honors it") {
  const std::string tail = " verify --suite criterion-agreement"
                           " --max-points 2 --mutate drop-monotonicity";
  CHECK(run(kBin + tail).exit_code == 2);

  auto r = run(kMut + tail);
  CHECK(r.exit_code == 1);
  CHECK(contains(r.out, "\"verdict\":\"fail\""));
  CHECK(contains(r.out, "monotone"));
  // Summary counts a nonzero failure total.
  CHECK(!contains(r.out, "failures: 0"));

  auto flip = run(kMut + " verify --suite criterion-agreement" +
                  " --max-points 2 --mutate sigma-flip");
  CHECK(flip.exit_code == 1);
  CHECK(contains(flip.out, "\"verdict\":\"fail\""));

  auto d2 = run(kMut + " verify --suite t-structure-axioms --samples 1" +
                " --mutate break-d2");
  CHECK(d2.exit_code == 1);
  CHECK(contains(d2.out, "mutation-d2-probe"));
  CHECK(contains(d2.out, "nonzero"));

  CHECK(run(kMut + " verify --mutate no-such-mode --samples 1").exit_code ==
        2);
}
