// Command-line front end: JSON ingestion, the support-calculus commands, the
// truncation commands, the verification-suite driver, and the small-space
// enumeration driver. All output is canonical sorted-key JSON; identical
// inputs and seed produce identical bytes.
//
// Exit codes: 0 success / all checks pass; 1 criterion failure, no-solution
// outcome, or failing checks; 2 parse or validation problems; 3 internal
// certificate or invariant failures.

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "json.hpp"
#include "tstruct/enumerate.hpp"
#include "tstruct/json_io.hpp"
#include "tstruct/tstructure.hpp"
#include "tstruct/verify.hpp"

namespace {

using nlohmann::json;
using namespace tstruct;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInternal = 3;

void emit(const json& j) { std::fputs((j.dump() + "\n").c_str(), stdout); }

/// Loads a datum file against the space given on the command line. When the
/// datum file names its own space, the two must agree.
SupportDatum load_datum_on(const std::string& space_file,
                           const std::string& datum_file, SpacePtr& space) {
  space = jsonio::load_space(space_file);
  json j = jsonio::read_json_file(datum_file);
  if (j.contains("space")) {
    auto own = jsonio::load_space(
        jsonio::resolve_sibling(datum_file, j.at("space").get<std::string>()));
    require_same_space(*space, *own, "datum file");
  }
  return jsonio::datum_from_json(j, space);
}

json witness_json(const SpaceModel& s, const CriterionReport& rep) {
  json w = json::object();
  if (rep.witness_pair)
    w["pair"] = json::array(
        {s.id(rep.witness_pair->first), s.id(rep.witness_pair->second)});
  if (rep.witness_level)
    w["level"] = {{"n", rep.witness_level->first},
                  {"k", rep.witness_level->second}};
  return w;
}

int cmd_check_datum(const std::string& space_file,
                    const std::string& datum_file) {
  SpacePtr space;
  SupportDatum d = load_datum_on(space_file, datum_file, space);
  CriterionReport rep = check_criterion(d);
  json out;
  out["conditions"] = {{"jump", rep.jump_condition},
                       {"dual-convolution", rep.dual_convolution},
                       {"residuation", rep.residuation_exists},
                       {"level-filtration", rep.level_filtration}};
  out["datum"] = jsonio::datum_to_json(d);
  out["verdict"] = rep.verdict ? "pass" : "fail";
  if (!rep.verdict) out["witnesses"] = witness_json(*space, rep);
  emit(out);
  return rep.verdict ? kExitPass : kExitFail;
}

int cmd_convolve(const std::string& space_file, const std::string& datum_file,
                 const std::string& datum2_file) {
  SpacePtr space;
  SupportDatum a = load_datum_on(space_file, datum_file, space);
  SpacePtr space2;
  SupportDatum b = load_datum_on(space_file, datum2_file, space2);
  emit(jsonio::datum_to_json(convolve(a, b)));
  return kExitPass;
}

int cmd_dual(const std::string& space_file, const std::string& datum_file) {
  SpacePtr space;
  SupportDatum d = load_datum_on(space_file, datum_file, space);
  emit(jsonio::datum_to_json(dual_star(d)));
  return kExitPass;
}

int cmd_residuate(const std::string& space_file, const std::string& datum_file,
                  const std::string& datum2_file) {
  SpacePtr space;
  SupportDatum phi = load_datum_on(space_file, datum_file, space);
  SpacePtr space2;
  SupportDatum theta = load_datum_on(space_file, datum2_file, space2);
  ResiduationOutcome out = residuate(phi, theta);
  if (out.psi) {
    emit(jsonio::datum_to_json(*out.psi));
    return kExitPass;
  }
  json j;
  j["no_solution"] = true;
  if (out.witness)
    j["witness"] = json::array(
        {space->id(out.witness->first), space->id(out.witness->second)});
  emit(j);
  return kExitFail;
}

/// Shared loader for the complex commands: reads the complex file, resolves
/// the field (the --field flag, when given, must match the file's spec), and
/// hands a typed complex to `fn`.
template <class Fn>
void with_loaded_complex(const std::string& space_file,
                         const std::string& complex_file,
                         const std::string& field_flag, Fn&& fn) {
  SpacePtr space = jsonio::load_space(space_file);
  json j = jsonio::read_json_file(complex_file);
  if (j.contains("space")) {
    auto own = jsonio::load_space(
        jsonio::resolve_sibling(complex_file, j.at("space").get<std::string>()));
    require_same_space(*space, *own, "complex file");
  }
  jsonio::FieldSpec spec;
  if (!field_flag.empty())
    spec = jsonio::FieldSpec::parse(field_flag);
  else if (j.contains("field") && j.at("field").is_string())
    spec = jsonio::FieldSpec::parse(j.at("field").get<std::string>());
  else
    throw ValidationError(
        "complex file has no 'field' spec and no --field was given");
  jsonio::with_field(spec, [&](auto field) {
    fn(space, jsonio::complex_from_json(j, space, field));
  });
}

int cmd_truncate(const std::string& space_file, const std::string& datum_file,
                 const std::string& complex_file,
                 const std::string& field_flag, int n) {
  SpacePtr dspace;
  SupportDatum phi = load_datum_on(space_file, datum_file, dspace);
  with_loaded_complex(
      space_file, complex_file, field_flag, [&](SpacePtr, auto m) {
        auto tr = truncate_t(m, phi, n);
        json out;
        out["certificates"] = {
            {"geq-bound", n}, {"lt-bound", n - 1}, {"verified", true}};
        out["geq"] = jsonio::complex_to_json(tr.geq);
        out["lt"] = jsonio::complex_to_json(tr.lt);
        emit(out);
      });
  return kExitPass;
}

int cmd_phi_cohomology(const std::string& space_file,
                       const std::string& datum_file,
                       const std::string& complex_file,
                       const std::string& field_flag, int n) {
  SpacePtr dspace;
  SupportDatum phi = load_datum_on(space_file, datum_file, dspace);
  with_loaded_complex(
      space_file, complex_file, field_flag, [&](SpacePtr, auto m) {
        auto piece = heart_piece(m, phi, n);
        json out;
        out["degree"] = n;
        out["piece"] = jsonio::complex_to_json(piece);
        emit(out);
      });
  return kExitPass;
}

int cmd_verify(const verify::SuiteOptions& opts, const std::string& suite) {
  auto recs = verify::run_suite(suite, opts);
  std::fputs(verify::report_lines(recs).c_str(), stdout);
  auto s = verify::summarize(recs);
  std::fprintf(stdout, "checks: %lld failures: %lld\n", s.checks, s.failures);
  return s.failures == 0 ? kExitPass : kExitFail;
}

int cmd_enumerate(int max_points, int max_codim) {
  auto spaces = enumerate_spaces(max_points, max_codim);
  for (size_t i = 0; i < spaces.size(); ++i) {
    json line;
    line["index"] = i;
    line["points"] = spaces[i]->n();
    line["space"] = jsonio::space_to_json(*spaces[i]);
    emit(line);
  }
  std::fprintf(stdout, "spaces: %zu\n", spaces.size());
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Support-data calculus and truncation workbench on finite "
      "topological spaces"};
  app.require_subcommand(1);

  std::string space_file, datum_file, datum2_file, complex_file, field_flag;
  int n = 0;
  verify::SuiteOptions opts;
  std::string suite = "all";
  std::string mutate = "none";
  int enum_points = 4, enum_codim = 3;

  auto add_space = [&](CLI::App* c) {
    c->add_option("--space", space_file, "space model JSON file")->required();
  };
  auto add_datum = [&](CLI::App* c) {
    c->add_option("--datum", datum_file, "support datum JSON file")
        ->required();
  };

  CLI::App* check = app.add_subcommand(
      "check-datum", "evaluate the four t-structure conditions on a datum");
  add_space(check);
  add_datum(check);

  CLI::App* conv =
      app.add_subcommand("convolve", "convolve two support data");
  add_space(conv);
  add_datum(conv);
  conv->add_option("--datum2", datum2_file, "second datum JSON file")
      ->required();

  CLI::App* dual = app.add_subcommand("dual", "dual of a support datum");
  add_space(dual);
  add_datum(dual);

  CLI::App* resid = app.add_subcommand(
      "residuate", "solve convolve(datum, psi) == datum2 for psi");
  add_space(resid);
  add_datum(resid);
  resid->add_option("--datum2", datum2_file, "target datum JSON file")
      ->required();

  auto add_complex_flags = [&](CLI::App* c) {
    add_space(c);
    add_datum(c);
    c->add_option("--complex", complex_file, "complex JSON file")->required();
    c->add_option("--field", field_flag,
                  "field spec (Q, F2, Fp:<p>); must match the file");
    c->add_option("--n", n, "cut degree (default 0)");
  };
  CLI::App* trunc = app.add_subcommand(
      "truncate", "split a complex into lower and upper pieces at --n");
  add_complex_flags(trunc);
  CLI::App* phico = app.add_subcommand(
      "phi-cohomology", "heart cohomology of a complex in degree --n");
  add_complex_flags(phico);

  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "run verification suites and print JSON-line records");
  verify_cmd->add_option("--suite", suite,
                         "suite name or 'all' (default all)");
  verify_cmd->add_option("--seed", opts.seed, "base seed for sampled cases");
  verify_cmd->add_option("--max-points", opts.max_points,
                         "largest space size for enumerated windows");
  verify_cmd->add_option("--samples", opts.samples,
                         "per-space sample count override (0 = published)");
#ifdef TSTRUCT_ENABLE_MUTATIONS
  verify_cmd->add_option(
      "--mutate", mutate,
      "inject a known defect (drop-monotonicity, break-d2, sigma-flip)");
#endif

  CLI::App* enum_cmd = app.add_subcommand(
      "enumerate", "list the enumerated small spaces as JSON lines");
  enum_cmd->add_option("--max-points", enum_points,
                       "largest space size (default 4)");
  enum_cmd->add_option("--max-codim", enum_codim,
                       "largest codimension (default 3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints help on --help with a success code; everything else is a
    // command-line validation problem.
    int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitValidation;
  }

  try {
    if (check->parsed()) return cmd_check_datum(space_file, datum_file);
    if (conv->parsed())
      return cmd_convolve(space_file, datum_file, datum2_file);
    if (dual->parsed()) return cmd_dual(space_file, datum_file);
    if (resid->parsed())
      return cmd_residuate(space_file, datum_file, datum2_file);
    if (trunc->parsed())
      return cmd_truncate(space_file, datum_file, complex_file, field_flag, n);
    if (phico->parsed())
      return cmd_phi_cohomology(space_file, datum_file, complex_file,
                                field_flag, n);
    if (verify_cmd->parsed()) {
      if (const char* env = std::getenv("TSTRUCT_SEED"))
        opts.seed = std::strtoull(env, nullptr, 10);
      opts.mutation = verify::parse_mutation(mutate);
      return cmd_verify(opts, suite);
    }
    if (enum_cmd->parsed()) return cmd_enumerate(enum_points, enum_codim);
  } catch (const CertificateFailure& e) {
    std::fprintf(stderr, "certificate failure: %s\n", e.what());
    return kExitInternal;
  } catch (const InvariantError& e) {
    std::fprintf(stderr, "internal invariant failure: %s\n", e.what());
    return kExitInternal;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitValidation;
}
