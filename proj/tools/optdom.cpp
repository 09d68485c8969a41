#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "optdom/optdom.hpp"

namespace fs = std::filesystem;
using optdom::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitDisagreement = 3;

// Inline JSON when the argument starts with '{' or '[', a file name otherwise.
json json_argument(const std::string& arg, const std::string& path, fs::path* base = nullptr) {
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) {
    try {
      return json::parse(arg);
    } catch (const json::parse_error& e) {
      throw optdom::SchemaError(path, std::string("invalid inline JSON: ") + e.what());
    }
  }
  if (base) *base = fs::path(arg).parent_path();
  return optdom::io::read_json_file(arg, path);
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("OPTDOM_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(s, &used, 0);
    if (used == std::string(s).size()) return v;
  } catch (const std::exception&) {
  }
  throw optdom::SchemaError("OPTDOM_SEED", "expected a nonnegative integer");
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void emit(const std::string& file, const std::string& text) {
  if (file.empty() || file == "-")
    std::cout << text;
  else
    optdom::io::write_atomically(file, text);
}

std::vector<optdom::Index> parse_schedule(const std::string& s) {
  std::vector<optdom::Index> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(static_cast<optdom::Index>(v));
    } catch (const std::exception&) {
      throw optdom::SchemaError("/schedule", "'" + item + "' is not a positive integer");
    }
  }
  return out;
}

struct AnalyzeFlags {
  std::string config, matrix, codomain, schedule, out, md;
  std::optional<double> p;
  std::optional<std::size_t> n_enum, restarts;
  std::optional<optdom::Index> n_E, series_terms;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> probes;
  bool no_tail = false;
};

int run_analyze(const AnalyzeFlags& fl) {
  optdom::AnalysisConfig cfg;
  bool seed_given = false;
  if (!fl.matrix.empty()) {
    fs::path base;
    cfg.matrix = json_argument(fl.matrix, "/matrix", &base);
    cfg.base_dir = base;
  }
  if (!fl.codomain.empty()) cfg.codomain = json_argument(fl.codomain, "/codomain");
  if (fl.p) cfg.p = *fl.p;
  if (!fl.schedule.empty()) cfg.schedule = parse_schedule(fl.schedule);
  if (fl.n_enum) cfg.n_enum = *fl.n_enum;
  if (fl.restarts) cfg.restarts = *fl.restarts;
  if (fl.series_terms) cfg.series_terms = *fl.series_terms;
  if (fl.seed) {
    cfg.seed = *fl.seed;
    seed_given = true;
  }
  if (fl.no_tail) cfg.use_tail = false;
  for (std::size_t k = 0; k < fl.probes.size(); ++k)
    cfg.probes.push_back(optdom::io::vector_from_json(json_argument(fl.probes[k], "/probes/" + std::to_string(k)),
                                                      "/probes/" + std::to_string(k)));
  cfg.out_json = fl.out;
  cfg.out_markdown = fl.md;

  bool n_E_given = fl.n_E.has_value();
  bool series_given = fl.series_terms.has_value();
  if (fl.n_E) cfg.n_E = *fl.n_E;
  if (!fl.config.empty()) {
    const json j = optdom::io::read_json_file(fl.config);
    cfg.base_dir = fs::path(fl.config).parent_path();
    optdom::apply_config_json(cfg, j);
    seed_given = seed_given || j.contains("seed");
    n_E_given = n_E_given || j.contains("n_E");
    series_given = series_given || j.contains("series_terms");
  }
  if (!seed_given)
    if (auto s = env_seed()) cfg.seed = *s;
  if (!n_E_given) cfg.n_E = std::max<optdom::Index>(cfg.n_E, cfg.schedule.empty() ? 0 : cfg.schedule.back());
  if (!series_given) cfg.series_terms = std::max<optdom::Index>(64, cfg.schedule.empty() ? 0 : cfg.schedule.back());
  if (!series_given && n_E_given) cfg.series_terms = std::min(cfg.series_terms, cfg.n_E);

  const optdom::AnalysisResult r = optdom::run_analyze(cfg);
  json rep = r.report;
  rep["metadata"] = {{"generated_at", utc_now()}, {"tool", "optdom"}};
  emit(cfg.out_json, rep.dump(2) + "\n");
  if (!cfg.out_markdown.empty()) emit(cfg.out_markdown, r.markdown);
  for (const std::string& d : r.disagreements) std::cerr << "oracle disagreement: " << d << "\n";
  return r.disagreements.empty() ? kExitOk : kExitDisagreement;
}

struct NormFlags {
  std::string config, selector, space, matrix, codomain, vector, out;
  std::optional<double> p;
  std::optional<std::size_t> n_enum;
  std::optional<optdom::Index> n_E;
  std::optional<std::uint64_t> seed;
};

int run_norm(NormFlags fl) {
  json cfg = json::object();
  fs::path base;
  if (!fl.config.empty()) {
    cfg = optdom::io::read_json_file(fl.config);
    if (!cfg.is_object()) throw optdom::SchemaError("/", "config must be a JSON object");
    base = fs::path(fl.config).parent_path();
  }
  using optdom::io::detail::as_number;
  const std::string selector = cfg.contains("selector") ? optdom::io::detail::string_field(cfg, "selector", "") : fl.selector;
  const json vec = cfg.contains("vector") ? cfg.at("vector") : (fl.vector.empty() ? json() : json_argument(fl.vector, "/vector"));
  if (vec.is_null()) throw optdom::SchemaError("/vector", "missing required field");
  const optdom::FiniteVector f = optdom::io::vector_from_json(vec, "/vector");

  optdom::NormEstimate est;
  if (selector == "space") {
    const json sp = cfg.contains("space") ? cfg.at("space") : (fl.space.empty() ? json() : json_argument(fl.space, "/space"));
    if (sp.is_null()) throw optdom::SchemaError("/space", "missing required field");
    const optdom::SpaceSpec s = optdom::io::space_from_json(sp, "/space");
    const optdom::NormValue v = optdom::evaluate(s, f);
    est = optdom::NormEstimate::bracket(v.lower, v.upper,
                                        v.lower == v.upper ? optdom::method::closed_form : optdom::method::local_search,
                                        "sequence-space norm in " + s.describe());
    est.value = v.value;
  } else if (selector == "l1m" || selector == "lpm") {
    json mj = cfg.contains("matrix") ? cfg.at("matrix") : json();
    if (mj.is_string()) {
      fs::path file = mj.get<std::string>();
      if (file.is_relative()) file = base / file;
      base = file.parent_path();
      mj = optdom::io::read_json_file(file, "/matrix");
    }
    if (mj.is_null() && !fl.matrix.empty()) mj = json_argument(fl.matrix, "/matrix", &base);
    if (mj.is_null()) throw optdom::SchemaError("/matrix", "missing required field");
    const json cj = cfg.contains("codomain") ? cfg.at("codomain") : (fl.codomain.empty() ? json() : json_argument(fl.codomain, "/codomain"));
    if (cj.is_null()) throw optdom::SchemaError("/codomain", "missing required field");
    const optdom::MatrixOperator m = optdom::io::matrix_from_json(mj, "/matrix", base);
    const optdom::SpaceSpec e = optdom::io::space_from_json(cj, "/codomain");
    optdom::Index n_E = fl.n_E.value_or(256);
    if (cfg.contains("n_E")) n_E = optdom::detail::as_uint(cfg.at("n_E"), "/n_E");
    optdom::MeasureOptions mo;
    if (fl.n_enum) mo.n_enum = *fl.n_enum;
    if (cfg.contains("n_enum")) mo.n_enum = optdom::detail::as_uint(cfg.at("n_enum"), "/n_enum");
    if (mo.n_enum > optdom::kMaxEnumeration) throw optdom::SchemaError("/n_enum", "n_enum must not exceed 24");
    std::uint64_t seed = fl.seed ? *fl.seed : env_seed().value_or(0);
    if (cfg.contains("seed")) seed = optdom::detail::as_uint(cfg.at("seed"), "/seed");
    mo.seed = optdom::derive_seed(seed, "norm");
    const optdom::AtomicVectorMeasure mu(m, e, n_E);
    if (selector == "l1m") {
      est = optdom::l1m_norm(mu, f, mo);
    } else {
      double p = fl.p.value_or(1.0);
      if (cfg.contains("p")) p = as_number(cfg.at("p"), "/p");
      else if (!fl.p) throw optdom::SchemaError("/p", "selector lpm needs p");
      est = optdom::lpm_norm(mu, f, p, mo);
    }
  } else {
    throw optdom::SchemaError("/selector", "expected one of space, l1m, lpm; got '" + selector + "'");
  }
  json out = optdom::io::estimate_to_json(est);
  out["selector"] = selector;
  emit(fl.out, out.dump(2) + "\n");
  return kExitOk;
}

struct VerifyFlags {
  std::string scale = "quick", matrix, codomain, out;
  std::optional<std::uint64_t> seed;
  optdom::Index n_E = 64;
};

int run_verify(const VerifyFlags& fl) {
  const std::uint64_t seed = fl.seed ? *fl.seed : env_seed().value_or(0);
  std::vector<optdom::verify::CheckResult> results;
  if (!fl.matrix.empty()) {
    fs::path base;
    const json mj = json_argument(fl.matrix, "/matrix", &base);
    const optdom::MatrixOperator m = optdom::io::matrix_from_json(mj, "/matrix", base);
    const optdom::SpaceSpec e = fl.codomain.empty() ? optdom::SpaceSpec::lq(2.0)
                                                    : optdom::io::space_from_json(json_argument(fl.codomain, "/codomain"), "/codomain");
    results = optdom::verify::matrix_checks(m, e, fl.n_E, fl.scale == "full" ? 200 : 20, seed);
  } else {
    const auto scale = fl.scale == "full" ? optdom::verify::Scale::full() : optdom::verify::Scale::quick();
    results = optdom::verify::run_suite(scale, seed);
  }
  bool ok = true;
  json summary = json::array();
  for (const auto& r : results) {
    ok = ok && r.passed();
    std::cout << (r.passed() ? "PASS " : "FAIL ") << std::left << std::setw(44) << r.name << " cases=" << r.cases
              << " failures=" << r.failures << " time=" << std::fixed << std::setprecision(2) << r.seconds << "s";
    std::cout.unsetf(std::ios::floatfield);
    if (!r.detail.empty()) std::cout << "  " << r.detail;
    std::cout << "\n";
    summary.push_back({{"name", r.name}, {"cases", r.cases}, {"failures", r.failures}, {"passed", r.passed()},
                       {"detail", r.detail}});
  }
  std::cout << (ok ? "all checks passed" : "some checks FAILED") << " (scale " << fl.scale << ", seed " << seed << ")\n";
  if (!fl.out.empty()) optdom::io::write_atomically(fl.out, json{{"scale", fl.scale}, {"seed", seed}, {"checks", summary}}.dump(2) + "\n");
  return ok ? kExitOk : kExitFailure;
}

struct GenerateFlags {
  std::string kind, out;
  double ratio = 0.5, exponent = -1.0, constant = 1.0;
  optdom::Index rows = 4, cols = 4;
  std::uint64_t seed = 0;
  bool nonnegative = false;
};

int run_generate(const GenerateFlags& fl) {
  json j;
  if (fl.kind == "identity" || fl.kind == "cesaro" || fl.kind == "hilbert") {
    j = {{"kind", fl.kind}};
  } else if (fl.kind == "diagonal-geometric") {
    j = {{"kind", "diagonal"}, {"params", {{"kind", "geometric"}, {"ratio", fl.ratio}, {"constant", fl.constant}}}};
  } else if (fl.kind == "diagonal-power") {
    j = {{"kind", "diagonal"}, {"params", {{"kind", "power"}, {"exponent", fl.exponent}, {"constant", fl.constant}}}};
  } else if (fl.kind == "row-decay") {
    j = {{"kind", "expr"},
         {"params", {{"entry", "(j <= i) * " + optdom::verify::detail::str(fl.ratio) + "^i"}}},
         {"nonnegative", true},
         {"row_extent", "i"}};
  } else if (fl.kind == "random-dense") {
    optdom::Rng rng(fl.seed, "generate");
    json values = json::array();
    for (optdom::Index k = 0; k < fl.rows * fl.cols; ++k)
      values.push_back(fl.nonnegative ? rng.uniform(0.0, 1.0) : rng.uniform(-1.0, 1.0));
    j = {{"kind", "dense"}, {"params", {{"rows", fl.rows}, {"cols", fl.cols}, {"values", values}}}};
    if (fl.nonnegative) j["nonnegative"] = true;
  } else {
    throw optdom::SchemaError("/kind", "unknown kind '" + fl.kind + "'");
  }
  optdom::io::matrix_from_json(j, "/");
  emit(fl.out, j.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optdom: optimal domains and factorability of matrix operators at finite truncation"};
  app.require_subcommand(1);

  AnalyzeFlags af;
  auto* analyze = app.add_subcommand("analyze", "continuity, factorability constants and series criteria for a matrix");
  analyze->add_option("--config", af.config, "analysis config (JSON); its fields override flags");
  analyze->add_option("--matrix", af.matrix, "matrix: JSON file or inline JSON");
  analyze->add_option("--codomain", af.codomain, "codomain space: JSON file or inline JSON");
  analyze->add_option("--p", af.p, "factorization exponent p > 1");
  analyze->add_option("--schedule", af.schedule, "truncation sizes, e.g. 2,4,8,16");
  analyze->add_option("--n-enum", af.n_enum, "largest support handled by exact sign enumeration (<= 24)");
  analyze->add_option("--n-E", af.n_E, "codomain truncation (rows)");
  analyze->add_option("--seed", af.seed, "random seed (falls back to OPTDOM_SEED)");
  analyze->add_option("--restarts", af.restarts, "random restarts of the constant search");
  analyze->add_option("--series-terms", af.series_terms, "terms of the column and row series");
  analyze->add_option("--probe", af.probes, "probe vector (JSON array or {indices, values}); repeatable");
  analyze->add_flag("--no-tail", af.no_tail, "ignore declared tail models");
  analyze->add_option("--out", af.out, "JSON report path (default: stdout)");
  analyze->add_option("--md", af.md, "markdown report path");

  NormFlags nf;
  auto* normc = app.add_subcommand("norm", "a single norm: sequence space, L1(m) or L^p(m)");
  normc->add_option("--config", nf.config, "JSON with selector, vector, space or matrix/codomain, p, n_E");
  normc->add_option("--selector", nf.selector, "space | l1m | lpm")->check(CLI::IsMember({"space", "l1m", "lpm"}));
  normc->add_option("--space", nf.space, "space JSON for selector space");
  normc->add_option("--matrix", nf.matrix, "matrix JSON for l1m / lpm");
  normc->add_option("--codomain", nf.codomain, "codomain JSON for l1m / lpm");
  normc->add_option("--vector", nf.vector, "vector: JSON array or {indices, values}");
  normc->add_option("--p", nf.p, "exponent for lpm");
  normc->add_option("--n-enum", nf.n_enum, "exact enumeration limit (<= 24)");
  normc->add_option("--n-E", nf.n_E, "codomain truncation (default 256)");
  normc->add_option("--seed", nf.seed, "random seed for the estimation branch");
  normc->add_option("--out", nf.out, "output path (default: stdout)");

  VerifyFlags vf;
  auto* verifyc = app.add_subcommand("verify", "run the invariant suite against the brute-force oracles");
  verifyc->add_option("--scale", vf.scale, "quick | full")->check(CLI::IsMember({"quick", "full"}));
  verifyc->add_option("--seed", vf.seed, "random seed (falls back to OPTDOM_SEED)");
  verifyc->add_option("--matrix", vf.matrix, "check a user matrix instead of the built-in suite");
  verifyc->add_option("--codomain", vf.codomain, "codomain for --matrix (default Lq(2))");
  verifyc->add_option("--n-E", vf.n_E, "codomain truncation for --matrix");
  verifyc->add_option("--out", vf.out, "JSON summary path");

  GenerateFlags gf;
  auto* gen = app.add_subcommand("generate", "emit a built-in matrix as JSON");
  gen->add_option("kind", gf.kind,
                  "identity | cesaro | hilbert | diagonal-geometric | diagonal-power | row-decay | random-dense")
      ->required();
  gen->add_option("--ratio", gf.ratio, "ratio for diagonal-geometric and row-decay");
  gen->add_option("--exponent", gf.exponent, "exponent for diagonal-power");
  gen->add_option("--constant", gf.constant, "leading constant for diagonal kinds");
  gen->add_option("--rows", gf.rows, "rows for random-dense");
  gen->add_option("--cols", gf.cols, "columns for random-dense");
  gen->add_option("--seed", gf.seed, "seed for random-dense");
  gen->add_flag("--nonnegative", gf.nonnegative, "nonnegative entries for random-dense");
  gen->add_option("--out", gf.out, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*analyze) return run_analyze(af);
    if (*normc) return run_norm(nf);
    if (*verifyc) return run_verify(vf);
    if (*gen) return run_generate(gf);
  } catch (const optdom::SchemaError& e) {
    std::cerr << "schema error at " << e.what() << "\n";
    return kExitInput;
  } catch (const optdom::OracleDisagreement& e) {
    std::cerr << "oracle disagreement: " << e.what() << "\n";
    return kExitDisagreement;
  } catch (const optdom::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
