#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "optdom/error.hpp"
#include "optdom/factor.hpp"
#include "optdom/io.hpp"
#include "optdom/matop.hpp"
#include "optdom/oracle.hpp"
#include "optdom/report.hpp"
#include "optdom/vmeasure.hpp"

namespace optdom {

using io::json;

/// Everything run_analyze needs. Matrix and codomain stay as JSON so the
/// report can echo them verbatim.
struct AnalysisConfig {
  json matrix;
  json codomain;
  std::filesystem::path base_dir;
  double p = 2.0;
  std::vector<Index> schedule{2, 4, 8, 16};
  std::size_t n_enum = 20;
  Index n_E = 256;
  std::uint64_t seed = 0;
  std::size_t restarts = 8;
  bool use_tail = true;
  Index series_terms = 64;
  std::vector<FiniteVector> probes;
  std::string out_json;
  std::string out_markdown;

  void validate() const {
    if (!(p > 1.0) || !std::isfinite(p)) throw SchemaError("/p", "p must be a finite number > 1");
    if (schedule.empty()) throw SchemaError("/schedule", "schedule must not be empty");
    for (std::size_t k = 0; k < schedule.size(); ++k)
      if (schedule[k] == 0 || (k > 0 && schedule[k] <= schedule[k - 1]))
        throw SchemaError("/schedule", "schedule must be strictly increasing positive integers");
    if (n_enum > kMaxEnumeration) throw SchemaError("/n_enum", "n_enum must not exceed " + std::to_string(kMaxEnumeration));
    if (n_E < schedule.back()) throw SchemaError("/n_E", "n_E must be at least the largest schedule entry");
    if (series_terms == 0) throw SchemaError("/series_terms", "series_terms must be positive");
    if (n_E < series_terms) throw SchemaError("/n_E", "n_E must be at least series_terms");
    if (restarts == 0) throw SchemaError("/restarts", "restarts must be positive");
  }
};

namespace detail {

inline std::uint64_t as_uint(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::uint64_t>(j.get<long long>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    std::size_t used = 0;
    try {
      const std::uint64_t v = std::stoull(s, &used, 0);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  throw SchemaError(path, "expected a nonnegative integer");
}

/// Inline object, or a string naming a JSON file relative to base.
inline json inline_or_file(const json& j, const std::filesystem::path& base, const std::string& path) {
  if (j.is_string()) {
    std::filesystem::path file = j.get<std::string>();
    if (file.is_relative()) file = base / file;
    return io::read_json_file(file, path);
  }
  if (!j.is_object()) throw SchemaError(path, "expected an object or a file name");
  return j;
}

}  // namespace detail

/// Overlays the fields present in `j` onto `cfg`.
inline void apply_config_json(AnalysisConfig& cfg, const json& j) {
  if (!j.is_object()) throw SchemaError("/", "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    const std::string path = "/" + key;
    if (key == "matrix") {
      cfg.matrix = detail::inline_or_file(v, cfg.base_dir, path);
    } else if (key == "codomain") {
      cfg.codomain = detail::inline_or_file(v, cfg.base_dir, path);
    } else if (key == "p") {
      cfg.p = io::detail::as_number(v, path);
    } else if (key == "schedule") {
      if (!v.is_array()) throw SchemaError(path, "expected an array of positive integers");
      cfg.schedule.clear();
      for (std::size_t k = 0; k < v.size(); ++k) cfg.schedule.push_back(detail::as_uint(v[k], path + "/" + std::to_string(k)));
    } else if (key == "n_enum") {
      cfg.n_enum = detail::as_uint(v, path);
    } else if (key == "n_E") {
      cfg.n_E = detail::as_uint(v, path);
    } else if (key == "seed") {
      cfg.seed = detail::as_uint(v, path);
    } else if (key == "restarts") {
      cfg.restarts = detail::as_uint(v, path);
    } else if (key == "series_terms") {
      cfg.series_terms = detail::as_uint(v, path);
    } else if (key == "use_tail") {
      if (!v.is_boolean()) throw SchemaError(path, "expected a boolean");
      cfg.use_tail = v.get<bool>();
    } else if (key == "probes") {
      if (!v.is_array()) throw SchemaError(path, "expected an array of vectors");
      cfg.probes.clear();
      for (std::size_t k = 0; k < v.size(); ++k) cfg.probes.push_back(io::vector_from_json(v[k], path + "/" + std::to_string(k)));
    } else if (key == "outputs") {
      if (!v.is_object()) throw SchemaError(path, "expected an object");
      if (v.contains("json")) cfg.out_json = io::detail::string_field(v, "json", path);
      if (v.contains("markdown")) cfg.out_markdown = io::detail::string_field(v, "markdown", path);
    } else {
      throw SchemaError(path, "unknown field");
    }
  }
}

struct AnalysisResult {
  json report;  // without metadata
  std::string markdown;
  std::vector<std::string> disagreements;
};

/// Continuity check, constants along the schedule with grid-oracle
/// confirmation for n <= 4, column-norm series, row criterion (nonnegative
/// matrix into Lq), and L1(m) / L^(1/p)(m) norms of the probe vectors.
inline AnalysisResult run_analyze(const AnalysisConfig& cfg) {
  cfg.validate();
  if (cfg.matrix.is_null()) throw SchemaError("/matrix", "missing required field");
  if (cfg.codomain.is_null()) throw SchemaError("/codomain", "missing required field");
  const MatrixOperator m = io::matrix_from_json(cfg.matrix, "/matrix", cfg.base_dir);
  const SpaceSpec e = io::space_from_json(cfg.codomain, "/codomain");

  FactorOptions fo;
  fo.ascent.seed = derive_seed(cfg.seed, "analyze");
  fo.ascent.restarts = cfg.restarts;
  fo.n_enum = cfg.n_enum;
  fo.use_tail = cfg.use_tail;

  AnalysisResult out;
  json& rep = out.report;
  rep["schema_version"] = report::kSchemaVersion;
  rep["input"] = {{"matrix", cfg.matrix},
                  {"codomain", io::space_to_json(e)},
                  {"codomain_description", e.describe()},
                  {"p", cfg.p},
                  {"schedule", cfg.schedule},
                  {"n_enum", cfg.n_enum},
                  {"n_E", cfg.n_E},
                  {"seed", cfg.seed},
                  {"restarts", cfg.restarts},
                  {"use_tail", cfg.use_tail},
                  {"series_terms", cfg.series_terms}};

  rep["continuity"] = report::continuity_to_json(continuity_check(m, e, cfg.schedule, cfg.n_E, cfg.use_tail));

  const FactorabilityReport fr = factorability_verdict(m, e, cfg.p, cfg.schedule, cfg.n_E, fo, cfg.series_terms);
  rep["factorability"] = report::factorability_to_json(fr);

  json checks = json::array();
  for (const ConstantPoint& c : fr.constants) {
    if (c.n > 4) continue;
    const double grid = oracle::grid_best_constant(m, e, SpaceSpec::lq(cfg.p), c.n, cfg.n_E);
    const bool shortfall = c.estimate.value < 0.99 * grid;
    checks.push_back({{"n", c.n},
                      {"oracle", "simplex-grid"},
                      {"ascent", io::number(c.estimate.value)},
                      {"grid", io::number(grid)},
                      {"agree", !shortfall}});
    if (shortfall) {
      std::ostringstream os;
      os << "C_p(" << c.n << "): ascent " << c.estimate.value << " below grid oracle " << grid << " by more than 1%";
      out.disagreements.push_back(os.str());
    }
  }
  rep["oracle_checks"] = checks;

  const bool lq_codomain = e.kind() == SpaceKind::lq && e.q() >= 1.0 && std::isfinite(e.q());
  if (m.nonnegative() && lq_codomain)
    rep["condition_II"] = report::rows_to_json(rows_condition(m, e.q(), cfg.series_terms, cfg.n_E));
  else
    rep["condition_II"] = {{"skipped", "row criterion needs a matrix declared nonnegative and codomain Lq(q), 1 <= q < inf"}};

  json probes = json::array();
  if (!cfg.probes.empty()) {
    const AtomicVectorMeasure mu(m, e, cfg.n_E);
    MeasureOptions mo;
    mo.n_enum = cfg.n_enum;
    mo.seed = derive_seed(cfg.seed, "probes");
    mo.use_tail = cfg.use_tail;
    for (const FiniteVector& f : cfg.probes) {
      json p = report::domain_norms_to_json(optimal_domain_norms(mu, f, cfg.p, mo));
      p["vector"] = io::vector_to_json(f);
      probes.push_back(p);
    }
  }
  rep["probes"] = probes;
  rep["verdict"] = to_string(fr.verdict);
  if (!out.disagreements.empty()) rep["oracle_disagreements"] = out.disagreements;
  out.markdown = report::markdown(rep);
  return out;
}

}  // namespace optdom
