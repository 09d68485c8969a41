#pragma once

#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "optdom/factor.hpp"
#include "optdom/growth.hpp"
#include "optdom/io.hpp"
#include "optdom/matop.hpp"
#include "optdom/vmeasure.hpp"

namespace optdom::report {

using io::json;
using io::number;

inline constexpr int kSchemaVersion = 1;

inline json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline json fit_to_json(const GrowthFit& f) {
  return {{"exponent", number(f.exponent)}, {"points", f.points}, {"verdict", to_string(f.verdict)}};
}

inline json constant_to_json(const ConstantEstimate& c) {
  json j = {{"value", number(c.value)},     {"maximizer", numbers(c.maximizer)}, {"iterations", c.iterations},
            {"evaluations", c.evaluations}, {"method", c.method}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline json continuity_to_json(const ContinuityReport& r) {
  json cols = json::array();
  for (std::size_t k = 0; k < r.columns.size(); ++k) {
    json c = io::estimate_to_json(r.columns[k]);
    c["j"] = k + 1;
    cols.push_back(c);
  }
  json series = json::array();
  for (const ColumnSupPoint& p : r.series)
    series.push_back({{"n", p.n}, {"sup_lower", number(p.sup_lower)}, {"sup_upper", number(p.sup_upper)}});
  return {{"columns", cols}, {"series", series}, {"fit", fit_to_json(r.fit)}, {"verdict", to_string(r.verdict)},
          {"note", r.note}};
}

inline json condition_I_to_json(const ConditionIResult& c) {
  json j = {{"p", c.p},
            {"exponent", number(c.exponent)},
            {"terms", c.partial_lower.size()},
            {"partial_sums_lower", numbers(c.partial_lower)},
            {"partial_sums_upper", numbers(c.partial_upper)},
            {"certified", c.certified},
            {"verdict", to_string(c.verdict)},
            {"fit", fit_to_json(c.fit)},
            {"note", c.note}};
  j["tail_bound"] = c.tail_bound ? number(*c.tail_bound) : json(nullptr);
  if (auto h = c.hoelder_constant()) j["hoelder_constant"] = number(*h);
  return j;
}

inline json rows_to_json(const RowsConditionResult& r) {
  return {{"q", r.q},
          {"row_l1_norms", numbers(r.row_norms)},
          {"partial_sums", numbers(r.partial_sums)},
          {"truncated_rows", r.truncated_rows},
          {"fit", fit_to_json(r.fit)},
          {"verdict", to_string(r.verdict)},
          {"note", r.note}};
}

inline json factorability_to_json(const FactorabilityReport& r) {
  json cs = json::array();
  for (const ConstantPoint& c : r.constants) {
    json j = constant_to_json(c.estimate);
    j["n"] = c.n;
    cs.push_back(j);
  }
  return {{"p", r.p},
          {"schedule", r.schedule},
          {"constants", cs},
          {"fit", fit_to_json(r.fit)},
          {"growth_exponent", number(r.fit.exponent)},
          {"monotone", r.monotone},
          {"condition_I", condition_I_to_json(r.condition_I)},
          {"verdict", to_string(r.verdict)},
          {"note", r.note}};
}

inline json domain_norms_to_json(const OptimalDomainNorms& d) {
  return {{"l1", io::estimate_to_json(d.l1)},
          {"l_inv_p", io::estimate_to_json(d.l_inv_p)},
          {"intersection", io::estimate_to_json(d.intersection)}};
}

namespace detail {

inline std::string fmt(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  if (v.is_number_float()) {
    std::ostringstream os;
    os << std::setprecision(10) << v.get<double>();
    return os.str();
  }
  return v.dump();
}

}  // namespace detail

/// Human-readable rendering of an analysis report.
inline std::string markdown(const json& rep) {
  using detail::fmt;
  std::ostringstream md;
  const json& in = rep.at("input");
  md << "# Factorability analysis\n\n";
  md << "- matrix: `" << in.at("matrix").at("kind").get<std::string>() << "`\n";
  md << "- codomain: `" << in.at("codomain_description").get<std::string>() << "`\n";
  md << "- p = " << fmt(in.at("p")) << ", codomain truncation n_E = " << fmt(in.at("n_E"))
     << ", seed = " << fmt(in.at("seed")) << "\n\n";
  md << "All verdicts below are finite-truncation evidence unless marked certified.\n\n";

  if (rep.contains("continuity")) {
    const json& c = rep.at("continuity");
    md << "## Column norms\n\n";
    if (c.contains("skipped")) {
      md << "Skipped: " << fmt(c.at("skipped")) << "\n\n";
    } else {
      md << "| n | sup lower | sup upper |\n|---|---|---|\n";
      for (const json& p : c.at("series"))
        md << "| " << fmt(p.at("n")) << " | " << fmt(p.at("sup_lower")) << " | " << fmt(p.at("sup_upper")) << " |\n";
      md << "\nGrowth exponent " << fmt(c.at("fit").at("exponent")) << ": **" << fmt(c.at("verdict")) << "**\n\n";
    }
  }

  const json& f = rep.at("factorability");
  md << "## Constants C_p(n)\n\n| n | C_p(n) lower bound | grid oracle |\n|---|---|---|\n";
  for (const json& c : f.at("constants")) {
    std::string oracle = "-";
    for (const json& o : rep.at("oracle_checks"))
      if (o.at("n") == c.at("n")) oracle = fmt(o.at("grid"));
    md << "| " << fmt(c.at("n")) << " | " << fmt(c.at("value")) << " | " << oracle << " |\n";
  }
  md << "\nGrowth exponent " << fmt(f.at("growth_exponent")) << ", monotone: " << fmt(f.at("monotone")) << ".\n\n";

  const json& ci = f.at("condition_I");
  md << "## Column-norm series\n\n";
  const json& pl = ci.at("partial_sums_lower");
  if (!pl.empty()) {
    md << "Sum of ||C_j||^p' over " << pl.size() << " terms: " << fmt(pl.back());
    if (!ci.at("tail_bound").is_null()) md << " (declared tail <= " << fmt(ci.at("tail_bound")) << ")";
    md << "\n\n";
  }
  md << "Verdict: **" << fmt(ci.at("verdict")) << "**. " << fmt(ci.at("note")) << "\n\n";

  if (rep.contains("condition_II")) {
    const json& c2 = rep.at("condition_II");
    md << "## Row criterion\n\n";
    if (c2.contains("skipped")) {
      md << "Skipped: " << fmt(c2.at("skipped")) << "\n\n";
    } else {
      const json& ps = c2.at("partial_sums");
      if (!ps.empty()) md << "Sum of ||F_i||_1^q over " << ps.size() << " rows: " << fmt(ps.back()) << "\n\n";
      md << "Verdict: **" << fmt(c2.at("verdict")) << "**. " << fmt(c2.at("note")) << "\n\n";
    }
  }

  if (!rep.at("probes").empty()) {
    md << "## Probe vectors\n\n| # | L1(m) | L^(1/p)(m) | intersection |\n|---|---|---|---|\n";
    std::size_t k = 0;
    for (const json& p : rep.at("probes")) {
      auto cell = [&](const char* key) {
        const json& e = p.at(key);
        return e.contains("value") ? fmt(e.at("value")) : "[" + fmt(e.at("lower")) + ", " + fmt(e.at("upper")) + "]";
      };
      md << "| " << ++k << " | " << cell("l1") << " | " << cell("l_inv_p") << " | " << cell("intersection") << " |\n";
    }
    md << "\n";
  }

  md << "## Verdict\n\n**" << fmt(rep.at("verdict")) << "**: " << fmt(f.at("note")) << "\n";
  return md.str();
}

}  // namespace optdom::report
