#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "optdom/error.hpp"
#include "optdom/estimate.hpp"
#include "optdom/expression.hpp"
#include "optdom/finite_vector.hpp"
#include "optdom/matrix.hpp"
#include "optdom/space.hpp"

namespace optdom::io {

using nlohmann::json;

/// JSON number, or the string "inf" / "-inf" / "nan" for non-finite values.
inline json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

namespace detail {

inline std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(join(path, key), "missing required field");
  return *it;
}

/// Number, or one of the strings "inf" / "infinity".
inline double as_number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity") return kInf;
  }
  throw SchemaError(path, "expected a number");
}

inline double number_field(const json& j, const std::string& key, const std::string& path) {
  return as_number(require(j, key, path), join(path, key));
}

inline double number_or(const json& j, const std::string& key, double fallback, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as_number(j.at(key), join(path, key));
}

inline bool bool_or(const json& j, const std::string& key, bool fallback, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw SchemaError(join(path, key), "expected a boolean");
  return j.at(key).get<bool>();
}

inline std::string string_field(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_string()) throw SchemaError(join(path, key), "expected a string");
  return v.get<std::string>();
}

inline std::vector<double> number_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_number(j[k], path + "/" + std::to_string(k)));
  return out;
}

/// Re-raises library errors raised while building a node as schema errors
/// located at that node.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

}  // namespace detail

inline Weights weights_from_json(const json& j, const std::string& path) {
  using namespace detail;
  const std::string kind = string_field(j, "kind", path);
  return at_path(path, [&] {
    if (kind == "power_decay")
      return Weights::power_decay(number_field(j, "exponent", path), number_or(j, "constant", 1.0, path));
    if (kind == "geometric")
      return Weights::geometric(number_field(j, "ratio", path), number_or(j, "constant", 1.0, path));
    if (kind == "explicit") return Weights::explicit_values(number_array(require(j, "values", path), join(path, "values")));
    throw SchemaError(join(path, "kind"), "unknown weights kind '" + kind + "'");
  });
}

inline SpaceSpec space_from_json(const json& j, const std::string& path = "") {
  using namespace detail;
  const std::string variant = string_field(j, "variant", path);
  SpaceSpec s = at_path(path, [&]() -> SpaceSpec {
    if (variant == "lq") return SpaceSpec::lq(number_field(j, "q", path));
    if (variant == "weighted_lq")
      return SpaceSpec::weighted_lq(number_field(j, "q", path), weights_from_json(require(j, "weights", path), join(path, "weights")));
    if (variant == "power") {
      const std::string key = j.contains("base") ? "base" : "left";
      return SpaceSpec::power(space_from_json(require(j, key, path), join(path, key)), number_field(j, "p", path));
    }
    if (variant == "sum" || variant == "intersection") {
      const SpaceSpec l = space_from_json(require(j, "left", path), join(path, "left"));
      const SpaceSpec r = space_from_json(require(j, "right", path), join(path, "right"));
      return variant == "sum" ? SpaceSpec::sum(l, r) : SpaceSpec::intersection(l, r);
    }
    throw SchemaError(join(path, "variant"), "unknown variant '" + variant + "'");
  });
  if (j.contains("has_fatou")) s = s.with_fatou(bool_or(j, "has_fatou", true, path));
  return s;
}

inline json weights_to_json(const Weights& w) {
  switch (w.kind()) {
    case Weights::Kind::power_decay:
      return {{"kind", "power_decay"}, {"exponent", w.parameter()}, {"constant", w.constant()}};
    case Weights::Kind::geometric:
      return {{"kind", "geometric"}, {"ratio", w.parameter()}, {"constant", w.constant()}};
    case Weights::Kind::explicit_values:
      return {{"kind", "explicit"}, {"values", w.values()}};
  }
  return json::object();
}

inline json space_to_json(const SpaceSpec& s) {
  json j;
  switch (s.kind()) {
    case SpaceKind::lq: j = {{"variant", "lq"}, {"q", number(s.q())}}; break;
    case SpaceKind::weighted_lq:
      j = {{"variant", "weighted_lq"}, {"q", number(s.q())}, {"weights", weights_to_json(s.weights())}};
      break;
    case SpaceKind::power: j = {{"variant", "power"}, {"p", s.p()}, {"base", space_to_json(s.base())}}; break;
    case SpaceKind::sum:
    case SpaceKind::intersection:
      j = {{"variant", s.kind() == SpaceKind::sum ? "sum" : "intersection"},
           {"left", space_to_json(s.left())},
           {"right", space_to_json(s.right())}};
      break;
  }
  j["has_fatou"] = s.has_fatou();
  j["sigma_order_continuous"] = s.sigma_order_continuous();
  return j;
}

/// {"indices": [...], "values": [...]} or a plain array (dense from index 1).
inline FiniteVector vector_from_json(const json& j, const std::string& path = "") {
  using namespace detail;
  if (j.is_array()) {
    const std::vector<double> v = number_array(j, path);
    return at_path(path, [&] { return FiniteVector::from_dense(v); });
  }
  const json& idx = require(j, "indices", path);
  const std::vector<double> vals = number_array(require(j, "values", path), join(path, "values"));
  if (!idx.is_array()) throw SchemaError(join(path, "indices"), "expected an array of positive integers");
  if (idx.size() != vals.size()) throw SchemaError(path, "indices and values differ in length");
  std::vector<Entry> es;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (!idx[k].is_number_integer() || idx[k].get<long long>() < 1)
      throw SchemaError(join(path, "indices") + "/" + std::to_string(k), "expected a positive integer");
    es.push_back({static_cast<Index>(idx[k].get<long long>()), vals[k]});
  }
  return at_path(path, [&] { return FiniteVector::from_entries(std::move(es)); });
}

inline json vector_to_json(const FiniteVector& f) {
  json idx = json::array(), vals = json::array();
  for (const Entry& e : f.entries()) {
    idx.push_back(e.index);
    vals.push_back(e.value);
  }
  return {{"indices", idx}, {"values", vals}};
}

inline json estimate_to_json(const NormEstimate& e) {
  json j = {{"lower", number(e.lower)}, {"upper", number(e.upper)}, {"method", e.method},
            {"certificate", e.certificate}};
  if (e.value) j["value"] = number(*e.value);
  return j;
}

inline DecayModel decay_from_json(const json& j, const std::string& path) {
  using namespace detail;
  const std::string kind = string_field(j, "kind", path);
  return at_path(path, [&] {
    if (kind == "none") return DecayModel::none();
    if (kind == "power_decay")
      return DecayModel::power_decay(number_field(j, "constant", path), number_field(j, "exponent", path));
    if (kind == "geometric")
      return DecayModel::geometric(number_field(j, "constant", path), number_field(j, "ratio", path));
    throw SchemaError(join(path, "kind"), "unknown tail model kind '" + kind + "'");
  });
}

/// Reads a dense block from CSV: either rows of numbers, or a header
/// "i,j,value" followed by sparse triples.
inline MatrixOperator matrix_from_csv(const std::filesystem::path& file, std::optional<bool> nonnegative,
                                      const std::string& path) {
  std::ifstream in(file);
  if (!in) throw SchemaError(path, "cannot open matrix file '" + file.string() + "'");
  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<std::tuple<Index, Index, double>> triples;
  bool sparse = false;
  std::size_t lineno = 0;
  auto fields = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
  };
  auto parse = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty() || !std::isfinite(v))
      throw SchemaError(path, file.string() + " line " + std::to_string(lineno) + ": '" + s + "' is not a number");
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto cells = fields(line);
    if (lineno == 1 && cells.size() == 3 && cells[0] == "i" && cells[1] == "j" && cells[2] == "value") {
      sparse = true;
      continue;
    }
    if (sparse) {
      if (cells.size() != 3) throw SchemaError(path, file.string() + " line " + std::to_string(lineno) + ": expected i,j,value");
      const double i = parse(cells[0]), jj = parse(cells[1]);
      if (i < 1 || jj < 1 || i != std::floor(i) || jj != std::floor(jj))
        throw SchemaError(path, file.string() + " line " + std::to_string(lineno) + ": indices must be positive integers");
      triples.emplace_back(static_cast<Index>(i), static_cast<Index>(jj), parse(cells[2]));
    } else {
      std::vector<double> r;
      for (const auto& c : cells) r.push_back(parse(c));
      if (!rows.empty() && r.size() != rows.front().size())
        throw SchemaError(path, file.string() + " line " + std::to_string(lineno) + ": ragged row");
      rows.push_back(std::move(r));
    }
  }
  return detail::at_path(path, [&] {
    if (sparse) return MatrixOperator::sparse(triples, nonnegative);
    if (rows.empty()) throw SchemaError(path, file.string() + " contains no data");
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return MatrixOperator::dense(rows.size(), rows.front().size(), std::move(flat), nonnegative);
  });
}

/// Matrix JSON: {"kind", "params", "nonnegative", "column_tail",
/// "column_norm_tail", "column_extent", "row_extent"}. Relative file paths
/// are resolved against `base_dir`.
inline MatrixOperator matrix_from_json(const json& j, const std::string& path = "",
                                       const std::filesystem::path& base_dir = {}) {
  using namespace detail;
  const std::string kind = string_field(j, "kind", path);
  const json params = j.contains("params") ? j.at("params") : json::object();
  const std::string pp = join(path, "params");
  if (!params.is_object()) throw SchemaError(pp, "expected an object");
  std::optional<bool> nonneg;
  if (j.contains("nonnegative")) nonneg = bool_or(j, "nonnegative", false, path);

  MatrixOperator m = at_path(path, [&]() -> MatrixOperator {
    if (kind == "identity") return MatrixOperator::identity();
    if (kind == "cesaro") return MatrixOperator::cesaro();
    if (kind == "hilbert") return MatrixOperator::hilbert();
    if (kind == "diagonal") {
      if (params.contains("values"))
        return MatrixOperator::diagonal(DiagonalSequence::explicit_values(number_array(params.at("values"), join(pp, "values"))), nonneg);
      const std::string dk = string_field(params, "kind", pp);
      const double c = number_or(params, "constant", 1.0, pp);
      if (dk == "geometric") return MatrixOperator::diagonal(DiagonalSequence::geometric(number_field(params, "ratio", pp), c), nonneg);
      if (dk == "power") return MatrixOperator::diagonal(DiagonalSequence::power(number_field(params, "exponent", pp), c), nonneg);
      throw SchemaError(join(pp, "kind"), "unknown diagonal kind '" + dk + "'");
    }
    if (kind == "dense") {
      if (params.contains("file")) {
        std::filesystem::path file = string_field(params, "file", pp);
        if (file.is_relative()) file = base_dir / file;
        return matrix_from_csv(file, nonneg, join(pp, "file"));
      }
      const double rows = number_field(params, "rows", pp), cols = number_field(params, "cols", pp);
      if (rows < 1 || cols < 1 || rows != std::floor(rows) || cols != std::floor(cols))
        throw SchemaError(pp, "rows and cols must be positive integers");
      return MatrixOperator::dense(static_cast<Index>(rows), static_cast<Index>(cols),
                                   number_array(require(params, "values", pp), join(pp, "values")), nonneg);
    }
    if (kind == "expr") {
      const Expression e(string_field(params, "entry", pp));
      MatrixTraits t;
      t.nonnegative = nonneg.value_or(false);
      return MatrixOperator::expression(e, std::move(t));
    }
    throw SchemaError(join(path, "kind"), "unknown matrix kind '" + kind + "'");
  });

  MatrixTraits t = m.traits();
  bool changed = false;
  if (nonneg && *nonneg != t.nonnegative) {
    t.nonnegative = *nonneg;
    changed = true;
  }
  if (j.contains("column_tail")) {
    t.column_tail = decay_from_json(j.at("column_tail"), join(path, "column_tail"));
    changed = true;
  }
  if (j.contains("column_norm_tail")) {
    t.column_norm_tail = decay_from_json(j.at("column_norm_tail"), join(path, "column_norm_tail"));
    t.column_norm_tail_lq_only = false;
    changed = true;
  }
  auto extent = [&](const char* key, bool by_column) {
    if (!j.contains(key)) return;
    const std::string src = at_path(join(path, key), [&] { return string_field(j, key, path); });
    const Expression e = at_path(join(path, key), [&] { return Expression(src); });
    auto fn = [e, by_column](Index k) {
      const double v = by_column ? e(0.0, static_cast<double>(k)) : e(static_cast<double>(k), 0.0);
      return v < 1.0 ? Index{0} : static_cast<Index>(std::floor(v));
    };
    if (by_column)
      t.column_extent = fn;
    else
      t.row_extent = fn;
    changed = true;
  };
  extent("column_extent", true);
  extent("row_extent", false);
  if (!changed) return m;
  return MatrixOperator(m.name(), [m](Index i, Index jj) { return m.entry(i, jj); }, std::move(t));
}

inline json read_json_file(const std::filesystem::path& file, const std::string& path = "") {
  std::ifstream in(file);
  if (!in) throw SchemaError(path.empty() ? "/" : path, "cannot open '" + file.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.empty() ? "/" : path, "'" + file.string() + "' is not valid JSON: " + e.what());
  }
}

/// Writes text to `file` through a temporary file and rename.
inline void write_atomically(const std::filesystem::path& file, const std::string& text) {
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace optdom::io
