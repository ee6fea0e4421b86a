#pragma once

// JSON encoding of matrices and input documents. Complex entries are
// two-element arrays [re, im]; a matrix is an array of rows.
//
//   {
//     "dimension": 2,
//     "generators": [ [[[0,0],[1,0]], [[0,0],[0,0]]] ],
//     "options": {"epsilon": 0.01, "k": 3,
//                 "tolerances": {"projection": 1e-9, "rank": 1e-9}}
//   }
//
// Projection files written by `construct --out` use the same layout, with
// the projections as "generators" and the originating algebra under
// "source".

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "projgen/algebra.hpp"
#include "projgen/errors.hpp"
#include "projgen/linalg.hpp"

namespace projgen {

using json = nlohmann::json;

struct DocumentOptions {
  std::optional<double> epsilon;
  std::optional<std::size_t> k;
  std::optional<double> tol_projection;
  std::optional<double> tol_rank;
};

struct InputDocument {
  std::size_t dimension = 0;
  std::vector<ComplexMatrix> generators;
  DocumentOptions options;
  std::optional<GeneratorSet> source;  // present in projection files

  GeneratorSet generator_set() const { return {dimension, generators, false, false}; }
};

inline json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array() || j.size() != dim) {
    throw parse_error(where + ": expected " + std::to_string(dim) + " rows");
  }
  std::vector<Complex> entries;
  entries.reserve(dim * dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != dim) {
      throw parse_error(where + ": row " + std::to_string(r) + " must have " +
                        std::to_string(dim) + " entries");
    }
    for (std::size_t c = 0; c < dim; ++c) {
      const json& z = row[c];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        throw parse_error(where + ": entry (" + std::to_string(r) + "," + std::to_string(c) +
                          ") must be [re, im]");
      }
      entries.emplace_back(z[0].get<double>(), z[1].get<double>());
    }
  }
  try {
    return ComplexMatrix::from_entries(dim, dim, std::move(entries));
  } catch (const precondition_error& e) {
    throw parse_error(where + ": " + e.what());
  }
}

namespace detail {

inline std::size_t natural_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number_integer() || obj[key].get<std::int64_t>() < 0) {
    throw parse_error(where + ": '" + key + "' must be a nonnegative integer");
  }
  return obj[key].get<std::size_t>();
}

inline std::vector<ComplexMatrix> generators_field(const json& obj, std::size_t dim,
                                                   const std::string& where) {
  if (!obj.contains("generators") || !obj["generators"].is_array()) {
    throw parse_error(where + ": 'generators' must be an array");
  }
  std::vector<ComplexMatrix> out;
  std::size_t idx = 0;
  for (const auto& g : obj["generators"]) {
    out.push_back(matrix_from_json(g, dim, where + ".generators[" + std::to_string(idx++) + "]"));
  }
  return out;
}

inline std::optional<double> number_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  if (!obj[key].is_number()) throw parse_error(where + ": '" + key + "' must be a number");
  return obj[key].get<double>();
}

}  // namespace detail

inline InputDocument parse_document(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw parse_error(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw parse_error("document must be a JSON object");

  InputDocument doc;
  doc.dimension = detail::natural_field(root, "dimension", "document");
  doc.generators = detail::generators_field(root, doc.dimension, "document");

  if (root.contains("options")) {
    const json& o = root["options"];
    if (!o.is_object()) throw parse_error("options must be an object");
    doc.options.epsilon = detail::number_field(o, "epsilon", "options");
    if (o.contains("k")) doc.options.k = detail::natural_field(o, "k", "options");
    if (o.contains("tolerances")) {
      const json& t = o["tolerances"];
      if (!t.is_object()) throw parse_error("options.tolerances must be an object");
      doc.options.tol_projection = detail::number_field(t, "projection", "options.tolerances");
      doc.options.tol_rank = detail::number_field(t, "rank", "options.tolerances");
    }
  }
  if (root.contains("source")) {
    const json& s = root["source"];
    if (!s.is_object()) throw parse_error("source must be an object");
    GeneratorSet g;
    g.dim = detail::natural_field(s, "dimension", "source");
    g.generators = detail::generators_field(s, g.dim, "source");
    doc.source = std::move(g);
  }
  return doc;
}

inline json document_to_json(const InputDocument& doc) {
  json root;
  root["dimension"] = doc.dimension;
  root["generators"] = json::array();
  for (const auto& g : doc.generators) root["generators"].push_back(matrix_to_json(g));
  json options = json::object();
  if (doc.options.epsilon) options["epsilon"] = *doc.options.epsilon;
  if (doc.options.k) options["k"] = *doc.options.k;
  if (!options.empty()) root["options"] = options;
  if (doc.source) {
    json s;
    s["dimension"] = doc.source->dim;
    s["generators"] = json::array();
    for (const auto& g : doc.source->generators) s["generators"].push_back(matrix_to_json(g));
    root["source"] = s;
  }
  return root;
}

/// FNV-1a 64-bit digest, hex encoded.
inline std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

}  // namespace projgen
