#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "ptkrein/types.hpp"

namespace ptkrein {

namespace detail {

/// 17 significant digits: lossless text round-trip for doubles.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Serializes a square complex matrix as {"n": N, "entries": [[re, im], ...]}
/// (row-major) with 17 significant digits per value.
inline std::string format_matrix(const ComplexMatrix& m) {
  detail::require_square(m, "format_matrix");
  detail::require_finite(m, "format_matrix");
  std::ostringstream os;
  os << "{\"n\": " << m.rows() << ", \"entries\": [";
  bool first = true;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!first) os << ", ";
      first = false;
      os << "[" << detail::format_double(m(i, j).real()) << ", " << detail::format_double(m(i, j).imag())
         << "]";
    }
  os << "]}\n";
  return os.str();
}

/// Parses the matrix-file object produced by format_matrix. Structural
/// problems raise io_error with the offending field.
inline ComplexMatrix parse_matrix_json(const std::string& text, const std::string& origin = "<string>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw io_error(origin + ": not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw io_error(origin + ": top level must be an object");
  if (!doc.contains("n") || !doc["n"].is_number_integer() || doc["n"].get<long long>() <= 0)
    throw io_error(origin + ": field \"n\" must be a positive integer");
  const Eigen::Index n = doc["n"].get<Eigen::Index>();
  if (!doc.contains("entries") || !doc["entries"].is_array())
    throw io_error(origin + ": field \"entries\" must be an array");
  const auto& entries = doc["entries"];
  if (static_cast<Eigen::Index>(entries.size()) != n * n)
    throw io_error(origin + ": entries has length " + std::to_string(entries.size()) + ", expected " +
                   std::to_string(n * n) + " (n = " + std::to_string(n) + ")");
  ComplexMatrix m(n, n);
  for (Eigen::Index idx = 0; idx < n * n; ++idx) {
    const auto& e = entries[static_cast<size_t>(idx)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw io_error(origin + ": entry " + std::to_string(idx) + " must be a [re, im] number pair");
    const double re = e[0].get<double>();
    const double im = e[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im))
      throw io_error(origin + ": entry " + std::to_string(idx) + " is non-finite");
    m(idx / n, idx % n) = Complex(re, im);
  }
  return m;
}

inline ComplexMatrix parse_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open matrix file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix_json(buf.str(), path);
}

inline void write_matrix_file(const std::string& path, const ComplexMatrix& m) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open matrix file for writing: " + path);
  out << format_matrix(m);
  if (!out) throw io_error("failed writing matrix file: " + path);
}

}  // namespace ptkrein
