#ifndef PJM_IO_HPP
#define PJM_IO_HPP

// JSON exchange formats:
//   coefficients  {"n": N, "x": [...], "b": [...]}
//   heights       {"h1": [...], "h2": [...]}
// Numbers are written with 17 significant digits.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pjm/heights.hpp"
#include "pjm/model.hpp"

namespace pjm {

using Json = nlohmann::ordered_json;

/// Whole file, or standard input for "-".
inline std::string read_text(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return buf.str();
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("malformed JSON: ") + e.what());
  }
}

inline std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_json(std::ostream& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out << "{}";
      return;
    }
    out << "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out << ",\n";
      first = false;
      out << pad << Json(it.key()).dump() << ": ";
      write_json(out, it.value(), indent + 2);
    }
    out << '\n' << close << '}';
  } else if (j.is_array()) {
    // Arrays of scalars stay on one line.
    const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
    if (j.empty()) {
      out << "[]";
    } else if (flat) {
      out << '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out << ", ";
        write_json(out, j[i], indent);
      }
      out << ']';
    } else {
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out << ",\n";
        out << pad;
        write_json(out, j[i], indent + 2);
      }
      out << '\n' << close << ']';
    }
  } else if (j.is_number_float()) {
    out << format_number(j.get<double>());
  } else {
    out << j.dump();
  }
}

inline Vector number_array(const Json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("missing key \"") + key + "\"");
  const Json& arr = j.at(key);
  if (!arr.is_array()) throw DomainError(std::string("\"") + key + "\" must be an array");
  Vector out;
  for (const auto& e : arr) {
    if (!e.is_number()) throw DomainError(std::string("\"") + key + "\" must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

} // namespace detail

/// Pretty-printed, keys in insertion order, newline-terminated.
inline void write_json(std::ostream& out, const Json& j) {
  detail::write_json(out, j, 0);
  out << '\n';
}

inline std::string to_string(const Json& j) {
  std::ostringstream out;
  write_json(out, j);
  return out.str();
}

inline Json to_json(const Vector& v) {
  Json arr = Json::array();
  for (double e : v) arr.push_back(e);
  return arr;
}

inline Json to_json(const CoefficientPoint& p) {
  return Json{{"n", p.n}, {"x", to_json(p.x)}, {"b", to_json(p.b)}};
}

inline Json to_json(const HeightVector& h) {
  return Json{{"h1", to_json(h.h1)}, {"h2", to_json(h.h2)}};
}

/// Validated against the model constraints.
inline CoefficientPoint coefficients_from_json(const Json& j) {
  if (!j.is_object()) throw DomainError("coefficient input must be a JSON object");
  if (!j.contains("n") || !j.at("n").is_number_integer()) {
    throw DomainError("\"n\" must be an integer");
  }
  const auto n = j.at("n").get<long long>();
  if (n < 2) throw DomainError("\"n\" must be at least 2");
  CoefficientPoint p{static_cast<std::size_t>(n), detail::number_array(j, "x"),
                     detail::number_array(j, "b")};
  require_valid(p);
  return p;
}

inline HeightVector heights_from_json(const Json& j) {
  if (!j.is_object()) throw DomainError("height input must be a JSON object");
  return HeightVector::from_components(detail::number_array(j, "h1"), detail::number_array(j, "h2"));
}

} // namespace pjm

#endif // PJM_IO_HPP
