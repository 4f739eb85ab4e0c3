#include "dtl/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dtl/error.hpp"

namespace dtl::harness {

namespace {

void dump(const nlohmann::json& doc, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (doc.type()) {
    case nlohmann::json::value_t::object: {
      if (doc.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = doc.begin(); it != doc.end(); ++it) {  // std::map: sorted keys
        if (!first) out += ",\n";
        first = false;
        out += pad + nlohmann::json(it.key()).dump() + ": ";
        dump(it.value(), out, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (doc.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& v : doc) flat = flat && !v.is_structured();
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& v : doc) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump(v, out, depth + 1);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = doc.get<double>();
      out += std::isfinite(v) ? format_number(v) : "\"" + format_number(v) + "\"";
      return;
    }
    default:
      out += doc.dump();
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string canonical_dump(const nlohmann::json& doc) {
  std::string out;
  dump(doc, out, 0);
  out += "\n";
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoFailure, "cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw Error(ErrorKind::IoFailure, "write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::IoFailure, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::IoFailure, "'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace dtl::harness
