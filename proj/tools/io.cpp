// SPDX-License-Identifier: Apache-2.0

#include "io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sectorial/errors.hpp"

namespace sectorctl {

using sectorial::ComplexMatrix;
using sectorial::Error;
using sectorial::ErrorCode;

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ValidationError, where + ": " + what);
}

const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) invalid(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) invalid(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) invalid(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(where, "expected a finite number");
  return v;
}

std::size_t positive_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) invalid(where, "expected a positive integer");
  return static_cast<std::size_t>(j.get<long long>());
}

void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  if (v == 0.0) v = 0.0;  // no negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void write_value(std::string& out, const Json& j, int depth) {
  const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write_value(out, it.value(), depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        write_value(out, e, depth + 1);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string bare_message(const Error& e) {
  std::string what = e.what();
  const std::string prefix = std::string(sectorial::to_string(e.code())) + ": ";
  if (what.starts_with(prefix)) what.erase(0, prefix.size());
  return what;
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < stop; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ValidationError, path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

ComplexMatrix parse_matrix(const Json& j, const std::string& where) {
  const std::size_t n = positive_int(member(j, "n", where), where + ".n");
  ComplexMatrix m(n);
  auto fill = [&](const char* key, bool imaginary) {
    const std::string w = where + "." + key;
    const Json& rows = member(j, key, where);
    if (!rows.is_array() || rows.size() != n) invalid(w, "expected " + std::to_string(n) + " rows");
    for (std::size_t r = 0; r < n; ++r) {
      const std::string wr = w + "[" + std::to_string(r) + "]";
      if (!rows[r].is_array() || rows[r].size() != n) invalid(wr, "expected " + std::to_string(n) + " entries");
      for (std::size_t c = 0; c < n; ++c) {
        const double v = number(rows[r][c], wr + "[" + std::to_string(c) + "]");
        if (imaginary) {
          m(r, c) = {m(r, c).real(), v};
        } else {
          m(r, c) = {v, m(r, c).imag()};
        }
      }
    }
  };
  fill("re", false);
  if (j.contains("im")) fill("im", true);
  return m;
}

sectorial::CoefficientField parse_field(const Json& j, const std::string& where, const sectorial::Tolerances& tol) {
  const std::size_t d = positive_int(member(j, "d", where), where + ".d");
  const Json& grid = member(j, "grid", where);
  if (!grid.is_array() || grid.empty()) invalid(where + ".grid", "expected a non-empty array");
  std::vector<std::size_t> dims;
  std::size_t count = 1;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    dims.push_back(positive_int(grid[k], where + ".grid[" + std::to_string(k) + "]"));
    count *= dims.back();
  }
  const Json& cells = member(j, "cells", where);
  if (!cells.is_array() || cells.size() != count)
    invalid(where + ".cells", "expected " + std::to_string(count) + " cells for the grid");
  std::vector<ComplexMatrix> mus;
  for (std::size_t k = 0; k < count; ++k) {
    const std::string w = where + ".cells[" + std::to_string(k) + "]";
    mus.push_back(parse_matrix(cells[k], w));
    if (mus.back().rows() != d) invalid(w + ".n", "expected n = d = " + std::to_string(d));
    try {
      sectorial::analyze_cell(mus.back(), tol);
    } catch (const Error& e) {
      throw Error(e.code(), w + ": " + bare_message(e));
    }
  }
  return sectorial::make_field(dims, mus, sectorial::Exec::Parallel, tol);
}

MeshSpec parse_mesh(const Json& j, const std::string& where) {
  MeshSpec m;
  m.nx = positive_int(member(j, "nx", where), where + ".nx");
  m.ny = positive_int(member(j, "ny", where), where + ".ny");
  if (j.contains("Lx")) m.lx = number(j["Lx"], where + ".Lx");
  if (j.contains("Ly")) m.ly = number(j["Ly"], where + ".Ly");
  if (!(m.lx > 0.0) || !(m.ly > 0.0)) invalid(where, "Lx and Ly must be positive");
  return m;
}

sectorial::BoundaryMarking parse_dirichlet(const Json& j, const sectorial::Mesh2D& mesh, const std::string& where) {
  if (!j.is_array()) invalid(where, "expected an array of side names or edge indices");
  if (j.empty()) return sectorial::BoundaryMarking::none(mesh);
  if (j.front().is_string()) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < j.size(); ++k) {
      if (!j[k].is_string()) invalid(where + "[" + std::to_string(k) + "]", "mixed names and indices");
      names.push_back(j[k].get<std::string>());
    }
    try {
      return sectorial::BoundaryMarking::sides(mesh, names);
    } catch (const Error& e) {
      invalid(where, bare_message(e));
    }
  }
  std::vector<std::size_t> edges;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string w = where + "[" + std::to_string(k) + "]";
    if (!j[k].is_number_integer() || j[k].get<long long>() < 0) invalid(w, "expected a non-negative edge index");
    edges.push_back(static_cast<std::size_t>(j[k].get<long long>()));
  }
  try {
    return sectorial::BoundaryMarking::edges(mesh, edges);
  } catch (const Error& e) {
    invalid(where, bare_message(e));
  }
}

Json resolve_input(const Json& j, const std::string& base_dir, const std::string& where) {
  if (j.is_object()) return j;
  if (!j.is_string()) invalid(where, "expected an inline object or a file path");
  std::filesystem::path p(j.get<std::string>());
  if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
  return read_json_file(p.string());
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json re = Json::array(), im = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json rr = Json::array(), ri = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  Json j;
  j["n"] = m.rows();
  j["re"] = re;
  j["im"] = im;
  return j;
}

Json complex_to_json(cplx z) {
  Json j;
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

Json real_or_sentinel(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json angle_to_json(double theta) {
  Json j;
  j["rad"] = theta;
  j["deg"] = theta * 180.0 / std::numbers::pi;
  j["tan"] = theta < std::numbers::pi / 2 ? real_or_sentinel(std::tan(theta)) : Json("inf");
  return j;
}

std::string write_json(const Json& j) {
  std::string out;
  write_value(out, j, 0);
  out += "\n";
  return out;
}

std::string write_csv(const std::vector<CsvRow>& rows) {
  std::string out = "series,re,im\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", r.z.real(), r.z.imag());
    out += r.series + buf;
  }
  return out;
}

void append_sector_rays(std::vector<CsvRow>& rows, const std::string& series, double theta, double radius,
                        int samples) {
  for (double sign : {1.0, -1.0}) {
    const std::string name = series + (sign > 0 ? "_upper" : "_lower");
    for (int k = 0; k < samples; ++k) {
      const double r = radius * k / std::max(1, samples - 1);
      rows.push_back({name, std::polar(r, sign * theta)});
    }
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ValidationError, path + ": cannot write file");
  out << text;
}

}  // namespace sectorctl
