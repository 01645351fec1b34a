// SPDX-License-Identifier: Apache-2.0

// File formats and report serialization for sectorctl.

#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "sectorial/coefficient_field.hpp"
#include "sectorial/discretize.hpp"
#include "sectorial/errors.hpp"

namespace sectorctl {

using Json = nlohmann::ordered_json;
using sectorial::cplx;

/// Reads and parses a JSON file. ParseError carries line and column.
Json read_json_file(const std::string& path);

/// Parses text; `source` names the origin in diagnostics.
Json parse_json_text(const std::string& text, const std::string& source);

/// {"n": int, "re": [[...]], "im": [[...]]}; "im" may be omitted.
/// ValidationError messages name the offending field path.
sectorial::ComplexMatrix parse_matrix(const Json& j, const std::string& where);

/// {"d": int, "grid": [nx, ...], "cells": [matrix, ...]} in row-major cell order.
sectorial::CoefficientField parse_field(const Json& j, const std::string& where, const sectorial::Tolerances& tol);

struct MeshSpec {
  std::size_t nx = 0, ny = 0;
  double lx = 1.0, ly = 1.0;
};

MeshSpec parse_mesh(const Json& j, const std::string& where);

/// Side names or explicit boundary edge indices.
sectorial::BoundaryMarking parse_dirichlet(const Json& j, const sectorial::Mesh2D& mesh, const std::string& where);

/// An object, or a string path resolved against base_dir and loaded.
Json resolve_input(const Json& j, const std::string& base_dir, const std::string& where);

/// Error message without its leading code name.
std::string bare_message(const sectorial::Error& e);

Json matrix_to_json(const sectorial::ComplexMatrix& m);
Json complex_to_json(cplx z);
Json angle_to_json(double theta);

/// Number as JSON, or the string "inf" / "-inf" / "nan".
Json real_or_sentinel(double v);

/// Deterministic serialization: insertion order, doubles at 17 significant digits.
std::string write_json(const Json& j);

struct CsvRow {
  std::string series;
  cplx z;
};

/// Columns series, re, im.
std::string write_csv(const std::vector<CsvRow>& rows);

/// Both rays of the sector of half-angle theta, sampled from 0 to radius.
void append_sector_rays(std::vector<CsvRow>& rows, const std::string& series, double theta, double radius,
                        int samples = 2);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace sectorctl
