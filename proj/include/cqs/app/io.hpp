// Copyright 2026 The cqs-circulant Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cqs/circulant.hpp"
#include "cqs/estimators.hpp"
#include "cqs/solver.hpp"

namespace cqs::app {

using Vector = CVector<double>;

/// A linear system as consumed by the CLI. b is stored normalized; b_norm is
/// the norm of the vector as supplied.
struct Problem {
    BandedCirculantd c;
    Vector b;
    double b_norm = 1.0;
};

/// Parses {"n": N, "k": K, "coeffs": [[re, im], ...], "b": [[re, im], ...] | "name"}.
/// Generator names for b are zero, ghz, ramp and layered (N must be 2^n).
Problem parse_problem(const nlohmann::json &doc);
Problem load_problem(const std::filesystem::path &path);
nlohmann::json problem_to_json(const Problem &p);

/// Rescales b to unit norm; throws on the zero vector.
Problem make_problem(BandedCirculantd c, Vector b);

nlohmann::json complex_array(const Vector &v);
Vector parse_complex_array(const nlohmann::json &arr, const char *what);

/// {"t", "alphas", "backend", "loss", "accounting", ...}
nlohmann::json solution_to_json(const AnsatzSolution<double> &sol, double b_norm);

/// Rows (m, re, im, accesses) for m = 0..max_shift.
std::string table_to_csv(const ShiftOverlapTable<double> &table);

/// Rows (index, re, im).
std::string vector_to_csv(const Vector &x);

/// Shortest round-trip text for a double.
std::string format_double(double x);

void write_text(const std::filesystem::path &path, const std::string &text);

} // namespace cqs::app
