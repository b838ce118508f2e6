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
#include "cqs/app/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cqs/problems.hpp"

namespace cqs::app {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

nlohmann::json complex_array(const Vector &v) {
    auto arr = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) {
        arr.push_back({v[i].real(), v[i].imag()});
    }
    return arr;
}

Vector parse_complex_array(const nlohmann::json &arr, const char *what) {
    if (!arr.is_array()) {
        throw std::invalid_argument(std::string(what) + " must be an array of [re, im] pairs");
    }
    Vector v(static_cast<Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto &e = arr[i];
        if (e.is_number()) {
            v[static_cast<Index>(i)] = {e.get<double>(), 0.0};
        } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
            v[static_cast<Index>(i)] = {e[0].get<double>(), e[1].get<double>()};
        } else {
            throw std::invalid_argument(std::string(what) + "[" + std::to_string(i) +
                                        "] is not a [re, im] pair");
        }
    }
    return v;
}

Problem make_problem(BandedCirculantd c, Vector b) {
    if (b.size() != c.dim()) {
        throw std::invalid_argument("b has length " + std::to_string(b.size()) +
                                    " but the matrix has dimension " + std::to_string(c.dim()));
    }
    const double norm = b.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("b must be a nonzero finite vector");
    }
    Vector unit = b / norm;
    return Problem{std::move(c), std::move(unit), norm};
}

Problem parse_problem(const nlohmann::json &doc) {
    if (!doc.is_object()) {
        throw std::invalid_argument("problem file must hold a JSON object");
    }
    for (const char *key : {"n", "k", "coeffs", "b"}) {
        if (!doc.contains(key)) {
            throw std::invalid_argument(std::string("problem file is missing \"") + key + "\"");
        }
    }
    const auto n = doc.at("n").get<std::int64_t>();
    const auto k = doc.at("k").get<std::int64_t>();
    if (n < 1 || k < 0) {
        throw std::invalid_argument("problem needs n >= 1 and k >= 0");
    }
    const Vector coeffs = parse_complex_array(doc.at("coeffs"), "coeffs");
    if (coeffs.size() != 2 * k + 1) {
        throw std::invalid_argument("coeffs must hold 2k+1 = " + std::to_string(2 * k + 1) +
                                    " entries");
    }
    BandedCirculantd c(n, std::vector<Complex<double>>(coeffs.data(), coeffs.data() + coeffs.size()));

    const auto &bj = doc.at("b");
    Vector b;
    if (bj.is_string()) {
        if (!is_power_of_two(n)) {
            throw std::invalid_argument("generated b needs n to be a power of two");
        }
        b = experiment_b<double>(bj.get<std::string>(), log2_exact(n));
    } else {
        b = parse_complex_array(bj, "b");
    }
    return make_problem(std::move(c), std::move(b));
}

Problem load_problem(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open problem file " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception &e) {
        throw std::invalid_argument("malformed problem file " + path.string() + ": " + e.what());
    }
    return parse_problem(doc);
}

nlohmann::json problem_to_json(const Problem &p) {
    const auto &cs = p.c.coeffs();
    return {{"n", p.c.dim()},
            {"k", p.c.bandwidth()},
            {"coeffs", complex_array(Eigen::Map<const Vector>(cs.data(), static_cast<Index>(cs.size())))},
            {"b", complex_array(p.b * p.b_norm)}};
}

nlohmann::json solution_to_json(const AnsatzSolution<double> &sol, double b_norm) {
    const auto &d = sol.diagnostics;
    return {{"t", sol.t},
            {"alphas", complex_array(sol.alphas)},
            {"backend", sol.backend},
            {"loss", d.loss},
            {"objective", d.objective},
            {"oracle_loss", d.oracle_loss},
            {"converged", d.converged},
            {"b_norm", b_norm},
            {"accounting",
             {{"samples", d.accounting.samples},
              {"queries", d.accounting.queries},
              {"shots", d.accounting.shots}}}};
}

std::string table_to_csv(const ShiftOverlapTable<double> &table) {
    std::ostringstream os;
    os << "m,re,im,accesses\n";
    for (std::int64_t m = 0; m <= table.max_shift(); ++m) {
        const auto e = table.at(m);
        const auto &a = table.accounting(m);
        os << m << ',' << format_double(e.real()) << ',' << format_double(e.imag()) << ','
           << (a.samples + a.queries + a.shots) << '\n';
    }
    return os.str();
}

std::string vector_to_csv(const Vector &x) {
    std::ostringstream os;
    os << "index,re,im\n";
    for (Index i = 0; i < x.size(); ++i) {
        os << i << ',' << format_double(x[i].real()) << ',' << format_double(x[i].imag()) << '\n';
    }
    return os.str();
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

} // namespace cqs::app
