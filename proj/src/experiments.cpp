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
#include "cqs/app/experiments.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "cqs/problems.hpp"

namespace cqs::app {

namespace {

std::string complex_text(Complex<double> z) {
    std::ostringstream os;
    os << format_double(z.real()) << (std::signbit(z.imag()) ? " - " : " + ")
       << format_double(std::abs(z.imag())) << "i";
    return os.str();
}

std::string dump(const nlohmann::json &j) { return j.dump(2) + "\n"; }

void write_config(const RunConfig &cfg, const char *command) {
    auto j = cfg.to_json();
    j["command"] = command;
    write_text(cfg.out_dir / "config.json", dump(j));
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
        .count();
}

std::string optional_index(const std::optional<Index> &v) {
    return v ? std::to_string(*v) : std::string();
}

} // namespace

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    if (problem_file) {
        j["problem"] = problem_file->string();
    } else {
        j["generator"] = generator;
        j["n"] = n;
        j["xi"] = xi;
    }
    j["backend"] = std::string(backend_name(backend));
    if (t) {
        j["t"] = *t;
    } else {
        j["adaptive"] = true;
    }
    j["nu"] = nu;
    j["eps"] = estimator.epsilon;
    j["delta"] = estimator.delta;
    j["shots"] = estimator.shots;
    j["seed"] = estimator.seed;
    j["m"] = shift;
    j["xi_list"] = xi_list;
    j["kinds"] = kinds;
    j["upsilon"] = upsilon;
    return j;
}

Problem build_problem(const RunConfig &cfg) {
    if (cfg.problem_file) {
        return load_problem(*cfg.problem_file);
    }
    if (!is_power_of_two(cfg.n) || cfg.n < 4) {
        throw std::invalid_argument("generated problems need n = 2^q >= 4 (got " +
                                    std::to_string(cfg.n) + ")");
    }
    return make_problem(heat_matrix<double>(cfg.n, cfg.xi),
                        experiment_b<double>(cfg.generator, log2_exact(cfg.n)));
}

SolveOptions solve_options(const RunConfig &cfg) {
    SolveOptions opt;
    if (cfg.t) {
        opt.mode = TruncationMode::Fixed;
        opt.t = *cfg.t;
    } else {
        opt.mode = TruncationMode::Adaptive;
    }
    opt.nu = cfg.nu;
    return opt;
}

std::vector<CompareRow> compare_backends(const Problem &p, const RunConfig &cfg) {
    std::vector<CompareRow> rows;

    auto start = std::chrono::steady_clock::now();
    const Vector x = fft_solve(p.c, p.b);
    rows.push_back({"fft", std::nullopt, mse_loss(p.c, x, p.b), std::nullopt, {},
                    elapsed_ms(start)});

    auto run = [&](BackendKind kind, const SolveOptions &opt) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto backend = make_backend(kind, p.b);
        auto sol = solve(p.c, *backend, cfg.estimator, opt);
        rows.push_back({std::string(backend_name(kind)), sol.t, sol.diagnostics.loss,
                        sol.diagnostics.objective, sol.diagnostics.accounting, elapsed_ms(t0)});
        return sol.t;
    };

    const Index t = run(BackendKind::Exact, solve_options(cfg));
    SolveOptions fixed = solve_options(cfg);
    fixed.mode = TruncationMode::Fixed;
    fixed.t = t;
    run(BackendKind::SampleQuery, fixed);
    if (is_power_of_two(p.c.dim())) {
        run(BackendKind::Hadamard, fixed);
    }
    return rows;
}

std::string compare_to_csv(const std::vector<CompareRow> &rows) {
    std::ostringstream os;
    os << "method,t,loss,objective,samples,queries,shots\n";
    for (const auto &r : rows) {
        os << r.method << ',' << optional_index(r.t) << ',' << format_double(r.loss) << ','
           << (r.objective ? format_double(*r.objective) : std::string()) << ','
           << r.accounting.samples << ',' << r.accounting.queries << ',' << r.accounting.shots
           << '\n';
    }
    return os.str();
}

std::vector<SweepRow> sweep_truncation(const RunConfig &cfg) {
    if (!is_power_of_two(cfg.n) || cfg.n < 4) {
        throw std::invalid_argument("sweep needs n = 2^q >= 4");
    }
    const int qubits = log2_exact(cfg.n);
    std::vector<SweepRow> rows;
    for (const auto &kind : cfg.kinds) {
        const Vector b = experiment_b<double>(kind, qubits);
        const ExactBackend<double> backend(b);
        for (const double xi : cfg.xi_list) {
            const auto c = heat_matrix<double>(cfg.n, xi);
            const Index k = c.bandwidth();
            SweepRow row;
            row.kind = kind;
            row.xi = xi;
            row.kappa = heat_kappa(xi);
            row.cap = std::max(choose_truncation(k, row.kappa, cfg.upsilon), k);
            // Shifts beyond N/2 revisit the same cyclic orbit.
            const Index scan_limit = std::max(std::min(row.cap, cfg.n / 2), k);

            ShiftOverlapTable<double> table;
            for (Index t = k; t <= scan_limit; ++t) {
                extend_table(table, backend, 2 * k + 2 * t, cfg.estimator);
                const auto res = minimize(assemble(c, t, table));
                AnsatzSolution<double> probe;
                probe.t = t;
                probe.alphas = res.alphas;
                const double loss = mse_loss(c, materialize(probe, b), b);
                if (!row.losses.empty() && loss > row.losses.back().second * (1 + 1e-9) + 1e-14) {
                    row.monotone = false;
                }
                row.losses.emplace_back(t, loss);
                row.min_t = t;
                row.loss = loss;
                if (loss < cfg.upsilon) {
                    row.converged = true;
                    break;
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow> &rows) {
    std::ostringstream os;
    os << "kind,xi,kappa,min_t,cap,loss,converged,monotone\n";
    for (const auto &r : rows) {
        os << r.kind << ',' << format_double(r.xi) << ',' << format_double(r.kappa) << ','
           << r.min_t << ',' << r.cap << ',' << format_double(r.loss) << ','
           << (r.converged ? 1 : 0) << ',' << (r.monotone ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string sweep_losses_to_csv(const std::vector<SweepRow> &rows) {
    std::ostringstream os;
    os << "kind,xi,t,loss\n";
    for (const auto &r : rows) {
        for (const auto &[t, loss] : r.losses) {
            os << r.kind << ',' << format_double(r.xi) << ',' << t << ',' << format_double(loss)
               << '\n';
        }
    }
    return os.str();
}

EstimateReport estimate_shift(const Problem &p, const RunConfig &cfg) {
    cfg.estimator.validate();
    const auto backend = make_backend(cfg.backend, p.b);
    EstimateReport rep;
    if (wrap_index(cfg.shift, p.c.dim()) == 0) {
        // <b, b> = 1 for normalized b; never estimated.
        rep.exact = rep.estimate = 1.0;
    } else {
        rep.exact = estimate_overlap_exact(p.b, cfg.shift);
        Rng rng(cfg.estimator.seed, static_cast<std::uint64_t>(cfg.shift));
        rep.estimate = backend->estimate(cfg.shift, cfg.estimator, rng, rep.accounting);
    }
    rep.abs_error = std::abs(rep.estimate - rep.exact);
    return rep;
}

BudgetReport budget_report(const Problem &p, const RunConfig &cfg) {
    BudgetReport rep;
    rep.coeff_l1 = p.c.coeff_l1_norm();
    rep.kappa = condition_number(p.c);
    if (!cfg.problem_file) {
        rep.kappa_formula = heat_kappa(cfg.xi);
    }
    rep.t_cap = std::max(p.c.bandwidth(), choose_truncation(p.c.bandwidth(), rep.kappa, cfg.nu));
    rep.t = cfg.t.value_or(rep.t_cap);
    rep.budget = shot_budget(p.c, rep.t, rep.kappa, cfg.estimator.epsilon);
    return rep;
}

int cmd_solve(const RunConfig &cfg, std::ostream &out) {
    const Problem p = build_problem(cfg);
    const auto backend = make_backend(cfg.backend, p.b);
    const auto opt = solve_options(cfg);
    const auto sol = solve(p.c, *backend, cfg.estimator, opt);
    const auto &d = sol.diagnostics;

    write_config(cfg, "solve");
    write_text(cfg.out_dir / "solution.json", dump(solution_to_json(sol, p.b_norm)));
    write_text(cfg.out_dir / "overlaps.csv", table_to_csv(d.table));
    if (cfg.materialize) {
        write_text(cfg.out_dir / "x.csv", vector_to_csv(materialize(sol) * p.b_norm));
    }

    out << "backend      " << sol.backend << "\n"
        << "N            " << p.c.dim() << "  K " << p.c.bandwidth() << "\n"
        << "T            " << sol.t << (opt.mode == TruncationMode::Adaptive ? " (adaptive)" : "")
        << "\n"
        << "loss         " << format_double(d.loss) << "\n"
        << "objective    " << format_double(d.objective) << "\n"
        << "oracle loss  " << format_double(d.oracle_loss) << "\n"
        << "samples      " << d.accounting.samples << "\n"
        << "queries      " << d.accounting.queries << "\n"
        << "shots        " << d.accounting.shots << "\n";
    if (opt.mode == TruncationMode::Adaptive && !d.converged) {
        out << "adaptive search reached T = " << sol.t << " (cap " << d.cap
            << ") without meeting loss <= oracle + " << format_double(cfg.nu) << "\n";
        return 3;
    }
    return 0;
}

int cmd_compare_backends(const RunConfig &cfg, std::ostream &out) {
    const Problem p = build_problem(cfg);
    const auto rows = compare_backends(p, cfg);
    write_config(cfg, "compare-backends");
    write_text(cfg.out_dir / "compare_backends.csv", compare_to_csv(rows));

    std::ostringstream timing;
    timing << "method,wall_ms\n";
    out << std::left << std::setw(10) << "method" << std::setw(6) << "T" << std::setw(26)
        << "loss" << "wall ms\n";
    for (const auto &r : rows) {
        timing << r.method << ',' << format_double(r.wall_ms) << '\n';
        out << std::setw(10) << r.method << std::setw(6) << optional_index(r.t) << std::setw(26)
            << format_double(r.loss) << std::fixed << std::setprecision(1) << r.wall_ms
            << std::defaultfloat << "\n";
    }
    write_text(cfg.out_dir / "compare_backends_timing.csv", timing.str());
    if (!is_power_of_two(p.c.dim())) {
        out << "hadamard backend skipped: N = " << p.c.dim() << " is not a power of two\n";
    }
    return 0;
}

int cmd_sweep_truncation(const RunConfig &cfg, std::ostream &out) {
    const auto rows = sweep_truncation(cfg);
    write_config(cfg, "sweep-truncation");
    write_text(cfg.out_dir / "sweep_truncation.csv", sweep_to_csv(rows));
    write_text(cfg.out_dir / "sweep_losses.csv", sweep_losses_to_csv(rows));
    bool all = true;
    for (const auto &r : rows) {
        out << std::left << std::setw(8) << r.kind << " xi " << std::setw(6)
            << format_double(r.xi) << " kappa " << std::setw(6) << format_double(r.kappa)
            << " min T " << std::setw(5) << r.min_t << " cap " << r.cap
            << (r.converged ? "" : "  (not converged)") << "\n";
        all = all && r.converged;
    }
    return all ? 0 : 3;
}

int cmd_estimate(const RunConfig &cfg, std::ostream &out) {
    const Problem p = build_problem(cfg);
    const auto rep = estimate_shift(p, cfg);
    write_config(cfg, "estimate");
    const nlohmann::json j = {{"m", cfg.shift},
                              {"backend", std::string(backend_name(cfg.backend))},
                              {"estimate", {rep.estimate.real(), rep.estimate.imag()}},
                              {"exact", {rep.exact.real(), rep.exact.imag()}},
                              {"abs_error", rep.abs_error},
                              {"samples", rep.accounting.samples},
                              {"queries", rep.accounting.queries},
                              {"shots", rep.accounting.shots}};
    write_text(cfg.out_dir / "estimate.json", dump(j));
    out << "<b, Q^" << cfg.shift << " b>\n"
        << "estimate   " << complex_text(rep.estimate) << "\n"
        << "exact      " << complex_text(rep.exact) << "\n"
        << "abs error  " << format_double(rep.abs_error) << "\n"
        << "samples    " << rep.accounting.samples << "\n"
        << "queries    " << rep.accounting.queries << "\n"
        << "shots      " << rep.accounting.shots << "\n";
    return 0;
}

int cmd_budget(const RunConfig &cfg, std::ostream &out) {
    const Problem p = build_problem(cfg);
    const auto rep = budget_report(p, cfg);
    write_config(cfg, "budget");
    nlohmann::json j = {{"B", rep.coeff_l1},
                        {"kappa", rep.kappa},
                        {"t_cap", rep.t_cap},
                        {"t", rep.t},
                        {"eps", cfg.estimator.epsilon},
                        {"total", rep.budget.total},
                        {"distinct_shifts", rep.budget.distinct_shifts},
                        {"per_shift", rep.budget.per_shift}};
    if (rep.kappa_formula) {
        j["kappa_formula"] = *rep.kappa_formula;
    }
    write_text(cfg.out_dir / "budget.json", dump(j));
    out << std::setprecision(12) << "B              " << rep.coeff_l1 << "\n"
        << "kappa          " << rep.kappa << "\n" << std::setprecision(6);
    if (rep.kappa_formula) {
        out << "kappa formula  " << format_double(*rep.kappa_formula) << "\n";
    }
    out << "T cap          " << rep.t_cap << "\n"
        << "T              " << rep.t << "\n"
        << "measurements   " << format_double(rep.budget.total) << " (advisory)\n"
        << "per shift      " << format_double(rep.budget.per_shift) << " over "
        << rep.budget.distinct_shifts << " shifts\n";
    return 0;
}

} // namespace cqs::app
