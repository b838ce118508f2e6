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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqs/app/io.hpp"
#include "cqs/estimators.hpp"
#include "cqs/solver.hpp"

namespace cqs::app {

/// Everything a CLI run depends on. A run is reproducible from its config.
struct RunConfig {
    /// Problem file; when empty the heat generator is used.
    std::optional<std::filesystem::path> problem_file;
    /// Right-hand side kind for the heat generator (zero, ghz, ramp, layered).
    std::string generator = "layered";
    /// System dimension N for generated problems (a power of two).
    Index n = 32;
    double xi = 0.2;

    BackendKind backend = BackendKind::Exact;
    /// Fixed truncation; adaptive search when unset.
    std::optional<Index> t;
    double nu = 1e-4;
    EstimatorConfig estimator;

    /// Shift for the estimate command.
    std::int64_t shift = 1;

    /// Sweep grid.
    std::vector<double> xi_list{4, 2, 1, 0.5, 0.2, 0.1, 0.05};
    std::vector<std::string> kinds{"zero", "ghz", "ramp"};
    double upsilon = 1e-2;

    std::filesystem::path out_dir = "out";
    bool materialize = false;

    nlohmann::json to_json() const;
};

Problem build_problem(const RunConfig &cfg);
SolveOptions solve_options(const RunConfig &cfg);

struct CompareRow {
    std::string method;
    std::optional<Index> t;
    double loss = 0;
    std::optional<double> objective;
    Accounting accounting;
    double wall_ms = 0;
};

/// Exact, sample-and-query and (for N = 2^n) hadamard backends plus the FFT
/// oracle on one instance. In adaptive mode the exact backend picks T and the
/// noisy backends run at that T.
std::vector<CompareRow> compare_backends(const Problem &p, const RunConfig &cfg);
std::string compare_to_csv(const std::vector<CompareRow> &rows);

struct SweepRow {
    std::string kind;
    double xi = 0;
    double kappa = 0;
    /// Smallest T whose loss is below upsilon (last T tried if not converged).
    Index min_t = 0;
    /// Truncation bound for (K, kappa, upsilon); the scan stops at min(cap, N/2).
    Index cap = 0;
    double loss = 0;
    bool converged = false;
    /// Loss was non-increasing over every T scanned.
    bool monotone = true;
    /// (T, loss) for every T scanned.
    std::vector<std::pair<Index, double>> losses;
};

/// Minimal truncation per (kind, xi) for the heat matrix of dimension cfg.n,
/// exact backend, scanning T = K, K+1, ... up to the truncation cap.
std::vector<SweepRow> sweep_truncation(const RunConfig &cfg);
std::string sweep_to_csv(const std::vector<SweepRow> &rows);
std::string sweep_losses_to_csv(const std::vector<SweepRow> &rows);

struct EstimateReport {
    Complex<double> estimate;
    Complex<double> exact;
    double abs_error = 0;
    Accounting accounting;
};

EstimateReport estimate_shift(const Problem &p, const RunConfig &cfg);

struct BudgetReport {
    double coeff_l1 = 0;
    double kappa = 0;
    std::optional<double> kappa_formula;
    Index t_cap = 0;
    Index t = 0;
    MeasurementBudget budget;
};

BudgetReport budget_report(const Problem &p, const RunConfig &cfg);

// CLI subcommands. Each writes its data files under cfg.out_dir, a summary to
// out and returns the process exit status.
int cmd_solve(const RunConfig &cfg, std::ostream &out);
int cmd_compare_backends(const RunConfig &cfg, std::ostream &out);
int cmd_sweep_truncation(const RunConfig &cfg, std::ostream &out);
int cmd_estimate(const RunConfig &cfg, std::ostream &out);
int cmd_budget(const RunConfig &cfg, std::ostream &out);

} // namespace cqs::app
