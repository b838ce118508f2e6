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
// Command-line front end: solve | compare-backends | sweep-truncation |
// estimate | budget.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "cqs/app/experiments.hpp"
#include "cqs/problems.hpp"

namespace {

constexpr const char *kSeedEnv = "CQS_SEED";

std::uint64_t default_seed() {
    const char *env = std::getenv(kSeedEnv);
    if (!env || !*env) {
        return 0;
    }
    try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used);
        if (used != std::string(env).size()) {
            throw std::invalid_argument(env);
        }
        return v;
    } catch (const std::exception &) {
        throw std::invalid_argument(std::string(kSeedEnv) + " is not an unsigned integer: " + env);
    }
}

struct Flags {
    std::string problem;
    std::string backend = "exact";
    std::optional<long long> t;
    bool adaptive = false;
    long long n = 32;
};

void add_problem_flags(CLI::App &sub, cqs::app::RunConfig &cfg, Flags &f) {
    sub.add_option("--problem", f.problem, "Problem JSON file")->check(CLI::ExistingFile);
    sub.add_option("--generator", cfg.generator, "Right-hand side for the heat generator")
        ->check(CLI::IsMember({"zero", "ghz", "ramp", "layered"}))
        ->capture_default_str();
    sub.add_option("--n", f.n, "Dimension N of generated problems (power of two)")
        ->capture_default_str();
    sub.add_option("--xi", cfg.xi, "Heat grid parameter xi")->capture_default_str();
}

void add_estimator_flags(CLI::App &sub, cqs::app::RunConfig &cfg) {
    sub.add_option("--eps", cfg.estimator.epsilon, "Per-overlap error target")
        ->capture_default_str();
    sub.add_option("--delta", cfg.estimator.delta, "Per-overlap failure probability")
        ->capture_default_str();
    sub.add_option("--shots", cfg.estimator.shots, "Shots per Hadamard-test circuit")
        ->capture_default_str();
    sub.add_option("--seed", cfg.estimator.seed,
                   std::string("RNG seed (default from ") + kSeedEnv + ", else 0)");
}

void add_backend_flag(CLI::App &sub, Flags &f) {
    sub.add_option("--backend", f.backend, "Overlap backend")
        ->check(CLI::IsMember({"exact", "hadamard", "sq"}))
        ->capture_default_str();
}

void add_truncation_flags(CLI::App &sub, cqs::app::RunConfig &cfg, Flags &f) {
    auto *t = sub.add_option("--t", f.t, "Fixed truncation T");
    auto *a = sub.add_flag("--adaptive", f.adaptive, "Grow T until loss <= oracle + nu (default)");
    t->excludes(a);
    sub.add_option("--nu", cfg.nu, "Adaptive loss target above the oracle loss")
        ->capture_default_str();
}

} // namespace

int main(int argc, char **argv) {
    using namespace cqs::app;

    RunConfig cfg;
    Flags f;
    std::string out = "out";

    CLI::App app{"Banded circulant solver with the cyclic-shift ansatz"};
    app.require_subcommand(1);

    auto *solve = app.add_subcommand("solve", "Solve one system and write solution.json");
    auto *compare = app.add_subcommand("compare-backends", "Run every backend on one instance");
    auto *sweep = app.add_subcommand("sweep-truncation", "Minimal T over a xi grid and b kinds");
    auto *estimate = app.add_subcommand("estimate", "Estimate one overlap <b, Q^m b>");
    auto *budget = app.add_subcommand("budget", "Advisory measurement budget");

    for (auto *sub : {solve, compare, sweep, estimate, budget}) {
        sub->add_option("--out", out, "Output directory")->capture_default_str();
        add_estimator_flags(*sub, cfg);
    }
    for (auto *sub : {solve, compare, estimate, budget}) {
        add_problem_flags(*sub, cfg, f);
    }
    add_backend_flag(*solve, f);
    add_backend_flag(*estimate, f);
    add_truncation_flags(*solve, cfg, f);
    add_truncation_flags(*compare, cfg, f);
    budget->add_option("--t", f.t, "Truncation T (default: the cap)");
    budget->add_option("--nu", cfg.nu, "Loss target for the T cap")->capture_default_str();
    solve->add_flag("--materialize", cfg.materialize, "Also write x.csv");
    estimate->add_option("--m", cfg.shift, "Shift m")->capture_default_str();

    sweep->add_option("--n", f.n, "Dimension N (power of two)")->capture_default_str();
    sweep->add_option("--xi-list", cfg.xi_list, "Grid of xi values")->delimiter(',');
    sweep->add_option("--kinds", cfg.kinds, "Right-hand side kinds")
        ->delimiter(',')
        ->check(CLI::IsMember({"zero", "ghz", "ramp", "layered"}));
    sweep->add_option("--upsilon", cfg.upsilon, "Loss threshold")->capture_default_str();

    try {
        cfg.estimator.seed = default_seed();
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    // Generated sweeps default to N = 2^10.
    if (argc > 1 && std::string(argv[1]) == "sweep-truncation") {
        f.n = 1024;
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (!f.problem.empty()) {
            cfg.problem_file = f.problem;
        }
        if (f.n < 1) {
            throw std::invalid_argument("--n must be positive");
        }
        cfg.n = static_cast<cqs::Index>(f.n);
        cfg.backend = cqs::parse_backend(f.backend);
        if (f.t) {
            if (*f.t < 0) {
                throw std::invalid_argument("--t must be non-negative");
            }
            cfg.t = static_cast<cqs::Index>(*f.t);
        }
        cfg.out_dir = out;
        cfg.estimator.validate();

        if (app.got_subcommand(solve)) {
            return cmd_solve(cfg, std::cout);
        }
        if (app.got_subcommand(compare)) {
            return cmd_compare_backends(cfg, std::cout);
        }
        if (app.got_subcommand(sweep)) {
            return cmd_sweep_truncation(cfg, std::cout);
        }
        if (app.got_subcommand(estimate)) {
            return cmd_estimate(cfg, std::cout);
        }
        return cmd_budget(cfg, std::cout);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
