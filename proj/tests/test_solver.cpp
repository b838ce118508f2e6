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
#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace cqs;
using oracle::C;
using oracle::CMat;
using oracle::CVec;

namespace {

/// Columns C Q^j b for j = -t..t.
CMat dense_basis(const BandedCirculantd &c, const CVec &b, Index t) {
    const CMat cd = oracle::dense(c);
    CMat u(b.size(), 2 * t + 1);
    for (Index j = -t; j <= t; ++j) {
        u.col(j + t) = cd * (oracle::shift_matrix(b.size(), j) * b);
    }
    return u;
}

double exact_loss(const BandedCirculantd &c, const CVec &b, Index t) {
    const ExactBackend<double> backend(b);
    const auto table = fill_table(backend, c.bandwidth(), t, EstimatorConfig{});
    const auto res = minimize(assemble(c, t, table));
    AnsatzSolution<double> sol;
    sol.t = t;
    sol.alphas = res.alphas;
    return mse_loss(c, materialize(sol, b), b);
}

SolveOptions fixed(Index t) {
    SolveOptions o;
    o.mode = TruncationMode::Fixed;
    o.t = t;
    return o;
}

SolveOptions adaptive(double nu) {
    SolveOptions o;
    o.mode = TruncationMode::Adaptive;
    o.nu = nu;
    return o;
}

} // namespace

TEST_CASE("assemble: identity and shift", "[solver]") {
    const CVec b = oracle::random_vector(8, 1);
    const ExactBackend<double> backend(b);
    EstimatorConfig cfg;

    const auto id = BandedCirculantd::identity(8);
    const auto sys = assemble(id, 0, fill_table(backend, 0, 0, cfg));
    CHECK(sys.v.rows() == 1);
    CHECK(std::abs(sys.v(0, 0) - C(1)) < 1e-15);
    CHECK(std::abs(sys.q[0] - C(1)) < 1e-15);
    const auto res = minimize(sys);
    CHECK(std::abs(res.alphas[0] - C(1)) < 1e-12);
    CHECK(std::abs(res.objective) < 1e-12);

    const auto q = BandedCirculantd::cyclic_shift(8);
    const auto table = fill_table(backend, 1, 1, cfg);
    const auto qs = assemble(q, 1, table);
    for (Index j = -1; j <= 1; ++j) {
        CHECK(std::abs(qs.q[j + 1] - table.at(1 + j)) < 1e-15);
    }
    const auto qr = minimize(qs);
    CHECK(std::abs(qr.alphas[0] - C(1)) < 1e-8);
    CHECK(std::abs(qr.alphas[1]) < 1e-8);
    CHECK(std::abs(qr.alphas[2]) < 1e-8);

    CHECK_THROWS_AS(assemble(q, 2, table), std::out_of_range);
    CHECK_THROWS_AS(assemble(q, -1, table), std::invalid_argument);
}

TEST_CASE("assemble matches dense inner products", "[solver]") {
    const auto heat = heat_matrix<double>(16, 0.2);
    const CVec b = oracle::random_vector(16, 2);
    const ExactBackend<double> backend(b);
    const Index t = 3;
    const auto sys = assemble(heat, t, fill_table(backend, 1, t, EstimatorConfig{}));
    const CMat u = dense_basis(heat, b, t);
    const CMat v = u.adjoint() * u;
    const CVec q = u.adjoint() * b;
    CHECK((sys.v - v).cwiseAbs().maxCoeff() < 1e-10);
    // q_j = <b, C Q^j b> = conj(<C Q^j b, b>).
    CHECK((sys.q - q.conjugate()).cwiseAbs().maxCoeff() < 1e-10);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Index n = 8 + 4 * static_cast<Index>(seed % 3);
        const auto c = oracle::random_circulant(n, 1 + static_cast<Index>(seed % 2), seed);
        const CVec bb = oracle::random_vector(n, 900 + seed);
        const ExactBackend<double> be(bb);
        const Index tt = c.bandwidth() + static_cast<Index>(seed % 3);
        const auto s = assemble(c, tt, fill_table(be, c.bandwidth(), tt, EstimatorConfig{}));
        const CMat uu = dense_basis(c, bb, tt);
        REQUIRE((s.v - uu.adjoint() * uu).cwiseAbs().maxCoeff() < 1e-10);
        REQUIRE((s.q - CVec(uu.adjoint() * bb).conjugate()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("regression system invariants", "[solver]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Index n = 16;
        const Index k = 1 + static_cast<Index>(seed % 3);
        const auto c = oracle::random_circulant(n, k, 40 + seed);
        const CVec b = oracle::random_vector(n, 60 + seed);
        const ExactBackend<double> backend(b);
        const Index t = k + static_cast<Index>(seed % 3);
        const auto sys = assemble(c, t, fill_table(backend, k, t, EstimatorConfig{}));
        const Index d = sys.dim();

        REQUIRE((sys.v - sys.v.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
        for (Index i = 1; i < d; ++i) {
            for (Index j = 1; j < d; ++j) {
                REQUIRE(sys.v(i, j) == sys.v(i - 1, j - 1));
            }
        }
        const auto [lo, hi] = oracle::eig_range(sys.v);
        const double vnorm = sys.v.operatorNorm();
        REQUIRE(lo >= -1e-9 * vnorm);
        REQUIRE(hi <= vnorm * (1 + 1e-12));

        REQUIRE(sys.w.rows() == 2 * d);
        REQUIRE((sys.w.topLeftCorner(d, d) == sys.v.real()));
        REQUIRE((sys.w.topRightCorner(d, d) == -sys.v.imag()));
        REQUIRE((sys.w.bottomLeftCorner(d, d) == sys.v.imag()));
        REQUIRE((sys.w.bottomRightCorner(d, d) == sys.v.real()));
        REQUIRE((sys.r.head(d) == sys.q.real()));
        REQUIRE((sys.r.tail(d) == -sys.q.imag()));
    }
}

TEST_CASE("minimize on a hand-built system", "[solver]") {
    RegressionSystem<double> sys;
    sys.t = 0;
    sys.v = CMat::Identity(1, 1);
    sys.q = CVec::Ones(1);
    sys.w = Eigen::MatrixXd::Identity(2, 2);
    sys.r = Eigen::Vector2d(1, 0);
    const auto res = minimize(sys);
    CHECK(res.z.isApprox(Eigen::Vector2d(1, 0)));
    CHECK(std::abs(res.alphas[0] - C(1)) < 1e-15);
    CHECK(std::abs(res.objective) < 1e-15);
    CHECK(res.rank == 2);

    MinimizeOptions bad;
    bad.reg = -1;
    CHECK_THROWS_AS(minimize(sys, bad), std::invalid_argument);

    // Singular W: the minimum-norm minimizer ignores the null direction.
    sys.w << 1, 0, 0, 0;
    sys.r = Eigen::Vector2d(2, 0);
    const auto sing = minimize(sys);
    CHECK(sing.z.isApprox(Eigen::Vector2d(2, 0)));
    CHECK(sing.rank == 1);
    MinimizeOptions tiny;
    tiny.reg = 1e-20;
    CHECK_THROWS_AS(minimize(sys, tiny), std::domain_error);

    // An indefinite W is clipped to its PSD part.
    sys.w << 1, 0, 0, -3;
    sys.r = Eigen::Vector2d(1, 5);
    const auto clip = minimize(sys);
    CHECK(clip.z.isApprox(Eigen::Vector2d(1, 0)));
}

TEST_CASE("objective equals the materialized loss", "[solver]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Index n = 8 << (seed % 3);
        const Index k = 1 + static_cast<Index>(seed % 3);
        const auto c = oracle::random_circulant(n, k, 100 + seed);
        const CVec b = oracle::random_vector(n, 200 + seed);
        const ExactBackend<double> backend(b);
        const auto sol = solve(c, backend, EstimatorConfig{}, fixed(k + 1));
        REQUIRE(sol.alphas.size() == 2 * sol.t + 1);
        const double loss = mse_loss(c, materialize(sol), b);
        REQUIRE(std::abs(sol.diagnostics.objective - loss) <= 1e-8);
        REQUIRE(std::abs(sol.diagnostics.loss - loss) <= 1e-14);
    }
}

TEST_CASE("exact loss is non-increasing in T", "[solver]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Index n = 16 + 8 * static_cast<Index>(seed % 2);
        const Index k = 1 + static_cast<Index>(seed % 3);
        const auto c = oracle::random_circulant(n, k, 300 + seed);
        const CVec b = oracle::random_vector(n, 400 + seed);
        double prev = 2;
        for (Index t = k; t <= n / 2; ++t) {
            const double loss = exact_loss(c, b, t);
            REQUIRE(loss <= prev + 1e-12);
            prev = loss;
        }
    }
}

TEST_CASE("scaling C scales alpha inversely", "[solver]") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto c = oracle::random_circulant(16, 2, 500 + seed);
        const CVec b = oracle::random_vector(16, 600 + seed);
        const ExactBackend<double> backend(b);
        for (double s : {0.25, 3.0}) {
            const auto a = solve(c, backend, EstimatorConfig{}, fixed(3));
            const auto as = solve(c.scaled(C(s)), backend, EstimatorConfig{}, fixed(3));
            REQUIRE((as.alphas - a.alphas / s).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
}

TEST_CASE("choose_truncation", "[solver]") {
    CHECK(choose_truncation(1, 1.0, 1.0) == 0);
    CHECK(choose_truncation(1, 21.0, 0.01) == 161);
    CHECK(choose_truncation(0, 21.0, 0.01) == 0);
    CHECK(choose_truncation(2, 21.0, 0.01) == 322);
    CHECK(choose_truncation(1, 21.0, 0.01, 0.5) == 81);
    CHECK_THROWS_AS(choose_truncation(1, 0.5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(choose_truncation(1, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(choose_truncation(1, 2, 1.5), std::invalid_argument);
}

TEST_CASE("shot_budget", "[solver]") {
    const auto heat = heat_matrix<double>(32, 0.2);
    const auto b = shot_budget(heat, 4, 21.0, 0.1);
    CHECK(b.coeff_l1 == Catch::Approx(4.2).epsilon(1e-15));
    CHECK(b.total == std::ceil(5.0 * 4 * std::pow(4.2, 4) * 441 / std::pow(0.1, 5)));
    CHECK(b.distinct_shifts == 10);
    CHECK(b.per_shift == Catch::Approx(b.total / 10));

    const auto zero = shot_budget(BandedCirculantd::identity(4), 0, 1.0, 0.1);
    CHECK(zero.total == 0);
    CHECK(zero.per_shift == 0);
    CHECK(zero.distinct_shifts == 0);

    CHECK(shot_budget(heat, 5, 21.0, 0.1).total > b.total);
    CHECK(shot_budget(heat, 4, 30.0, 0.1).total > b.total);
    CHECK(shot_budget(heat, 4, 21.0, 0.2).total < b.total);
    CHECK(shot_budget(heat.scaled(C(2)), 4, 21.0, 0.1).total > b.total);
    const double ratio = shot_budget(heat, 4, 21.0, 0.05).total / b.total;
    CHECK(ratio == Catch::Approx(32.0).epsilon(1e-9));
    CHECK_THROWS_AS(shot_budget(heat, 4, 21.0, 0.0), std::invalid_argument);
}

TEST_CASE("materialize", "[solver]") {
    const CVec b = oracle::random_vector(8, 3);
    AnsatzSolution<double> sol;
    sol.t = 0;
    sol.alphas = CVec::Ones(1);
    CHECK((materialize(sol, b) == b));
    CHECK_THROWS_AS(materialize(sol), std::invalid_argument);
    sol.t = 1;
    CHECK_THROWS_AS(materialize(sol, b), std::invalid_argument);
    sol.alphas = CVec::Zero(3);
    sol.alphas[0] = 2;
    CHECK((materialize(sol, b) - 2.0 * shift_apply(b, -1)).norm() < 1e-15);
    CHECK(sol.alpha(-1) == C(2));
}

TEST_CASE("solve: trivial systems", "[solver]") {
    const CVec b = oracle::random_vector(8, 4);
    const ExactBackend<double> backend(b);
    const auto id = solve(BandedCirculantd::identity(8), backend, EstimatorConfig{}, adaptive(1e-4));
    CHECK(id.t == 0);
    CHECK(std::abs(id.alpha(0) - C(1)) < 1e-12);
    CHECK(id.diagnostics.loss <= 1e-10);
    CHECK(id.diagnostics.converged);

    const auto q = solve(BandedCirculantd::cyclic_shift(8), backend, EstimatorConfig{}, fixed(1));
    CHECK(q.diagnostics.loss <= 1e-10);
    CHECK(std::abs(q.alpha(-1) - C(1)) < 1e-8);
    CHECK(std::abs(materialize(q).norm() - 1) < 1e-8);

    CHECK_THROWS_AS(solve(heat_matrix<double>(8, 0.2), backend, EstimatorConfig{}, fixed(0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve(heat_matrix<double>(16, 0.2), backend, EstimatorConfig{}, fixed(1)),
                    std::invalid_argument);
}

TEST_CASE("solve: heat instance in adaptive mode", "[solver]") {
    const auto heat = heat_matrix<double>(32, 0.2);
    const CVec b = layered_rotation_state<double>(5);
    const ExactBackend<double> backend(b);
    const auto sol = solve(heat, backend, EstimatorConfig{}, adaptive(1e-4));
    CHECK(sol.diagnostics.converged);
    CHECK(sol.diagnostics.loss < 1e-4);
    CHECK(sol.t < 161);
    CHECK(sol.diagnostics.loss <= sol.diagnostics.oracle_loss + 1e-4);
    CHECK(sol.diagnostics.cap == 16);
    // Doubling schedule from K.
    std::vector<Index> ts;
    for (const auto &s : sol.diagnostics.steps) {
        ts.push_back(s.t);
    }
    CHECK(ts == std::vector<Index>{1, 2, 4, 8, 16});
    CHECK(sol.diagnostics.table.max_shift() == 2 + 2 * sol.t);

    // Smallest fixed T meeting 1e-4 on this instance.
    Index tmin = 1;
    while (exact_loss(heat, b, tmin) >= 1e-4) {
        ++tmin;
    }
    CHECK(tmin == 10);
}

TEST_CASE("solve: adaptive search reports non-convergence", "[solver]") {
    const auto heat = heat_matrix<double>(64, 0.05);
    const CVec b = basis_state<double>(6, 0);
    const ExactBackend<double> backend(b);
    auto opt = adaptive(1e-8);
    opt.truncation_constant = 1e-4;
    const auto sol = solve(heat, backend, EstimatorConfig{}, opt);
    CHECK(sol.diagnostics.cap == 1);
    CHECK(sol.t == 1);
    CHECK_FALSE(sol.diagnostics.converged);
}

TEST_CASE("solve: noisy backends stay close to the exact objective", "[solver]") {
    const auto heat = heat_matrix<double>(32, 0.2);
    const CVec b = layered_rotation_state<double>(5);
    EstimatorConfig cfg;
    cfg.epsilon = 0.05;
    cfg.delta = 0.1;
    cfg.seed = 3;
    const ExactBackend<double> exact(b);
    const SampleQueryBackend<double> sq(b);
    for (Index t : {2, 4, 8}) {
        const auto ref = solve(heat, exact, cfg, fixed(t));
        const auto est = solve(heat, sq, cfg, fixed(t));
        const double l1 = est.alphas.cwiseAbs().sum();
        CHECK(std::abs(est.diagnostics.objective - ref.diagnostics.objective) <=
              2 * cfg.epsilon * l1);
        CHECK(est.diagnostics.accounting.samples ==
              static_cast<std::uint64_t>((2 + 2 * t) * 18 * 3600));
    }
}

TEST_CASE("solve: determinism for a fixed seed", "[solver]") {
    const auto heat = heat_matrix<double>(32, 0.2);
    const CVec b = layered_rotation_state<double>(5);
    EstimatorConfig cfg;
    cfg.seed = 99;
    for (auto kind : {BackendKind::Hadamard, BackendKind::SampleQuery}) {
        const auto backend = make_backend(kind, b);
        const auto a = solve(heat, *backend, cfg, fixed(6));
        const auto c = solve(heat, *backend, cfg, fixed(6));
        CHECK((a.alphas == c.alphas));
        CHECK(a.diagnostics.loss == c.diagnostics.loss);
    }
}
