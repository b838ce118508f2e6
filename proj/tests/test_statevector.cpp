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

constexpr double kPi = std::numbers::pi;

QuantumState<double> random_state(int n, std::uint64_t seed) {
    return QuantumState<double>::from_amplitudes(oracle::random_vector(Index{1} << n, seed));
}

/// Unitary of an in-place circuit, column by column.
template <typename F> CMat unitary_of(int n, F &&circuit) {
    const Index dim = Index{1} << n;
    CMat u(dim, dim);
    for (Index k = 0; k < dim; ++k) {
        QuantumState<double> s(n, basis_state<double>(n, k));
        circuit(s);
        u.col(k) = s.amplitudes();
    }
    return u;
}

double max_diff(const CMat &a, const CMat &b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("single gates", "[statevector]") {
    QuantumState<double> s(1);
    apply_h(s, 0);
    CHECK(std::abs(s.amplitudes()[0] - C(1 / std::sqrt(2.0))) < 1e-15);
    CHECK(std::abs(s.amplitudes()[1] - C(1 / std::sqrt(2.0))) < 1e-15);

    QuantumState<double> one(1, basis_state<double>(1, 1));
    apply_phase(one, 0, kPi);
    CHECK(std::abs(one.amplitudes()[1] - C(-1)) < 1e-15);

    QuantumState<double> t(3);
    CHECK_THROWS_AS(apply_h(t, 3), std::out_of_range);
    CHECK_THROWS_AS(apply_phase(t, -1, 0.1), std::out_of_range);
    CHECK_THROWS_AS(apply_cphase(t, 1, 1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(apply_swap(t, 0, 5), std::out_of_range);
    CHECK_THROWS_AS(QuantumState<double>(0), std::invalid_argument);
    CHECK_THROWS_AS(QuantumState<double>(kMaxQubits + 1), std::invalid_argument);
    CHECK_THROWS_AS(QuantumState<double>(2, CVec::Ones(4)), std::invalid_argument);
}

TEST_CASE("gate sequences match dense Kronecker products", "[statevector]") {
    Rng rng(17);
    for (int n = 1; n <= 4; ++n) {
        for (int trial = 0; trial < 10; ++trial) {
            CMat u = CMat::Identity(Index{1} << n, Index{1} << n);
            QuantumState<double> s = random_state(n, static_cast<std::uint64_t>(10 * n + trial));
            const CVec start = s.amplitudes();
            for (int g = 0; g < 12; ++g) {
                const int a = static_cast<int>(rng() % static_cast<unsigned>(n));
                int b = static_cast<int>(rng() % static_cast<unsigned>(n));
                const double theta = 2 * kPi * rng.uniform();
                const auto kind = n == 1 ? rng() % 2 : rng() % 4;
                if (kind >= 2 && b == a) {
                    b = (a + 1) % n;
                }
                switch (kind) {
                case 0:
                    apply_h(s, a);
                    u = oracle::embed(oracle::hadamard_gate(), a, n) * u;
                    break;
                case 1:
                    apply_phase(s, a, theta);
                    u = oracle::embed(oracle::phase_gate(theta), a, n) * u;
                    break;
                case 2:
                    apply_cphase(s, a, b, theta);
                    u = oracle::cphase(a, b, theta, n) * u;
                    break;
                default:
                    apply_swap(s, a, b);
                    u = oracle::swap_gate(a, b, n) * u;
                    break;
                }
                REQUIRE(std::abs(s.amplitudes().norm() - 1.0) < 1e-12);
            }
            REQUIRE((s.amplitudes() - u * start).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("qft is the DFT matrix", "[statevector]") {
    for (int n = 1; n <= 5; ++n) {
        const CMat u = unitary_of(n, [](QuantumState<double> &s) { qft(s); });
        REQUIRE(max_diff(u, oracle::dft(Index{1} << n)) <= 1e-10);
        const CMat v = unitary_of(n, [](QuantumState<double> &s) { inverse_qft(s); });
        REQUIRE(max_diff(v, oracle::dft(Index{1} << n).adjoint()) <= 1e-10);
    }
    QuantumState<double> zero(4);
    qft(zero);
    CHECK((zero.amplitudes() - uniform_state<double>(4)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("qft then inverse_qft is the identity", "[statevector]") {
    for (int n = 1; n <= 6; ++n) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            auto s = random_state(n, seed);
            const CVec before = s.amplitudes();
            qft(s);
            inverse_qft(s);
            REQUIRE((s.amplitudes() - before).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("qft on a sub-register", "[statevector]") {
    // QFT on qubits 1..3 of 4 equals I (x) F_8.
    const CMat u = unitary_of(4, [](QuantumState<double> &s) { qft(s, 1, 3); });
    CMat ref = CMat::Zero(16, 16);
    ref.topLeftCorner(8, 8) = oracle::dft(8);
    ref.bottomRightCorner(8, 8) = oracle::dft(8);
    CHECK(max_diff(u, ref) <= 1e-12);
    QuantumState<double> s(3);
    CHECK_THROWS_AS(qft(s, 2, 2), std::out_of_range);
}

TEST_CASE("phase layer is diag(omega^{m y})", "[statevector]") {
    for (int n = 1; n <= 4; ++n) {
        const Index dim = Index{1} << n;
        for (std::int64_t m : {-5, -1, 0, 1, 3, 16}) {
            const CMat u = unitary_of(n, [&](QuantumState<double> &s) {
                apply_phase_layer(s, 0, n, m);
            });
            CMat ref = CMat::Zero(dim, dim);
            for (Index y = 0; y < dim; ++y) {
                ref(y, y) = std::polar(1.0, 2 * kPi * static_cast<double>(m * y) /
                                                static_cast<double>(dim));
            }
            REQUIRE(max_diff(u, ref) <= 1e-12);
        }
        const auto angles = phase_layer_angles<double>(n, 0);
        for (double a : angles) {
            CHECK(a == 0.0);
        }
    }
}

TEST_CASE("apply_q_power is the cyclic shift", "[statevector]") {
    QuantumState<double> zero(3);
    apply_q_power(zero, 1);
    CHECK((zero.amplitudes() - basis_state<double>(3, 1)).cwiseAbs().maxCoeff() < 1e-12);

    for (int n = 1; n <= 5; ++n) {
        const Index dim = Index{1} << n;
        const auto s0 = random_state(n, static_cast<std::uint64_t>(n));
        for (std::int64_t m = -dim; m <= dim; ++m) {
            auto s = s0;
            apply_q_power(s, m);
            REQUIRE((s.amplitudes() - shift_apply(s0.amplitudes(), m)).cwiseAbs().maxCoeff() <=
                    1e-10);
        }
        for (std::int64_t a : {-3, 2, 5}) {
            for (std::int64_t b : {-1, 4}) {
                auto s = s0;
                auto t = s0;
                apply_q_power(s, a);
                apply_q_power(s, b);
                apply_q_power(t, a + b);
                REQUIRE((s.amplitudes() - t.amplitudes()).cwiseAbs().maxCoeff() <= 1e-10);
            }
        }
    }
}

TEST_CASE("QFT direction calibration is frozen", "[statevector][calibration]") {
    // Q = F^{-1} Lambda F with F the forward QFT applied first. The opposite
    // ordering shifts backwards.
    const auto s0 = random_state(3, 77);
    auto fwd = s0;
    apply_q_power(fwd, 1);
    auto rev = s0;
    inverse_qft(rev);
    apply_phase_layer(rev, 0, 3, 1);
    qft(rev);
    CHECK((fwd.amplitudes() - shift_apply(s0.amplitudes(), 1)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((rev.amplitudes() - shift_apply(s0.amplitudes(), -1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("hadamard_test probabilities are (1 + Re/Im overlap)/2", "[statevector]") {
    Rng rng(5);
    auto e0 = QuantumState<double>(3);
    auto r = hadamard_test(e0, 0, OverlapPart::Real, 1000, rng);
    CHECK(r.p0 == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.n0 == 1000);
    r = hadamard_test(e0, 4, OverlapPart::Real, 1000, rng);
    CHECK(r.p0 == Catch::Approx(0.5).margin(1e-12));
    CHECK(r.n0 + r.n1 == 1000);
    CHECK_THROWS_AS(hadamard_test(e0, 1, OverlapPart::Real, 0, rng), std::invalid_argument);

    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 5;
        const Index dim = Index{1} << n;
        const auto s = random_state(n, static_cast<std::uint64_t>(300 + trial));
        const std::int64_t m = static_cast<std::int64_t>(rng() % static_cast<unsigned>(3 * dim)) -
                               dim;
        const C e = oracle::overlap(s.amplitudes(), m);
        const auto re = hadamard_test(s, m, OverlapPart::Real, 1, rng);
        const auto im = hadamard_test(s, m, OverlapPart::Imag, 1, rng);
        REQUIRE(std::abs(re.p0 - (1 + e.real()) / 2) <= 1e-10);
        REQUIRE(std::abs(im.p0 - (1 + e.imag()) / 2) <= 1e-10);
        // Probability-level simulation used by the hadamard backend.
        const auto p = hadamard_probabilities(fourier_weights(s.amplitudes()), m);
        REQUIRE(std::abs(p.real_p0 - re.p0) <= 1e-10);
        REQUIRE(std::abs(p.imag_p0 - im.p0) <= 1e-10);
    }
}

TEST_CASE("gate-level and probability-level shots agree on one stream", "[statevector]") {
    const auto b = layered_rotation_state<double>(4);
    const auto s = QuantumState<double>::from_amplitudes(b);
    EstimatorConfig cfg;
    cfg.shots = 5000;
    for (std::int64_t m : {1, 3, 6}) {
        Rng g(21, static_cast<std::uint64_t>(m));
        const auto re = hadamard_test(s, m, OverlapPart::Real, cfg.shots, g);
        const auto im = hadamard_test(s, m, OverlapPart::Imag, cfg.shots, g);
        Rng p(21, static_cast<std::uint64_t>(m));
        const C est = estimate_overlap_hadamard(b, m, cfg, p);
        const double scale = 1.0 / static_cast<double>(cfg.shots);
        CHECK(est.real() == Catch::Approx(kHadamardRealSign * (re.n0 - re.n1) * scale));
        CHECK(est.imag() == Catch::Approx(kHadamardImagSign * (im.n0 - im.n1) * scale));
    }
}

TEST_CASE("hadamard sign calibration is frozen", "[statevector][calibration]") {
    CHECK(kHadamardRealSign == 1);
    CHECK(kHadamardImagSign == 1);
    // Known instance with Re and Im both far from zero.
    const auto b = layered_rotation_state<double>(3);
    const C e = estimate_overlap_exact(b, 1);
    REQUIRE(e.real() > 0.3);
    REQUIRE(e.imag() < -0.25);
    Rng rng(1);
    const auto s = QuantumState<double>::from_amplitudes(b);
    const auto re = hadamard_test(s, 1, OverlapPart::Real, 1, rng);
    const auto im = hadamard_test(s, 1, OverlapPart::Imag, 1, rng);
    CHECK(re.p0 > 0.5);
    CHECK(im.p0 < 0.5);
    CHECK(kHadamardRealSign * (2 * re.p0 - 1) == Catch::Approx(e.real()).margin(1e-12));
    CHECK(kHadamardImagSign * (2 * im.p0 - 1) == Catch::Approx(e.imag()).margin(1e-12));
}

TEST_CASE("state generators", "[statevector]") {
    const double r2 = 1 / std::sqrt(2.0);
    CVec ghz(4);
    ghz << r2, 0, 0, r2;
    CHECK((ghz_state<double>(2) - ghz).norm() < 1e-15);
    CVec ramp(4);
    ramp << 0, 1, 2, 3;
    CHECK((ramp_state<double>(2) - ramp / std::sqrt(14.0)).norm() < 1e-15);
    CHECK(basis_state<double>(3, 5)[5] == C(1));
    CHECK_THROWS_AS(basis_state<double>(3, 8), std::out_of_range);
    CHECK(std::abs(uniform_state<double>(6).norm() - 1) < 1e-14);
    for (int n = 1; n <= 10; ++n) {
        for (auto v : {ghz_state<double>(n), ramp_state<double>(n), uniform_state<double>(n),
                       layered_rotation_state<double>(n)}) {
            REQUIRE(std::abs(v.norm() - 1) < 1e-12);
        }
    }
    CHECK_THROWS_AS(layered_rotation_state<double>(3, {0.1, 0.2}), std::invalid_argument);
}

TEST_CASE("layered rotation state golden values", "[statevector][golden]") {
    // H on every qubit then P(pi/2^{j+1}) on qubit j gives
    // b_k = exp(i pi k / 2^n) / sqrt(2^n).
    const auto b = layered_rotation_state<double>(5);
    REQUIRE(b.size() == 32);
    for (Index k = 0; k < 32; ++k) {
        const C ref = std::polar(1 / std::sqrt(32.0), kPi * static_cast<double>(k) / 32);
        REQUIRE(std::abs(b[k] - ref) < 1e-14);
    }
    CHECK(b[1].real() == Catch::Approx(0.1759254671907978).margin(1e-15));
    CHECK(b[1].imag() == Catch::Approx(0.01732714614988643).margin(1e-15));
    CHECK(b[31].real() == Catch::Approx(-0.1759254671907978).margin(1e-15));
}
