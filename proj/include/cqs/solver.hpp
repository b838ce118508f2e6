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

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "circulant.hpp"
#include "estimators.hpp"
#include "types.hpp"

namespace cqs {

/// Quadratic model of the loss over the ansatz {Q^m b : |m| <= T}:
/// ||C x(alpha) - b||^2 = alpha^H V alpha - 2 Re(q^T alpha) + 1, and its real
/// form z^T W z - 2 r^T z + 1 with z = (Re alpha, Im alpha).
template <typename Real> struct RegressionSystem {
    Index t = 0;
    /// V_jk = <C Q^j b, C Q^k b>, Hermitian Toeplitz.
    CMatrix<Real> v;
    /// q_j = <b, C Q^j b>.
    CVector<Real> q;
    /// [[Re V, -Im V], [Im V, Re V]].
    RMatrix<Real> w;
    /// (Re q, -Im q); the sign on the imaginary half makes r^T z = Re(q^T alpha).
    RVector<Real> r;

    Index dim() const { return 2 * t + 1; }
};

/// Builds V, q, W and r from the shift overlaps. V is Toeplitz, so only its
/// 4T+1 distinct diagonals are summed, O(T K^2) work.
template <typename Real>
RegressionSystem<Real> assemble(const BandedCirculant<Real> &c, Index t,
                                const ShiftOverlapTable<Real> &table) {
    const Index k = c.bandwidth();
    if (t < 0) {
        throw std::invalid_argument("truncation must be non-negative");
    }
    if (table.max_shift() < 2 * k + 2 * t) {
        throw std::out_of_range("overlap table covers shifts up to " +
                                std::to_string(table.max_shift()) + " but assembly needs " +
                                std::to_string(2 * k + 2 * t));
    }
    const Index d = 2 * t + 1;

    // g[diag + 2t] = sum_{y,z} conj(c_z) c_y e_{y - z + diag}
    std::vector<Complex<Real>> g(static_cast<std::size_t>(4 * t + 1), Complex<Real>(0));
    for (Index diag = -2 * t; diag <= 2 * t; ++diag) {
        Complex<Real> acc(0);
        for (Index y = -k; y <= k; ++y) {
            for (Index z = -k; z <= k; ++z) {
                acc += std::conj(c.coeff(z)) * c.coeff(y) * table.at(y - z + diag);
            }
        }
        g[static_cast<std::size_t>(diag + 2 * t)] = acc;
    }

    RegressionSystem<Real> sys;
    sys.t = t;
    sys.v.resize(d, d);
    for (Index j = 0; j < d; ++j) {
        for (Index col = 0; col < d; ++col) {
            sys.v(j, col) = g[static_cast<std::size_t>(col - j + 2 * t)];
        }
    }
    sys.q.resize(d);
    for (Index j = -t; j <= t; ++j) {
        Complex<Real> acc(0);
        for (Index y = -k; y <= k; ++y) {
            acc += c.coeff(y) * table.at(y + j);
        }
        sys.q[j + t] = acc;
    }

    sys.w.resize(2 * d, 2 * d);
    sys.w.topLeftCorner(d, d) = sys.v.real();
    sys.w.topRightCorner(d, d) = -sys.v.imag();
    sys.w.bottomLeftCorner(d, d) = sys.v.imag();
    sys.w.bottomRightCorner(d, d) = sys.v.real();
    sys.r.resize(2 * d);
    sys.r.head(d) = sys.q.real();
    sys.r.tail(d) = -sys.q.imag();
    return sys;
}

struct MinimizeOptions {
    /// Tikhonov term added to the clipped spectrum.
    double reg = 0.0;
    /// Eigen-directions of the clipped W at or below this absolute level are
    /// dropped (noise floor of an estimated W).
    double noise_floor = 0.0;
    /// Relative rank cutoff for the minimum-norm solution.
    double rel_cutoff = 1e-12;
};

template <typename Real> struct MinimizeResult {
    CVector<Real> alphas;
    RVector<Real> z;
    /// z^T W z - 2 r^T z + 1 with the unmodified W.
    Real objective = 0;
    /// Eigen-directions kept.
    Index rank = 0;
};

/// Minimizes z^T W z - 2 r^T z + 1 through the stationarity condition.
///
/// The symmetric part of W is eigendecomposed, negative eigenvalues are
/// clipped to zero, and z = sum_i u_i (u_i . r) / (w_i + reg) over the kept
/// directions, which is the minimum-norm minimizer when reg = 0.
template <typename Real>
MinimizeResult<Real> minimize(const RegressionSystem<Real> &sys, const MinimizeOptions &opt = {}) {
    if (opt.reg < 0) {
        throw std::invalid_argument("regularization must be non-negative");
    }
    const Index d = sys.dim();
    const RMatrix<Real> sym = (sys.w + sys.w.transpose()) / Real(2);
    Eigen::SelfAdjointEigenSolver<RMatrix<Real>> eig(sym);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition of W failed");
    }
    const RVector<Real> clipped = eig.eigenvalues().cwiseMax(Real(0));
    const auto reg = static_cast<Real>(opt.reg);
    const Real top = clipped.maxCoeff() + reg;
    if (!(top > 0)) {
        throw std::domain_error("W is zero after clipping; nothing to minimize");
    }
    if (reg > 0 && (clipped.minCoeff() + reg) < static_cast<Real>(opt.rel_cutoff) * top) {
        throw std::domain_error(
            "regularized system is numerically singular; increase the regularization");
    }
    const Real keep_above =
        std::max(static_cast<Real>(opt.rel_cutoff) * top, static_cast<Real>(opt.noise_floor));

    const RVector<Real> proj = eig.eigenvectors().transpose() * sys.r;
    RVector<Real> coeff = RVector<Real>::Zero(2 * d);
    Index rank = 0;
    for (Index i = 0; i < 2 * d; ++i) {
        const Real lam = clipped[i] + reg;
        if (clipped[i] > keep_above || (reg > 0 && opt.noise_floor <= 0)) {
            coeff[i] = proj[i] / lam;
            ++rank;
        }
    }

    MinimizeResult<Real> out;
    out.z = eig.eigenvectors() * coeff;
    out.alphas.resize(d);
    for (Index m = 0; m < d; ++m) {
        out.alphas[m] = Complex<Real>(out.z[m], out.z[d + m]);
    }
    out.objective = out.z.dot(sys.w * out.z) - Real(2) * sys.r.dot(out.z) + Real(1);
    out.rank = rank;
    return out;
}

/// Truncation cap ceil(c K kappa ln(kappa / nu)).
inline Index choose_truncation(Index k, double kappa, double nu, double constant = 1.0) {
    if (!(kappa >= 1.0)) {
        throw std::invalid_argument("condition number must be >= 1");
    }
    if (!(nu > 0.0 && nu <= 1.0)) {
        throw std::invalid_argument("nu must lie in (0, 1]");
    }
    const double t = constant * static_cast<double>(k) * kappa * std::log(kappa / nu);
    return t <= 0.0 ? 0 : static_cast<Index>(std::ceil(t));
}

/// Advisory measurement count c (K+T) T B^4 kappa^2 / eps^5.
struct MeasurementBudget {
    double coeff_l1 = 0;
    double total = 0;
    /// Number of shifts actually estimated (2K + 2T).
    Index distinct_shifts = 0;
    /// Uniform split of total over the estimated shifts.
    double per_shift = 0;
};

template <typename Real>
MeasurementBudget shot_budget(const BandedCirculant<Real> &c, Index t, double kappa,
                              double eps, double constant = 1.0) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("eps must be positive");
    }
    MeasurementBudget b;
    const auto k = static_cast<double>(c.bandwidth());
    b.coeff_l1 = static_cast<double>(c.coeff_l1_norm());
    b.total = std::ceil(constant * (k + static_cast<double>(t)) * static_cast<double>(t) *
                        std::pow(b.coeff_l1, 4) * kappa * kappa / std::pow(eps, 5));
    b.distinct_shifts = 2 * c.bandwidth() + 2 * t;
    b.per_shift = b.distinct_shifts > 0 ? b.total / static_cast<double>(b.distinct_shifts) : 0.0;
    return b;
}

enum class TruncationMode { Fixed, Adaptive };

struct SolveOptions {
    TruncationMode mode = TruncationMode::Fixed;
    /// Truncation for fixed mode.
    Index t = 0;
    /// Adaptive target: loss <= oracle loss + nu.
    double nu = 1e-4;
    double tol_plateau = 1e-3;
    double truncation_constant = 1.0;
    /// Overrides; defaults depend on the backend (see default_minimize_options).
    std::optional<double> reg;
    std::optional<double> noise_floor;
    /// Multiplier on B^2 * sigma for the default noise floor.
    double noise_floor_factor = 0.1;
};

template <typename Real> struct TruncationStep {
    Index t;
    Real loss;
    Real objective;
};

template <typename Real> struct SolveDiagnostics {
    /// Quadratic-model objective at the returned alphas (uses estimated W, r).
    Real objective = 0;
    /// Exact ||C x~ - b||^2 of the materialized estimate.
    Real loss = 0;
    /// ||C x* - b||^2 of the FFT oracle solution.
    Real oracle_loss = 0;
    Accounting accounting;
    bool converged = true;
    Index rank = 0;
    /// Largest truncation adaptive mode may reach.
    Index cap = 0;
    std::vector<TruncationStep<Real>> steps;
    /// Overlaps the final solution was assembled from.
    ShiftOverlapTable<Real> table;
};

/// x~ = sum_{m=-T}^{T} alpha_m Q^m b together with the data that produced it.
template <typename Real> struct AnsatzSolution {
    Index t = 0;
    CVector<Real> alphas;
    std::shared_ptr<const CVector<Real>> b;
    std::string backend;
    SolveDiagnostics<Real> diagnostics;

    Complex<Real> alpha(Index m) const { return alphas[m + t]; }
};

/// sum_m alpha_m Q^m b. Verification/export path only: an explicit x~ is not
/// part of the algorithm's cost model.
template <typename Real>
CVector<Real> materialize(const AnsatzSolution<Real> &sol, const CVector<Real> &b) {
    if (sol.alphas.size() != 2 * sol.t + 1) {
        throw std::invalid_argument("solution has the wrong number of coefficients");
    }
    CVector<Real> x = CVector<Real>::Zero(b.size());
    for (Index m = -sol.t; m <= sol.t; ++m) {
        const auto a = sol.alpha(m);
        if (a != Complex<Real>(0)) {
            x += a * shift_apply(b, m);
        }
    }
    return x;
}

template <typename Real> CVector<Real> materialize(const AnsatzSolution<Real> &sol) {
    if (!sol.b) {
        throw std::invalid_argument("solution carries no vector handle");
    }
    return materialize(sol, *sol.b);
}

template <typename Real>
MinimizeOptions default_minimize_options(const BandedCirculant<Real> &c,
                                         const OverlapBackend<Real> &backend,
                                         const RegressionSystem<Real> &sys,
                                         const EstimatorConfig &cfg, const SolveOptions &opt) {
    MinimizeOptions mo;
    const bool noisy = backend.kind() != BackendKind::Exact;
    if (opt.reg) {
        mo.reg = *opt.reg;
    } else if (noisy) {
        mo.reg = 1e-8 * static_cast<double>(sys.w.trace()) / static_cast<double>(sys.w.rows());
    }
    if (opt.noise_floor) {
        mo.noise_floor = *opt.noise_floor;
    } else if (noisy) {
        const auto b1 = static_cast<double>(c.coeff_l1_norm());
        mo.noise_floor = opt.noise_floor_factor * b1 * b1 *
                         static_cast<double>(backend.noise_scale(cfg));
    }
    return mo;
}

namespace detail {
template <typename Real> struct Attempt {
    MinimizeResult<Real> result;
    Real loss;
};

template <typename Real>
Attempt<Real> attempt(const BandedCirculant<Real> &c, const OverlapBackend<Real> &backend,
                      const ShiftOverlapTable<Real> &table, Index t,
                      const EstimatorConfig &cfg, const SolveOptions &opt) {
    const auto sys = assemble(c, t, table);
    auto res = minimize(sys, default_minimize_options(c, backend, sys, cfg, opt));
    AnsatzSolution<Real> probe;
    probe.t = t;
    probe.alphas = res.alphas;
    const Real loss = mse_loss(c, materialize(probe, backend.vector()), backend.vector());
    return {std::move(res), loss};
}
} // namespace detail

/// End-to-end solve: overlap table, assembly, minimization.
///
/// Fixed mode runs once at opt.t. Adaptive mode starts at T = K and doubles T
/// until the exact loss meets oracle + nu, improves by less than tol_plateau
/// (relative), or T reaches the cap min(choose_truncation, N/2); at T = N/2
/// the ansatz already spans every cyclic shift of b.
template <typename Real>
AnsatzSolution<Real> solve(const BandedCirculant<Real> &c, const OverlapBackend<Real> &backend,
                           const EstimatorConfig &cfg, const SolveOptions &opt = {}) {
    cfg.validate();
    const CVector<Real> &b = backend.vector();
    detail::require_dim(c, b.size(), "solve");
    const Index k = c.bandwidth();

    AnsatzSolution<Real> sol;
    sol.b = std::make_shared<const CVector<Real>>(b);
    sol.backend = std::string(backend.name());
    auto &diag = sol.diagnostics;
    diag.oracle_loss = mse_loss(c, fft_solve(c, b), b);
    const Real target = diag.oracle_loss + static_cast<Real>(opt.nu);

    ShiftOverlapTable<Real> table;
    auto finish = [&](Index t, detail::Attempt<Real> &&a) {
        sol.t = t;
        sol.alphas = std::move(a.result.alphas);
        diag.objective = a.result.objective;
        diag.rank = a.result.rank;
        diag.loss = a.loss;
        diag.accounting = table.accounting();
        diag.table = table;
    };

    if (opt.mode == TruncationMode::Fixed) {
        if (opt.t < k) {
            throw std::invalid_argument("truncation T = " + std::to_string(opt.t) +
                                        " is below the bandwidth K = " + std::to_string(k));
        }
        extend_table(table, backend, 2 * k + 2 * opt.t, cfg);
        auto a = detail::attempt(c, backend, table, opt.t, cfg, opt);
        diag.cap = opt.t;
        diag.steps.push_back({opt.t, a.loss, a.result.objective});
        diag.converged = a.loss <= target;
        finish(opt.t, std::move(a));
        return sol;
    }

    const double kappa = static_cast<double>(condition_number(c));
    Index cap = std::max(k, choose_truncation(k, kappa, opt.nu, opt.truncation_constant));
    cap = std::max(k, std::min(cap, c.dim() / 2));
    diag.cap = cap;

    Index t = k;
    std::optional<Real> previous;
    while (true) {
        extend_table(table, backend, 2 * k + 2 * t, cfg);
        auto a = detail::attempt(c, backend, table, t, cfg, opt);
        diag.steps.push_back({t, a.loss, a.result.objective});
        const Real loss = a.loss;
        const bool met = loss <= target;
        const bool plateau =
            previous && (*previous - loss) <= static_cast<Real>(opt.tol_plateau) * *previous;
        if (met || plateau || t >= cap) {
            diag.converged = met;
            finish(t, std::move(a));
            return sol;
        }
        previous = loss;
        t = std::min(t == 0 ? Index{1} : 2 * t, cap);
    }
}

} // namespace cqs
