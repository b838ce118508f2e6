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

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "circulant.hpp"
#include "random.hpp"
#include "sample_query.hpp"
#include "types.hpp"

namespace cqs {

struct EstimatorConfig {
    /// Additive error target per overlap (sample-and-query backend).
    double epsilon = 0.05;
    /// Failure probability (sample-and-query backend).
    double delta = 0.1;
    /// Shots per Hadamard-test circuit; real and imaginary parts each get this many.
    std::int64_t shots = 60000;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(epsilon > 0.0 && epsilon <= 1.0)) {
            throw std::invalid_argument("epsilon must lie in (0, 1]");
        }
        if (!(delta > 0.0 && delta < 1.0)) {
            throw std::invalid_argument("delta must lie in (0, 1)");
        }
        if (shots < 1) {
            throw std::invalid_argument("shots must be at least 1");
        }
    }

    /// Median-of-means repetitions, ceil(6 ln(2/delta)).
    std::int64_t outer_repetitions() const {
        return static_cast<std::int64_t>(std::ceil(6.0 * std::log(2.0 / delta)));
    }
    /// Samples averaged per repetition, ceil(9 / epsilon^2).
    std::int64_t inner_samples() const {
        return static_cast<std::int64_t>(std::ceil(9.0 / (epsilon * epsilon)));
    }
};

enum class BackendKind { Exact, Hadamard, SampleQuery };

inline std::string_view backend_name(BackendKind k) {
    switch (k) {
    case BackendKind::Exact:
        return "exact";
    case BackendKind::Hadamard:
        return "hadamard";
    case BackendKind::SampleQuery:
        return "sq";
    }
    return "?";
}

inline BackendKind parse_backend(std::string_view name) {
    if (name == "exact") {
        return BackendKind::Exact;
    }
    if (name == "hadamard") {
        return BackendKind::Hadamard;
    }
    if (name == "sq") {
        return BackendKind::SampleQuery;
    }
    throw std::invalid_argument("unknown backend '" + std::string(name) +
                                "' (expected exact, hadamard or sq)");
}

namespace detail {
template <typename Real> void require_normalized(const CVector<Real> &b) {
    if (!is_normalized(b)) {
        throw std::invalid_argument("overlap estimation needs a normalized vector");
    }
}

/// Median of a non-empty range; mean of the two middle elements when even.
template <typename Real> Real median(std::vector<Real> xs) {
    const std::size_t mid = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
    const Real hi = xs[mid];
    if (xs.size() % 2 == 1) {
        return hi;
    }
    const Real lo = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lo + hi) / Real(2);
}
} // namespace detail

/// <b, Q^m b> = sum_i conj(b_i) b_{(i-m) mod N}.
template <typename Real>
Complex<Real> estimate_overlap_exact(const CVector<Real> &b, std::int64_t m) {
    return b.dot(shift_apply(b, m));
}

/// Median-of-means estimate of <b, Q^m b> from sample and query access.
///
/// Each of ceil(6 ln(2/delta)) repetitions averages ceil(9/eps^2) ratios
/// b_{(s-m) mod N} / b_s with s drawn by sample access; real and imaginary
/// parts take their medians independently.
template <typename Real>
Complex<Real> estimate_overlap_sq(const SampleQueryStore<Real> &store, std::int64_t m,
                                  const EstimatorConfig &cfg, Rng &rng,
                                  Accounting *acct = nullptr) {
    cfg.validate();
    const auto outer = cfg.outer_repetitions();
    const auto inner = cfg.inner_samples();
    const auto view = shifted(store, m);
    std::vector<Real> re(static_cast<std::size_t>(outer)), im(static_cast<std::size_t>(outer));
    for (std::int64_t i = 0; i < outer; ++i) {
        Complex<Real> acc(0);
        for (std::int64_t j = 0; j < inner; ++j) {
            const Index s = store.sample(rng);
            const Complex<Real> num = view.query(s);
            const Complex<Real> den = store.query(s);
            acc += num == den ? Complex<Real>(1) : num * std::conj(den) / std::norm(den);
        }
        acc /= static_cast<Real>(inner);
        re[static_cast<std::size_t>(i)] = acc.real();
        im[static_cast<std::size_t>(i)] = acc.imag();
    }
    if (acct != nullptr) {
        acct->samples += static_cast<std::uint64_t>(outer * inner);
        acct->queries += static_cast<std::uint64_t>(2 * outer * inner);
    }
    return {detail::median(std::move(re)), detail::median(std::move(im))};
}

/// Signs mapping (n0 - n1)/shots to Re and Im of <b|Q^m|b>, fixed by
/// calibration against the gate-level circuit in statevector.hpp (the
/// imaginary circuit applies P(-pi/2) to the ancilla).
inline constexpr int kHadamardRealSign = +1;
inline constexpr int kHadamardImagSign = +1;

/// |QFT b|^2: the measurement weights of the Fourier-transformed register.
template <typename Real> RVector<Real> fourier_weights(const CVector<Real> &b) {
    const Index n = b.size();
    if (!is_power_of_two(n)) {
        throw std::invalid_argument(
            "the hadamard backend needs N to be a power of two (got N = " + std::to_string(n) +
            "); use the exact or sq backend for other sizes");
    }
    Eigen::FFT<Real> fft;
    std::vector<Complex<Real>> in(b.data(), b.data() + n), out;
    fft.inv(out, in);
    RVector<Real> w(n);
    // ifft carries 1/N; |F b|^2 = N |ifft(b)|^2.
    for (Index y = 0; y < n; ++y) {
        w[y] = static_cast<Real>(n) * std::norm(out[static_cast<std::size_t>(y)]);
    }
    return w;
}

/// <psi|Lambda^m|psi> for psi = QFT b, from the Fourier weights.
template <typename Real>
Complex<Real> diagonal_expectation(const RVector<Real> &weights, std::int64_t m) {
    const Index n = weights.size();
    const Index mm = wrap_index(m, n);
    Complex<Real> acc(0);
    for (Index y = 0; y < n; ++y) {
        const Index turns = static_cast<Index>((static_cast<std::int64_t>(mm) * y) % n);
        acc += weights[y] * std::polar(Real(1), Real(2) * std::numbers::pi_v<Real> *
                                                    static_cast<Real>(turns) /
                                                    static_cast<Real>(n));
    }
    return acc;
}

/// Exact ancilla-0 probabilities of the real- and imaginary-part circuits.
struct AncillaProbabilities {
    double real_p0;
    double imag_p0;
};

template <typename Real>
AncillaProbabilities hadamard_probabilities(const RVector<Real> &weights, std::int64_t m) {
    const auto e = diagonal_expectation(weights, m);
    const auto clip = [](double p) { return std::clamp(p, 0.0, 1.0); };
    return {clip((1.0 + kHadamardRealSign * static_cast<double>(e.real())) / 2.0),
            clip((1.0 + kHadamardImagSign * static_cast<double>(e.imag())) / 2.0)};
}

/// Shot-noise estimate from precomputed Fourier weights: one binomial draw per
/// part, shots each.
template <typename Real>
Complex<Real> sample_hadamard_estimate(const RVector<Real> &weights, std::int64_t m,
                                       const EstimatorConfig &cfg, Rng &rng,
                                       Accounting *acct = nullptr) {
    cfg.validate();
    const auto p = hadamard_probabilities(weights, m);
    const auto shots = cfg.shots;
    const auto n0_re = shots - rng.binomial(shots, 1.0 - p.real_p0);
    const auto n0_im = shots - rng.binomial(shots, 1.0 - p.imag_p0);
    const auto scale = Real(1) / static_cast<Real>(shots);
    if (acct != nullptr) {
        acct->shots += static_cast<std::uint64_t>(2 * shots);
    }
    return {kHadamardRealSign * static_cast<Real>(2 * n0_re - shots) * scale,
            kHadamardImagSign * static_cast<Real>(2 * n0_im - shots) * scale};
}

/// Probability-level simulation of the real and imaginary Hadamard tests of
/// Lambda^m on QFT|b>.
template <typename Real>
Complex<Real> estimate_overlap_hadamard(const CVector<Real> &b, std::int64_t m,
                                        const EstimatorConfig &cfg, Rng &rng,
                                        Accounting *acct = nullptr) {
    detail::require_normalized(b);
    return sample_hadamard_estimate(fourier_weights(b), m, cfg, rng, acct);
}

/// Source of shift overlaps <b, Q^m b> for one fixed b.
template <typename Real> class OverlapBackend {
  public:
    explicit OverlapBackend(CVector<Real> b) : b_(std::move(b)) {
        detail::require_normalized(b_);
    }
    virtual ~OverlapBackend() = default;
    OverlapBackend(const OverlapBackend &) = delete;
    OverlapBackend &operator=(const OverlapBackend &) = delete;

    virtual BackendKind kind() const = 0;
    virtual Complex<Real> estimate(std::int64_t m, const EstimatorConfig &cfg, Rng &rng,
                                   Accounting &acct) const = 0;
    /// Bound on the standard deviation of one complex estimate (0 if exact).
    virtual Real noise_scale(const EstimatorConfig &cfg) const = 0;

    std::string_view name() const { return backend_name(kind()); }
    const CVector<Real> &vector() const { return b_; }
    Index dim() const { return b_.size(); }

  private:
    CVector<Real> b_;
};

template <typename Real> class ExactBackend final : public OverlapBackend<Real> {
  public:
    using OverlapBackend<Real>::OverlapBackend;
    BackendKind kind() const override { return BackendKind::Exact; }
    Complex<Real> estimate(std::int64_t m, const EstimatorConfig &, Rng &,
                           Accounting &) const override {
        return estimate_overlap_exact(this->vector(), m);
    }
    Real noise_scale(const EstimatorConfig &) const override { return 0; }
};

template <typename Real> class HadamardBackend final : public OverlapBackend<Real> {
  public:
    explicit HadamardBackend(CVector<Real> b)
        : OverlapBackend<Real>(std::move(b)), weights_(fourier_weights(this->vector())) {}
    BackendKind kind() const override { return BackendKind::Hadamard; }
    Complex<Real> estimate(std::int64_t m, const EstimatorConfig &cfg, Rng &rng,
                           Accounting &acct) const override {
        return sample_hadamard_estimate(weights_, m, cfg, rng, &acct);
    }
    Real noise_scale(const EstimatorConfig &cfg) const override {
        return std::sqrt(Real(2) / static_cast<Real>(cfg.shots));
    }
    const RVector<Real> &weights() const { return weights_; }

  private:
    RVector<Real> weights_;
};

template <typename Real> class SampleQueryBackend final : public OverlapBackend<Real> {
  public:
    explicit SampleQueryBackend(CVector<Real> b)
        : OverlapBackend<Real>(std::move(b)), store_(this->vector()) {}
    BackendKind kind() const override { return BackendKind::SampleQuery; }
    Complex<Real> estimate(std::int64_t m, const EstimatorConfig &cfg, Rng &rng,
                           Accounting &acct) const override {
        return estimate_overlap_sq(store_, m, cfg, rng, &acct);
    }
    /// Each repetition mean has variance at most eps^2/9 for normalized b.
    Real noise_scale(const EstimatorConfig &cfg) const override {
        return static_cast<Real>(cfg.epsilon) / Real(3);
    }
    const SampleQueryStore<Real> &store() const { return store_; }

  private:
    SampleQueryStore<Real> store_;
};

template <typename Real>
std::unique_ptr<OverlapBackend<Real>> make_backend(BackendKind kind, CVector<Real> b) {
    switch (kind) {
    case BackendKind::Exact:
        return std::make_unique<ExactBackend<Real>>(std::move(b));
    case BackendKind::Hadamard:
        return std::make_unique<HadamardBackend<Real>>(std::move(b));
    case BackendKind::SampleQuery:
        return std::make_unique<SampleQueryBackend<Real>>(std::move(b));
    }
    throw std::invalid_argument("unknown backend kind");
}

/// Estimates e_m = <b, Q^m b> for m in [0, max_shift]; e_0 = 1 is pinned and
/// negative shifts are served as conj(e_{|m|}).
template <typename Real> class ShiftOverlapTable {
  public:
    ShiftOverlapTable() : values_(1, Complex<Real>(1)), per_shift_(1) {}

    std::int64_t max_shift() const { return static_cast<std::int64_t>(values_.size()) - 1; }

    Complex<Real> at(std::int64_t m) const {
        const std::int64_t a = m < 0 ? -m : m;
        if (a > max_shift()) {
            throw std::out_of_range("shift " + std::to_string(m) +
                                    " outside the overlap table range +-" +
                                    std::to_string(max_shift()));
        }
        const auto v = values_[static_cast<std::size_t>(a)];
        return m < 0 ? std::conj(v) : v;
    }

    const std::vector<Complex<Real>> &values() const { return values_; }
    const Accounting &accounting() const { return total_; }
    const Accounting &accounting(std::int64_t m) const {
        return per_shift_.at(static_cast<std::size_t>(m));
    }

    void push(Complex<Real> value, const Accounting &used) {
        values_.push_back(value);
        per_shift_.push_back(used);
        total_ += used;
    }

  private:
    std::vector<Complex<Real>> values_;
    std::vector<Accounting> per_shift_;
    Accounting total_;
};

/// Grows the table to max_shift. Shift m draws from its own stream
/// Rng(cfg.seed, m), so a table is identical however it was grown.
template <typename Real>
void extend_table(ShiftOverlapTable<Real> &table, const OverlapBackend<Real> &backend,
                  std::int64_t max_shift, const EstimatorConfig &cfg) {
    cfg.validate();
    for (std::int64_t m = table.max_shift() + 1; m <= max_shift; ++m) {
        Rng rng(cfg.seed, static_cast<std::uint64_t>(m));
        Accounting used;
        const auto e = backend.estimate(m, cfg, rng, used);
        table.push(e, used);
    }
}

/// All overlaps needed for bandwidth K and truncation T: shifts 0..2K+2T.
template <typename Real>
ShiftOverlapTable<Real> fill_table(const OverlapBackend<Real> &backend, Index K, Index T,
                                   const EstimatorConfig &cfg) {
    if (K < 0 || T < K) {
        throw std::invalid_argument("fill_table needs T >= K >= 0");
    }
    ShiftOverlapTable<Real> table;
    extend_table(table, backend, 2 * K + 2 * T, cfg);
    return table;
}

} // namespace cqs
