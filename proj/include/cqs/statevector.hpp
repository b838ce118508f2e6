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
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "random.hpp"
#include "types.hpp"

namespace cqs {

/// Largest register the dense simulator accepts.
inline constexpr int kMaxQubits = 20;

/// Dense n-qubit statevector. Qubit 0 is the most significant bit of the
/// basis index; qubit n-1 is the least significant.
template <typename Real> class QuantumState {
  public:
    explicit QuantumState(int qubits) : qubits_(qubits) {
        check_qubits(qubits);
        amps_ = CVector<Real>::Zero(Index{1} << qubits);
        amps_[0] = Real(1);
    }

    QuantumState(int qubits, CVector<Real> amplitudes)
        : qubits_(qubits), amps_(std::move(amplitudes)) {
        check_qubits(qubits);
        if (amps_.size() != (Index{1} << qubits)) {
            throw std::invalid_argument("amplitude vector length must be 2^n");
        }
        if (std::abs(amps_.norm() - Real(1)) > Real(1e-10)) {
            throw std::invalid_argument("quantum state amplitudes must be normalized");
        }
    }

    /// Loads a normalized vector of length 2^n.
    static QuantumState from_amplitudes(const CVector<Real> &amplitudes) {
        if (!is_power_of_two(amplitudes.size())) {
            throw std::invalid_argument("state length " +
                                        std::to_string(amplitudes.size()) +
                                        " is not a power of two");
        }
        return QuantumState(log2_exact(amplitudes.size()), amplitudes);
    }

    int qubits() const { return qubits_; }
    Index dim() const { return amps_.size(); }
    const CVector<Real> &amplitudes() const { return amps_; }
    CVector<Real> &amplitudes() { return amps_; }

    /// Bit mask of qubit q inside a basis index.
    Index mask(int q) const {
        check_index(q);
        return Index{1} << (qubits_ - 1 - q);
    }

    void check_index(int q) const {
        if (q < 0 || q >= qubits_) {
            throw std::out_of_range("qubit " + std::to_string(q) + " outside [0, " +
                                    std::to_string(qubits_) + ")");
        }
    }

  private:
    static void check_qubits(int qubits) {
        if (qubits < 1 || qubits > kMaxQubits) {
            throw std::invalid_argument("qubit count must be in [1, " +
                                        std::to_string(kMaxQubits) + "]");
        }
    }

    int qubits_;
    CVector<Real> amps_;
};

template <typename Real> void apply_h(QuantumState<Real> &s, int q) {
    const Index bit = s.mask(q);
    const Real r = Real(1) / std::sqrt(Real(2));
    auto &a = s.amplitudes();
    for (Index i = 0; i < s.dim(); ++i) {
        if ((i & bit) == 0) {
            const auto a0 = a[i];
            const auto a1 = a[i | bit];
            a[i] = r * (a0 + a1);
            a[i | bit] = r * (a0 - a1);
        }
    }
}

/// P(theta) = diag(1, e^{i theta}).
template <typename Real> void apply_phase(QuantumState<Real> &s, int q, Real theta) {
    const Index bit = s.mask(q);
    const auto phase = std::polar(Real(1), theta);
    auto &a = s.amplitudes();
    for (Index i = 0; i < s.dim(); ++i) {
        if (i & bit) {
            a[i] *= phase;
        }
    }
}

template <typename Real>
void apply_cphase(QuantumState<Real> &s, int ctrl, int tgt, Real theta) {
    if (ctrl == tgt) {
        throw std::invalid_argument("controlled phase needs distinct qubits");
    }
    const Index both = s.mask(ctrl) | s.mask(tgt);
    const auto phase = std::polar(Real(1), theta);
    auto &a = s.amplitudes();
    for (Index i = 0; i < s.dim(); ++i) {
        if ((i & both) == both) {
            a[i] *= phase;
        }
    }
}

template <typename Real> void apply_swap(QuantumState<Real> &s, int qa, int qb) {
    const Index ba = s.mask(qa);
    const Index bb = s.mask(qb);
    if (ba == bb) {
        return;
    }
    auto &a = s.amplitudes();
    for (Index i = 0; i < s.dim(); ++i) {
        if ((i & ba) && !(i & bb)) {
            std::swap(a[i], a[(i & ~ba) | bb]);
        }
    }
}

namespace detail {
inline void check_register(int qubits, int first, int count) {
    if (count < 1 || first < 0 || first + count > qubits) {
        throw std::out_of_range("register [" + std::to_string(first) + ", " +
                                std::to_string(first + count) +
                                ") does not fit the state");
    }
}
} // namespace detail

/// QFT on the contiguous register [first, first+count): H and controlled
/// R_k ladders followed by the order-reversing swaps. Acts on the register
/// amplitudes as F_jk = omega^{jk} / sqrt(2^count).
template <typename Real>
void qft(QuantumState<Real> &s, int first, int count) {
    detail::check_register(s.qubits(), first, count);
    const Real pi = std::numbers::pi_v<Real>;
    for (int j = 0; j < count; ++j) {
        apply_h(s, first + j);
        for (int k = j + 1; k < count; ++k) {
            apply_cphase(s, first + k, first + j,
                         pi / static_cast<Real>(Index{1} << (k - j)));
        }
    }
    for (int j = 0; j < count / 2; ++j) {
        apply_swap(s, first + j, first + count - 1 - j);
    }
}

template <typename Real> void qft(QuantumState<Real> &s) { qft(s, 0, s.qubits()); }

/// Exact inverse of qft(): the same gates in reverse order with negated angles.
template <typename Real>
void inverse_qft(QuantumState<Real> &s, int first, int count) {
    detail::check_register(s.qubits(), first, count);
    const Real pi = std::numbers::pi_v<Real>;
    for (int j = count / 2 - 1; j >= 0; --j) {
        apply_swap(s, first + j, first + count - 1 - j);
    }
    for (int j = count - 1; j >= 0; --j) {
        for (int k = count - 1; k > j; --k) {
            apply_cphase(s, first + k, first + j,
                         -pi / static_cast<Real>(Index{1} << (k - j)));
        }
        apply_h(s, first + j);
    }
}

template <typename Real> void inverse_qft(QuantumState<Real> &s) {
    inverse_qft(s, 0, s.qubits());
}

/// Rotation angles of Lambda^m on an n-qubit register, indexed by bit weight:
/// angle j is 2 pi (2^j m mod N) / N. Reducing modulo N before scaling keeps
/// large powers exact.
template <typename Real>
std::vector<Real> phase_layer_angles(int n, std::int64_t power) {
    const Index dim = Index{1} << n;
    std::vector<Real> angles(static_cast<std::size_t>(n));
    const Index m = wrap_index(power, dim);
    for (int j = 0; j < n; ++j) {
        const Index turns = (m << j) % dim;
        angles[static_cast<std::size_t>(j)] =
            Real(2) * std::numbers::pi_v<Real> * static_cast<Real>(turns) /
            static_cast<Real>(dim);
    }
    return angles;
}

/// Lambda^m = diag(omega^{m y}) on register [first, first+count), as one
/// phase gate per qubit.
template <typename Real>
void apply_phase_layer(QuantumState<Real> &s, int first, int count, std::int64_t power) {
    detail::check_register(s.qubits(), first, count);
    const auto angles = phase_layer_angles<Real>(count, power);
    for (int j = 0; j < count; ++j) {
        // Bit weight 2^j lives on the (count-1-j)-th register qubit.
        apply_phase(s, first + count - 1 - j, angles[static_cast<std::size_t>(j)]);
    }
}

/// Controlled Lambda^m: the phase gates become controlled phases.
template <typename Real>
void apply_controlled_phase_layer(QuantumState<Real> &s, int ctrl, int first, int count,
                                  std::int64_t power) {
    detail::check_register(s.qubits(), first, count);
    const auto angles = phase_layer_angles<Real>(count, power);
    for (int j = 0; j < count; ++j) {
        apply_cphase(s, ctrl, first + count - 1 - j, angles[static_cast<std::size_t>(j)]);
    }
}

/// Q^m via Fourier conjugation of the phase layer: QFT, Lambda^m, inverse QFT.
/// The resulting amplitudes equal shift_apply(amplitudes, m).
template <typename Real> void apply_q_power(QuantumState<Real> &s, std::int64_t m) {
    qft(s);
    apply_phase_layer(s, 0, s.qubits(), m);
    inverse_qft(s);
}

enum class OverlapPart { Real, Imag };

struct HadamardTestResult {
    double p0 = 0;
    double p1 = 0;
    std::int64_t n0 = 0;
    std::int64_t n1 = 0;
};

/// Gate-level Hadamard test of Lambda^m on QFT|b>.
///
/// The ancilla is qubit 0 of an (n+1)-qubit state and the register holds |b>.
/// Circuit: QFT on the register, H on the ancilla, ancilla-controlled
/// Lambda^m, P(-pi/2) on the ancilla for the imaginary part, H, measurement.
/// With these gates p(0) = (1 + Re<b|Q^m|b>)/2 for the real part and
/// p(0) = (1 + Im<b|Q^m|b>)/2 for the imaginary part. Shots are drawn from
/// the exact ancilla distribution.
template <typename Real>
HadamardTestResult hadamard_test(const QuantumState<Real> &prep, std::int64_t m,
                                 OverlapPart part, std::int64_t shots, Rng &rng) {
    if (shots < 1) {
        throw std::invalid_argument("hadamard_test needs at least one shot");
    }
    const int n = prep.qubits();
    if (n + 1 > kMaxQubits) {
        throw std::invalid_argument("register too large for the ancilla-extended state");
    }
    CVector<Real> joint = CVector<Real>::Zero(Index{2} << n);
    joint.head(prep.dim()) = prep.amplitudes();
    QuantumState<Real> s(n + 1, std::move(joint));

    qft(s, 1, n);
    apply_h(s, 0);
    apply_controlled_phase_layer(s, 0, 1, n, m);
    if (part == OverlapPart::Imag) {
        apply_phase(s, 0, -std::numbers::pi_v<Real> / Real(2));
    }
    apply_h(s, 0);

    HadamardTestResult r;
    const auto p0 = static_cast<double>(s.amplitudes().head(prep.dim()).squaredNorm());
    r.p0 = std::clamp(p0, 0.0, 1.0);
    r.p1 = 1.0 - r.p0;
    r.n1 = rng.binomial(shots, r.p1);
    r.n0 = shots - r.n1;
    return r;
}

// State generators used by the experiments. Each returns a normalized vector
// of length 2^n.

template <typename Real> CVector<Real> basis_state(int n, Index k) {
    QuantumState<Real> s(n);
    if (k < 0 || k >= s.dim()) {
        throw std::out_of_range("basis index outside the register");
    }
    CVector<Real> v = CVector<Real>::Zero(s.dim());
    v[k] = Real(1);
    return v;
}

template <typename Real> CVector<Real> uniform_state(int n) {
    QuantumState<Real> s(n);
    return CVector<Real>::Constant(s.dim(), Real(1) / std::sqrt(static_cast<Real>(s.dim())));
}

/// (|0..0> + |1..1>) / sqrt 2.
template <typename Real> CVector<Real> ghz_state(int n) {
    QuantumState<Real> s(n);
    CVector<Real> v = CVector<Real>::Zero(s.dim());
    v[0] = v[s.dim() - 1] = Real(1) / std::sqrt(Real(2));
    return v;
}

/// sum_k k|k> / sqrt(sum_k k^2).
template <typename Real> CVector<Real> ramp_state(int n) {
    QuantumState<Real> s(n);
    CVector<Real> v(s.dim());
    for (Index k = 0; k < s.dim(); ++k) {
        v[k] = static_cast<Real>(k);
    }
    return v / v.norm();
}

/// Default rotation angles pi/2, pi/4, ..., pi/2^n.
template <typename Real> std::vector<Real> default_layer_angles(int n) {
    std::vector<Real> angles(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        angles[static_cast<std::size_t>(j)] =
            std::numbers::pi_v<Real> / static_cast<Real>(Index{1} << (j + 1));
    }
    return angles;
}

/// H on every qubit, then P(angles[j]) on qubit j.
template <typename Real>
CVector<Real> layered_rotation_state(int n, const std::vector<Real> &angles) {
    if (static_cast<int>(angles.size()) != n) {
        throw std::invalid_argument("need one rotation angle per qubit");
    }
    QuantumState<Real> s(n);
    for (int q = 0; q < n; ++q) {
        apply_h(s, q);
    }
    for (int q = 0; q < n; ++q) {
        apply_phase(s, q, angles[static_cast<std::size_t>(q)]);
    }
    return s.amplitudes();
}

template <typename Real> CVector<Real> layered_rotation_state(int n) {
    return layered_rotation_state<Real>(n, default_layer_angles<Real>(n));
}

} // namespace cqs
