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

#include <stdexcept>
#include <string>
#include <string_view>

#include "circulant.hpp"
#include "statevector.hpp"

namespace cqs {

/// Periodic 1-D heat stencil C = (-2 - xi) I + Q + Q^{-1}.
template <typename Real> BandedCirculant<Real> heat_matrix(Index n, Real xi) {
    if (n < 3) {
        throw std::invalid_argument("heat matrix needs N >= 3");
    }
    if (!(xi > 0)) {
        throw std::invalid_argument("grid parameter xi must be positive");
    }
    return BandedCirculant<Real>(n, {Complex<Real>(1), Complex<Real>(-2 - xi), Complex<Real>(1)});
}

/// Condition number (xi + 4) / xi of the heat matrix for even N.
template <typename Real> Real heat_kappa(Real xi) {
    if (!(xi > 0)) {
        throw std::invalid_argument("grid parameter xi must be positive");
    }
    return (xi + 4) / xi;
}

enum class VectorKind { Zero, Ghz, Ramp, Layered };

inline VectorKind parse_vector_kind(std::string_view name) {
    if (name == "zero") {
        return VectorKind::Zero;
    }
    if (name == "ghz") {
        return VectorKind::Ghz;
    }
    if (name == "ramp") {
        return VectorKind::Ramp;
    }
    if (name == "layered") {
        return VectorKind::Layered;
    }
    throw std::invalid_argument("unknown vector kind '" + std::string(name) +
                                "' (expected zero, ghz, ramp or layered)");
}

inline std::string_view vector_kind_name(VectorKind k) {
    switch (k) {
    case VectorKind::Zero:
        return "zero";
    case VectorKind::Ghz:
        return "ghz";
    case VectorKind::Ramp:
        return "ramp";
    case VectorKind::Layered:
        return "layered";
    }
    return "?";
}

/// Right-hand sides of the heat experiments, on n qubits (N = 2^n).
template <typename Real> CVector<Real> experiment_b(VectorKind kind, int n) {
    switch (kind) {
    case VectorKind::Zero:
        return basis_state<Real>(n, 0);
    case VectorKind::Ghz:
        return ghz_state<Real>(n);
    case VectorKind::Ramp:
        return ramp_state<Real>(n);
    case VectorKind::Layered:
        return layered_rotation_state<Real>(n);
    }
    throw std::invalid_argument("unknown vector kind");
}

template <typename Real> CVector<Real> experiment_b(std::string_view kind, int n) {
    return experiment_b<Real>(parse_vector_kind(kind), n);
}

} // namespace cqs
