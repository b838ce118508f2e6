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

#include <complex>
#include <cstdint>

#include <Eigen/Core>

namespace cqs {

using Index = Eigen::Index;

template <typename Real> using Complex = std::complex<Real>;

/// Dense complex column vector; the representation of b, x and quantum
/// amplitudes throughout the library.
template <typename Real>
using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// Non-negative residue of m modulo n (n > 0).
inline Index wrap_index(std::int64_t m, Index n) {
    const auto r = static_cast<Index>(m % static_cast<std::int64_t>(n));
    return r < 0 ? r + n : r;
}

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

inline int log2_exact(Index n) {
    int q = 0;
    while ((Index{1} << q) < n) {
        ++q;
    }
    return q;
}

/// Resource usage of an overlap estimation run.
struct Accounting {
    std::uint64_t samples = 0;
    std::uint64_t queries = 0;
    std::uint64_t shots = 0;

    Accounting &operator+=(const Accounting &o) {
        samples += o.samples;
        queries += o.queries;
        shots += o.shots;
        return *this;
    }
    friend bool operator==(const Accounting &, const Accounting &) = default;
};

} // namespace cqs
