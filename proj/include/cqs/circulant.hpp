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
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "types.hpp"

namespace cqs {

/// Q^m v: output index i holds v[(i - m) mod N].
template <typename Derived>
auto shift_apply(const Eigen::MatrixBase<Derived> &v, std::int64_t m)
    -> Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> {
    const Index n = v.size();
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(n);
    if (n == 0) {
        return out;
    }
    const Index s = wrap_index(m, n);
    // Two block copies instead of per-element modular indexing.
    out.tail(n - s) = v.head(n - s);
    out.head(s) = v.tail(s);
    return out;
}

template <typename Real> bool is_normalized(const CVector<Real> &v, Real tol = Real(1e-12)) {
    return std::abs(v.norm() - Real(1)) <= tol;
}

/// K-banded circulant matrix C = sum_{l=-K}^{K} c_l Q^l.
///
/// Coefficients are held in shift order -K..K. The matrix itself is never
/// materialized by the library; callers that need a dense copy build one from
/// coeff().
template <typename Real> class BandedCirculant {
  public:
    using Scalar = Complex<Real>;

    BandedCirculant(Index dim, std::vector<Scalar> coeffs)
        : dim_(dim), coeffs_(std::move(coeffs)) {
        if (dim_ < 1) {
            throw std::invalid_argument("circulant dimension must be positive");
        }
        if (coeffs_.empty() || coeffs_.size() % 2 == 0) {
            throw std::invalid_argument(
                "coefficient list must have odd length 2K+1");
        }
        bandwidth_ = static_cast<Index>(coeffs_.size() / 2);
        if (2 * bandwidth_ + 1 > dim_) {
            throw std::invalid_argument("band 2K+1 = " +
                                        std::to_string(2 * bandwidth_ + 1) +
                                        " does not fit dimension " +
                                        std::to_string(dim_));
        }
        if (std::none_of(coeffs_.begin(), coeffs_.end(),
                         [](const Scalar &c) { return c != Scalar(0); })) {
            throw std::invalid_argument("all circulant coefficients are zero");
        }
    }

    static BandedCirculant identity(Index dim) {
        return BandedCirculant(dim, {Scalar(1)});
    }

    /// The cyclic permutation Q (c_1 = 1), K = 1.
    static BandedCirculant cyclic_shift(Index dim) {
        return BandedCirculant(dim, {Scalar(0), Scalar(0), Scalar(1)});
    }

    Index dim() const { return dim_; }
    Index bandwidth() const { return bandwidth_; }

    /// c_l for l in [-K, K]; zero outside the band.
    Scalar coeff(Index l) const {
        if (l < -bandwidth_ || l > bandwidth_) {
            return Scalar(0);
        }
        return coeffs_[static_cast<std::size_t>(l + bandwidth_)];
    }
    const std::vector<Scalar> &coeffs() const { return coeffs_; }

    /// Sum of coefficient magnitudes (B in the measurement budget).
    Real coeff_l1_norm() const {
        Real s = 0;
        for (const auto &c : coeffs_) {
            s += std::abs(c);
        }
        return s;
    }

    BandedCirculant scaled(Scalar s) const {
        auto c = coeffs_;
        for (auto &x : c) {
            x *= s;
        }
        return BandedCirculant(dim_, std::move(c));
    }

  private:
    Index dim_;
    Index bandwidth_ = 0;
    std::vector<Scalar> coeffs_;
};

namespace detail {
template <typename Real>
void require_dim(const BandedCirculant<Real> &c, Index n, const char *what) {
    if (n != c.dim()) {
        throw std::invalid_argument(std::string(what) + ": vector length " +
                                    std::to_string(n) +
                                    " does not match circulant dimension " +
                                    std::to_string(c.dim()));
    }
}
} // namespace detail

/// C v in O((2K+1) N).
template <typename Real>
CVector<Real> apply(const BandedCirculant<Real> &c, const CVector<Real> &v) {
    detail::require_dim(c, v.size(), "apply");
    CVector<Real> out = CVector<Real>::Zero(v.size());
    for (Index l = -c.bandwidth(); l <= c.bandwidth(); ++l) {
        const auto cl = c.coeff(l);
        if (cl != Complex<Real>(0)) {
            out += cl * shift_apply(v, l);
        }
    }
    return out;
}

/// lambda_k = sum_l c_l omega^{k l}, omega = exp(2 pi i / N), by one FFT of
/// the zero-padded coefficient sequence.
template <typename Real>
CVector<Real> eigenvalues(const BandedCirculant<Real> &c) {
    const Index n = c.dim();
    std::vector<Complex<Real>> padded(static_cast<std::size_t>(n), Complex<Real>(0));
    for (Index l = -c.bandwidth(); l <= c.bandwidth(); ++l) {
        padded[static_cast<std::size_t>(wrap_index(l, n))] += c.coeff(l);
    }
    // The positive-exponent transform is Eigen's inverse FFT.
    Eigen::FFT<Real> fft;
    fft.SetFlag(Eigen::FFT<Real>::Unscaled);
    std::vector<Complex<Real>> spectrum;
    fft.inv(spectrum, padded);
    return Eigen::Map<CVector<Real>>(spectrum.data(), n);
}

/// Relative magnitude below which an eigenvalue counts as zero.
template <typename Real> constexpr Real spectral_cutoff() { return Real(1e-12); }

/// max|lambda| / min nonzero |lambda| (circulants are normal, so these are the
/// singular values).
template <typename Real> Real condition_number(const BandedCirculant<Real> &c) {
    const RVector<Real> mags = eigenvalues(c).cwiseAbs();
    const Real top = mags.maxCoeff();
    if (!(top > 0)) {
        throw std::domain_error("circulant spectrum is identically zero");
    }
    Real bottom = top;
    for (Index k = 0; k < mags.size(); ++k) {
        if (mags[k] > spectral_cutoff<Real>() * top) {
            bottom = std::min(bottom, mags[k]);
        }
    }
    return top / bottom;
}

/// Least-squares (pseudoinverse) solution F^{-1} diag(lambda^+) F b.
template <typename Real>
CVector<Real> fft_solve(const BandedCirculant<Real> &c, const CVector<Real> &b) {
    detail::require_dim(c, b.size(), "fft_solve");
    const Index n = c.dim();
    const CVector<Real> lambda = eigenvalues(c);
    const Real top = lambda.cwiseAbs().maxCoeff();

    // With F_jk = omega^{jk}/sqrt(N): F b = sqrt(N) * ifft(b) and
    // F^{-1} y = fft(y)/sqrt(N), so the sqrt(N) factors cancel.
    Eigen::FFT<Real> fft;
    std::vector<Complex<Real>> in(b.data(), b.data() + n), freq, out;
    fft.inv(freq, in);
    for (Index k = 0; k < n; ++k) {
        const auto lk = lambda[k];
        freq[static_cast<std::size_t>(k)] =
            std::abs(lk) > spectral_cutoff<Real>() * top
                ? freq[static_cast<std::size_t>(k)] / lk
                : Complex<Real>(0);
    }
    fft.fwd(out, freq);
    return Eigen::Map<CVector<Real>>(out.data(), n);
}

/// ||C x - b||^2.
template <typename Real>
Real mse_loss(const BandedCirculant<Real> &c, const CVector<Real> &x,
              const CVector<Real> &b) {
    detail::require_dim(c, x.size(), "mse_loss");
    detail::require_dim(c, b.size(), "mse_loss");
    return (apply(c, x) - b).squaredNorm();
}

using BandedCirculantd = BandedCirculant<double>;

} // namespace cqs
