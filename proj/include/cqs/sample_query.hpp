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
#include <vector>

#include "random.hpp"
#include "types.hpp"

namespace cqs {

/// Binary tree over |b_i|^2 granting O(log N) sample access (index k with
/// probability |b_k|^2 / ||b||^2) and query access (exact b_k).
///
/// Levels are stored flat: levels_[0] holds the padded leaf weights and
/// levels_.back() is the single root. Non-power-of-two sizes are padded with
/// zero-weight leaves, which the descent never selects.
template <typename Real> class SampleQueryStore {
  public:
    explicit SampleQueryStore(CVector<Real> values) : values_(std::move(values)) {
        const Index n = values_.size();
        if (n == 0) {
            throw std::invalid_argument("sample-query store needs a non-empty vector");
        }
        Index width = 1;
        while (width < n) {
            width *= 2;
        }
        std::vector<Real> leaves(static_cast<std::size_t>(width), Real(0));
        for (Index i = 0; i < n; ++i) {
            leaves[static_cast<std::size_t>(i)] = std::norm(values_[i]);
        }
        levels_.push_back(std::move(leaves));
        while (levels_.back().size() > 1) {
            const auto &below = levels_.back();
            std::vector<Real> above(below.size() / 2);
            for (std::size_t i = 0; i < above.size(); ++i) {
                above[i] = below[2 * i] + below[2 * i + 1];
            }
            levels_.push_back(std::move(above));
        }
        if (!(total() > 0)) {
            throw std::invalid_argument(
                "sample-query store of a zero vector has no sampling distribution");
        }
    }

    Index size() const { return values_.size(); }
    /// ||b||^2, the root of the tree.
    Real total() const { return levels_.back().front(); }
    int depth() const { return static_cast<int>(levels_.size()) - 1; }
    const std::vector<std::vector<Real>> &levels() const { return levels_; }

    Complex<Real> query(Index k) const {
        if (k < 0 || k >= size()) {
            throw std::out_of_range("query index " + std::to_string(k) +
                                    " outside [0, " + std::to_string(size()) + ")");
        }
        return values_[k];
    }

    /// One uniform draw, one root-to-leaf descent.
    Index sample(Rng &rng) const {
        Real u = static_cast<Real>(rng.uniform()) * total();
        std::size_t node = 0;
        for (int level = depth() - 1; level >= 0; --level) {
            const auto &row = levels_[static_cast<std::size_t>(level)];
            const Real left = row[2 * node];
            const Real right = row[2 * node + 1];
            // Rounding can leave u >= left with an empty right subtree.
            if ((u < left || right <= 0) && left > 0) {
                node = 2 * node;
            } else {
                u -= left;
                node = 2 * node + 1;
            }
        }
        return static_cast<Index>(node);
    }

    const CVector<Real> &values() const { return values_; }

  private:
    CVector<Real> values_;
    std::vector<std::vector<Real>> levels_;
};

/// Sample and query access to Q^m b through the store of b, in O(1) space.
template <typename Real> class ShiftedView {
  public:
    ShiftedView(const SampleQueryStore<Real> &base, std::int64_t offset)
        : base_(&base), offset_(offset) {}

    Index size() const { return base_->size(); }
    std::int64_t offset() const { return offset_; }

    Complex<Real> query(Index i) const {
        if (i < 0 || i >= size()) {
            throw std::out_of_range("query index " + std::to_string(i) +
                                    " outside [0, " + std::to_string(size()) + ")");
        }
        return base_->query(wrap_index(static_cast<std::int64_t>(i) - offset_, size()));
    }

    Index sample(Rng &rng) const {
        return wrap_index(static_cast<std::int64_t>(base_->sample(rng)) + offset_, size());
    }

  private:
    const SampleQueryStore<Real> *base_;
    std::int64_t offset_;
};

template <typename Real>
ShiftedView<Real> shifted(const SampleQueryStore<Real> &store, std::int64_t m) {
    return ShiftedView<Real>(store, m);
}

} // namespace cqs
