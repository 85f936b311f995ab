#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "affswor/numeric.hpp"

namespace affswor {

/// A probability vector over a population of N >= 3 labeled individuals.
/// S is either Rational (exact mode) or double (float mode, normalization
/// checked to 1e-12 and nonnegativity to 1e-10 with clamping).
template <class S>
class ProbabilityVector {
public:
    explicit ProbabilityVector(std::vector<S> weights) : w_(std::move(weights)) {
        if (w_.size() < 3) throw std::domain_error("ProbabilityVector: population size must be at least 3");
        S sum{0};
        for (auto& wi : w_) {
            wi = ScalarTraits<S>::clamp_probability(wi);
            if (!ScalarTraits<S>::is_nonnegative(wi))
                throw std::domain_error("ProbabilityVector: negative weight");
            sum += wi;
        }
        if (!ScalarTraits<S>::is_one(sum))
            throw std::domain_error("ProbabilityVector: weights do not sum to 1");
    }

    static ProbabilityVector uniform(int n_pop) {
        return ProbabilityVector(std::vector<S>(static_cast<std::size_t>(n_pop), frac<S>(1, n_pop)));
    }

    int size() const { return static_cast<int>(w_.size()); }
    const S& operator[](int i) const { return w_[static_cast<std::size_t>(i)]; }
    const std::vector<S>& weights() const { return w_; }

    /// Sum of the k smallest entries. Ties broken by label; only the sum is
    /// observable, so the tie rule does not affect results.
    S sum_of_smallest(int k) const {
        std::vector<int> idx(w_.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return w_[static_cast<std::size_t>(a)] < w_[static_cast<std::size_t>(b)]; });
        S s{0};
        for (int i = 0; i < k; ++i) s += w_[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        return s;
    }

    /// Labels (0-based) of the k smallest entries under the same tie rule.
    std::vector<int> smallest_labels(int k) const {
        std::vector<int> idx(w_.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return w_[static_cast<std::size_t>(a)] < w_[static_cast<std::size_t>(b)]; });
        idx.resize(static_cast<std::size_t>(k));
        std::sort(idx.begin(), idx.end());
        return idx;
    }

    bool all_positive() const {
        return std::all_of(w_.begin(), w_.end(), [](const S& x) { return x > S{0}; });
    }

    ProbabilityVector<double> to_float() const {
        std::vector<double> v;
        v.reserve(w_.size());
        for (const auto& wi : w_) v.push_back(to_double(wi));
        return ProbabilityVector<double>(std::move(v));
    }

private:
    std::vector<S> w_;
};

}  // namespace affswor
