#pragma once

#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "affswor/coeffs.hpp"
#include "affswor/probability.hpp"

namespace affswor {

/// Result of the feasibility test: does the sum of the n smallest weights
/// reach (n-1)/(N-1)?  margin = sum - threshold, reported for diagnostics
/// (zero means p sits exactly on the corresponding facet).
template <class S>
struct ExistenceCheck {
    bool feasible = false;
    S margin{};
    std::vector<int> min_subset;  // labels of the n smallest entries, 0-based
};

template <class S>
ExistenceCheck<S> existence_check(const ProbabilityVector<S>& p, int n_sample) {
    const int n_pop = p.size();
    if (n_sample < 2 || n_sample >= n_pop)
        throw std::domain_error("existence_check: sample size must satisfy 2 <= n < N");
    ExistenceCheck<S> r;
    r.min_subset = p.smallest_labels(n_sample);
    // float mode forgives rounding noise just below the facet, same as every
    // other probability output
    r.margin = ScalarTraits<S>::clamp_probability(p.sum_of_smallest(n_sample) -
                                                  frac<S>(n_sample - 1, n_pop - 1));
    r.feasible = r.margin >= S{0};
    return r;
}

class InfeasibleDesign : public std::domain_error {
public:
    InfeasibleDesign(std::string msg, std::vector<int> subset)
        : std::domain_error(std::move(msg)), violating_subset(std::move(subset)) {}
    std::vector<int> violating_subset;  // 0-based labels whose sum is below threshold
};

/// The affine sampling-without-replacement distribution for (p, n): on any
/// tuple of n distinct labels the joint pmf is A_{N,n} + B_{N,n} * (sum of
/// the selected weights), and 0 on tuples with a repeat. Exists exactly when
/// the n smallest weights sum to at least (n-1)/(N-1).
///
/// Immutable after construction; all queries are const and thread-safe.
template <class S>
class AffineDesign {
public:
    AffineDesign(ProbabilityVector<S> p, int n_sample)
        : p_(std::move(p)), n_(n_sample), coeffs_(coeff_pair(p_.size(), n_sample)) {
        auto chk = existence_check(p_, n_);
        if (!chk.feasible) {
            std::ostringstream os;
            os << "AffineDesign: infeasible for n=" << n_ << ": the " << n_
               << " smallest weights (labels";
            for (int i : chk.min_subset) os << ' ' << (i + 1);
            os << ") sum to less than (n-1)/(N-1)";
            throw InfeasibleDesign(os.str(), chk.min_subset);
        }
        a_ = ScalarTraits<S>::from_rational(coeffs_.a);
        b_ = ScalarTraits<S>::from_rational(coeffs_.b);
    }

    const ProbabilityVector<S>& p() const { return p_; }
    int n_pop() const { return p_.size(); }
    int n_sample() const { return n_; }
    const CoeffPair& coeffs() const { return coeffs_; }

    /// Joint pmf of (I_1,...,I_n) on an ordered tuple of 0-based labels.
    S joint_pmf(std::span<const int> labels) const {
        if (static_cast<int>(labels.size()) != n_)
            throw std::invalid_argument("joint_pmf: tuple length must equal the sample size");
        check_labels(labels);
        if (has_repeat(labels)) return S{0};
        S sum{0};
        for (int u : labels) sum += p_[u];
        return ScalarTraits<S>::clamp_probability(a_ + b_ * sum);
    }

    /// delta_uv = P[I_i = u, I_j = v], the common bivariate marginal. By the
    /// k-marginal property this uses the (N,2) coefficients whatever n is.
    S bivariate_marginal(int u, int v) const {
        const int lbl[2] = {u, v};
        check_labels(lbl);
        if (u == v) return S{0};
        const CoeffPair c2 = coeff_pair(n_pop(), 2);
        return ScalarTraits<S>::clamp_probability(ScalarTraits<S>::from_rational(c2.a) +
                                                  ScalarTraits<S>::from_rational(c2.b) * (p_[u] + p_[v]));
    }

    /// k-dimensional marginal on an ordered tuple of k distinct labels,
    /// 1 <= k <= n. Closed form A_{N,k} + B_{N,k} * sum; for k = 1 the
    /// formulas degenerate to A = 0, B = 1, i.e. the marginal is p_u.
    S k_marginal(int k, std::span<const int> labels) const {
        if (k < 1 || k > n_) throw std::domain_error("k_marginal: k must satisfy 1 <= k <= n");
        if (static_cast<int>(labels.size()) != k)
            throw std::invalid_argument("k_marginal: tuple length must equal k");
        check_labels(labels);
        if (has_repeat(labels)) return S{0};
        S sum{0};
        for (int u : labels) sum += p_[u];
        if (k == 1) return sum;
        const CoeffPair ck = coeff_pair(n_pop(), k);
        return ScalarTraits<S>::clamp_probability(ScalarTraits<S>::from_rational(ck.a) +
                                                  ScalarTraits<S>::from_rational(ck.b) * sum);
    }

    /// Weight Q(F) = A~ + B~ * sum_{i in F} p_i of an unordered size-n subset.
    struct SubsetWeight {
        std::vector<int> subset;  // sorted 0-based labels
        S q;
    };

    /// All C(N,n) subset weights in lexicographic subset order. Satisfies
    /// (a) q >= 0, (b) sum q = 1, (c) sum over subsets containing i = n p_i.
    std::vector<SubsetWeight> subset_weights() const {
        const S at = ScalarTraits<S>::from_rational(coeffs_.a_tilde);
        const S bt = ScalarTraits<S>::from_rational(coeffs_.b_tilde);
        std::vector<SubsetWeight> out;
        std::vector<int> comb(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) comb[static_cast<std::size_t>(i)] = i;
        const int N = n_pop();
        while (true) {
            S sum{0};
            for (int u : comb) sum += p_[u];
            out.push_back({comb, ScalarTraits<S>::clamp_probability(at + bt * sum)});
            // next combination
            int i = n_ - 1;
            while (i >= 0 && comb[static_cast<std::size_t>(i)] == N - n_ + i) --i;
            if (i < 0) break;
            ++comb[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < n_; ++j)
                comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
        }
        return out;
    }

    /// Number of ordered tuples in the support universe, N(N-1)...(N-n+1).
    std::uint64_t support_size() const {
        std::uint64_t s = 1;
        for (int i = 0; i < n_; ++i) s *= static_cast<std::uint64_t>(n_pop() - i);
        return s;
    }

    /// Visits every ordered tuple of distinct labels with its pmf value.
    /// Exhaustive-enumeration oracle for small N; refuses to run past `cap`
    /// tuples (default 1e7).
    template <class F>
    void for_each_support(F&& fn, std::uint64_t cap = 10'000'000) const {
        if (support_size() > cap)
            throw std::length_error("for_each_support: support larger than the enumeration cap");
        std::vector<int> tuple(static_cast<std::size_t>(n_));
        std::vector<char> used(static_cast<std::size_t>(n_pop()), 0);
        enumerate_rec(0, tuple, used, fn);
    }

private:
    template <class F>
    void enumerate_rec(int depth, std::vector<int>& tuple, std::vector<char>& used, F& fn) const {
        if (depth == n_) {
            fn(std::span<const int>(tuple), joint_pmf(tuple));
            return;
        }
        for (int u = 0; u < n_pop(); ++u) {
            if (used[static_cast<std::size_t>(u)]) continue;
            used[static_cast<std::size_t>(u)] = 1;
            tuple[static_cast<std::size_t>(depth)] = u;
            enumerate_rec(depth + 1, tuple, used, fn);
            used[static_cast<std::size_t>(u)] = 0;
        }
    }

    void check_labels(std::span<const int> labels) const {
        for (int u : labels)
            if (u < 0 || u >= n_pop()) throw std::out_of_range("label out of range");
    }

    static bool has_repeat(std::span<const int> labels) {
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = i + 1; j < labels.size(); ++j)
                if (labels[i] == labels[j]) return true;
        return false;
    }

    ProbabilityVector<S> p_;
    int n_;
    CoeffPair coeffs_;
    S a_{}, b_{};
};

}  // namespace affswor
