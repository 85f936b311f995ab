#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "affswor/design.hpp"
#include "affswor/probability.hpp"
#include "affswor/spectral.hpp"

namespace affswor {

/// Attribute values paired with the selection probabilities they were
/// sampled under.
template <class S>
struct PopulationValues {
    ProbabilityVector<S> p;
    std::vector<double> x;

    PopulationValues(ProbabilityVector<S> probs, std::vector<double> values)
        : p(std::move(probs)), x(std::move(values)) {
        if (static_cast<int>(x.size()) != p.size())
            throw std::invalid_argument("PopulationValues: x length must match the population size");
        for (double xi : x)
            if (!std::isfinite(xi)) throw std::domain_error("PopulationValues: non-finite attribute value");
    }
};

/// Horvitz-Thompson estimate (1/n) sum x_{I_i} / (N p_{I_i}) for one realized
/// sample of 0-based labels.
template <class S>
double ht_estimate(const PopulationValues<S>& pv, std::span<const int> sample) {
    const int N = pv.p.size();
    double acc = 0.0;
    for (int u : sample) {
        if (u < 0 || u >= N) throw std::out_of_range("ht_estimate: label out of range");
        const double pu = to_double(pv.p[u]);
        if (pu <= 0.0) throw std::domain_error("ht_estimate: sampled a zero-probability label");
        acc += pv.x[static_cast<std::size_t>(u)] / (N * pu);
    }
    return acc / static_cast<double>(sample.size());
}

/// Variance of the HT estimator when the n draws are iid from p: the
/// covariance term vanishes, leaving Var(x_I/(N p_I)) / n.
template <class S>
double variance_with_replacement(const PopulationValues<S>& pv, int n_sample) {
    if (n_sample < 1) throw std::domain_error("variance_with_replacement: n must be positive");
    const int N = pv.p.size();
    long double m1 = 0.0L, m2 = 0.0L;
    for (int i = 0; i < N; ++i) {
        const double pi = to_double(pv.p[i]);
        const double xi = pv.x[static_cast<std::size_t>(i)];
        if (pi <= 0.0) {
            if (xi != 0.0)
                throw std::domain_error("variance_with_replacement: zero-probability label with nonzero value");
            continue;
        }
        const double z = xi / (N * pi);
        m1 += pi * z;
        m2 += pi * z * z;
    }
    return static_cast<double>(m2 - m1 * m1) / n_sample;
}

/// Psi = (1 - delta_uv / (p_u p_v)), the N x N matrix whose positive
/// semidefiniteness decides whether without-replacement can ever lose.
/// Requires strictly positive weights; for boundary p use gamma_matrix.
template <class S>
SymmetricMatrix<S> psi_matrix(const ProbabilityVector<S>& p) {
    const int N = p.size();
    if (!p.all_positive()) throw std::domain_error("psi_matrix: requires all weights positive");
    const CoeffPair c2 = coeff_pair(N, 2);
    const S a = ScalarTraits<S>::from_rational(c2.a);
    const S b = ScalarTraits<S>::from_rational(c2.b);
    SymmetricMatrix<S> m(N);
    for (int u = 0; u < N; ++u) {
        m(u, u) = S{1};
        for (int v = 0; v < u; ++v) m(u, v) = S{1} - (a + b * (p[u] + p[v])) / (p[u] * p[v]);
    }
    return m;
}

/// Omega: the same quadratic form in the substituted variables y_i = x_i/p_i.
/// Polynomial in p, so it needs no positivity. The all-ones vector spans its
/// kernel.
template <class S>
SymmetricMatrix<S> omega_matrix(const ProbabilityVector<S>& p) {
    const int N = p.size();
    const S c1 = frac<S>(1, static_cast<long long>(N - 1) * (N - 2));
    const S c2 = frac<S>(1, N - 2);
    SymmetricMatrix<S> m(N);
    for (int u = 0; u < N; ++u) {
        m(u, u) = p[u] * p[u];
        for (int v = 0; v < u; ++v) m(u, v) = p[u] * p[v] + c1 - (p[u] + p[v]) * c2;
    }
    return m;
}

/// Gamma: the (N-1) x (N-1) reduction of Omega to the hyperplane sum(y) = 0,
/// gamma_ij = omega_ij - omega_iN - omega_jN + omega_NN. PSD of Gamma is
/// equivalent to all eigenvalues of Psi being nonnegative (when p > 0), and
/// Gamma stays defined when some p_i = 0.
template <class S>
SymmetricMatrix<S> gamma_matrix(const ProbabilityVector<S>& p) {
    const int N = p.size();
    const S c1 = frac<S>(1, static_cast<long long>(N - 1) * (N - 2));
    const S c2 = frac<S>(1, N - 2);
    const S plast = p[N - 1];
    SymmetricMatrix<S> m(N - 1);
    for (int i = 0; i < N - 1; ++i) {
        const S di = p[i] - plast;
        m(i, i) = di * di - S{2} * c1 + S{2} * (p[i] + plast) * c2;
        for (int j = 0; j < i; ++j) m(i, j) = di * (p[j] - plast) - c1 + S{2} * plast * c2;
    }
    return m;
}

/// Variance of the HT estimator under the affine SWOR design, via the
/// difference formula: Var_with - ((n-1)/n) (x' Psi x) / N^2.
template <class S>
double variance_without_replacement(const PopulationValues<S>& pv, const AffineDesign<S>& d) {
    if (!pv.p.all_positive()) throw std::domain_error("variance_without_replacement: requires all weights positive");
    const int N = pv.p.size();
    const int n = d.n_sample();
    const SymmetricMatrix<double> psi = [&] {
        if constexpr (ScalarTraits<S>::exact)
            return psi_matrix(pv.p).to_float();
        else
            return psi_matrix(pv.p);
    }();
    const double quad = psi.quadratic_form(pv.x);
    return variance_with_replacement(pv, n) -
           (static_cast<double>(n - 1) / n) * quad / (static_cast<double>(N) * N);
}

/// Same quantity by brute force: expectation over the full enumerated support.
/// Independent of the Psi route; used as its oracle.
template <class S>
double variance_without_replacement_enumerated(const PopulationValues<S>& pv, const AffineDesign<S>& d,
                                               std::uint64_t cap = 10'000'000) {
    long double m1 = 0.0L, m2 = 0.0L;
    d.for_each_support(
        [&](std::span<const int> tuple, const S& prob) {
            const double pr = to_double(prob);
            if (pr == 0.0) return;
            const double est = ht_estimate(pv, tuple);
            m1 += pr * est;
            m2 += pr * est * est;
        },
        cap);
    return static_cast<double>(m2 - m1 * m1);
}

enum class SufficientVerdict { GUARANTEED_PSD, UNDECIDED };

template <class S>
struct SufficientCondition {
    SufficientVerdict verdict;
    S threshold;     // bound the two smallest weights were compared against
    S smallest_two;  // p_(1) + p_(2)
};

/// Sum-of-two-smallest sufficient conditions: threshold 1/2 at N = 3 and
/// (3N-2)/(2N(N-1)) for N > 3. UNDECIDED does not mean indefinite - it only
/// means the shortcut gives no guarantee and a spectral check is needed.
template <class S>
SufficientCondition<S> sufficient_condition(const ProbabilityVector<S>& p) {
    const int N = p.size();
    SufficientCondition<S> r{SufficientVerdict::UNDECIDED,
                             N == 3 ? frac<S>(1, 2) : frac<S>(3 * N - 2, 2LL * N * (N - 1)),
                             p.sum_of_smallest(2)};
    if (r.smallest_two >= r.threshold) r.verdict = SufficientVerdict::GUARANTEED_PSD;
    return r;
}

}  // namespace affswor
