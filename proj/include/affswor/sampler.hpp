#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "affswor/coeffs.hpp"
#include "affswor/design.hpp"
#include "affswor/probability.hpp"
#include "affswor/rng.hpp"

namespace affswor {

/// A population partitioned into K strata; every individual in stratum j
/// carries the same selection probability p^(j). The expanded probability
/// vector repeats p^(j) exactly N_j times, so sum_j N_j p^(j) must be 1.
template <class S>
struct StratifiedPopulation {
    std::vector<S> stratum_probs;  // p^(1..K), all > 0
    std::vector<int> stratum_sizes;

    StratifiedPopulation(std::vector<S> probs, std::vector<int> sizes)
        : stratum_probs(std::move(probs)), stratum_sizes(std::move(sizes)) {
        if (stratum_probs.empty() || stratum_probs.size() != stratum_sizes.size())
            throw std::invalid_argument("StratifiedPopulation: probs and sizes must be nonempty and equal length");
        S total{0};
        for (std::size_t j = 0; j < stratum_probs.size(); ++j) {
            if (!(stratum_probs[j] > S{0})) throw std::domain_error("StratifiedPopulation: stratum probability must be positive");
            if (stratum_sizes[j] < 1) throw std::domain_error("StratifiedPopulation: stratum size must be positive");
            total += stratum_probs[j] * S(stratum_sizes[j]);
        }
        if (!ScalarTraits<S>::is_one(total))
            throw std::domain_error("StratifiedPopulation: stratum probabilities do not integrate to 1");
    }

    int strata() const { return static_cast<int>(stratum_probs.size()); }
    int population() const { return std::accumulate(stratum_sizes.begin(), stratum_sizes.end(), 0); }
    int min_stratum() const { return *std::min_element(stratum_sizes.begin(), stratum_sizes.end()); }

    ProbabilityVector<S> expand() const {
        std::vector<S> w;
        w.reserve(static_cast<std::size_t>(population()));
        for (std::size_t j = 0; j < stratum_probs.size(); ++j)
            w.insert(w.end(), static_cast<std::size_t>(stratum_sizes[j]), stratum_probs[j]);
        return ProbabilityVector<S>(std::move(w));
    }
};

/// Per-stratum sample counts: nonnegative, m_j <= N_j, sum m_j = n.
struct StratumCounts {
    std::vector<int> m;
    bool operator==(const StratumCounts&) const = default;
};

template <class S>
void check_counts(const StratifiedPopulation<S>& pop, int n_sample, const StratumCounts& counts) {
    if (static_cast<int>(counts.m.size()) != pop.strata())
        throw std::invalid_argument("stratum counts: wrong number of strata");
    int total = 0;
    for (int j = 0; j < pop.strata(); ++j) {
        const int mj = counts.m[static_cast<std::size_t>(j)];
        if (mj < 0 || mj > pop.stratum_sizes[static_cast<std::size_t>(j)])
            throw std::domain_error("stratum counts: m_j out of range");
        total += mj;
    }
    if (total != n_sample) throw std::domain_error("stratum counts: entries must sum to n");
}

/// Visits every valid count vector (sum = n, 0 <= m_j <= N_j).
template <class S, class F>
void for_each_counts(const StratifiedPopulation<S>& pop, int n_sample, F&& fn) {
    const int K = pop.strata();
    StratumCounts counts;
    counts.m.assign(static_cast<std::size_t>(K), 0);
    auto rec = [&](auto&& self, int j, int remaining) -> void {
        if (j == K - 1) {
            if (remaining <= pop.stratum_sizes[static_cast<std::size_t>(j)]) {
                counts.m[static_cast<std::size_t>(j)] = remaining;
                fn(const_cast<const StratumCounts&>(counts));
            }
            return;
        }
        const int cap = std::min(remaining, pop.stratum_sizes[static_cast<std::size_t>(j)]);
        for (int mj = 0; mj <= cap; ++mj) {
            counts.m[static_cast<std::size_t>(j)] = mj;
            self(self, j + 1, remaining - mj);
        }
    };
    rec(rec, 0, n_sample);
}

/// Exact stratum-count pmf under the affine design,
///   f(m) = n! prod_j C(N_j, m_j) * { A_{N,n} + B_{N,n} sum_j m_j p^(j) }.
/// Requires n <= min_j N_j. Throws if the affine factor is negative, which
/// happens exactly when the expanded population is infeasible for n.
inline Rational f_pmf(const StratifiedPopulation<Rational>& pop, int n_sample, const StratumCounts& counts) {
    if (n_sample > pop.min_stratum()) throw std::domain_error("f_pmf: requires n <= min_j N_j");
    check_counts(pop, n_sample, counts);
    const CoeffPair c = coeff_pair(pop.population(), n_sample);
    Rational weighted = 0;
    BigInt combo = factorial(n_sample);
    for (int j = 0; j < pop.strata(); ++j) {
        weighted += counts.m[static_cast<std::size_t>(j)] * pop.stratum_probs[static_cast<std::size_t>(j)];
        combo *= binomial(pop.stratum_sizes[static_cast<std::size_t>(j)], counts.m[static_cast<std::size_t>(j)]);
    }
    const Rational affine = c.a + c.b * weighted;
    if (affine < 0)
        throw std::domain_error("f_pmf: negative mass - expanded population is infeasible for this n");
    return affine * Rational(combo);
}

namespace detail {
inline double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}
}  // namespace detail

/// log f(m) in float mode. Factorials go through lgamma so stratum sizes in
/// the hundreds do not overflow. Returns -inf on the facet (affine factor 0);
/// clamps rounding noise in [-1e-10, 0] to zero and rejects anything more
/// negative as infeasible.
inline double log_f_pmf(const StratifiedPopulation<double>& pop, int n_sample, const StratumCounts& counts) {
    if (n_sample > pop.min_stratum()) throw std::domain_error("log_f_pmf: requires n <= min_j N_j");
    check_counts(pop, n_sample, counts);
    const int N = pop.population();
    const CoeffPair c = coeff_pair(N, n_sample);
    double weighted = 0.0, logc = std::lgamma(n_sample + 1.0);
    for (int j = 0; j < pop.strata(); ++j) {
        weighted += counts.m[static_cast<std::size_t>(j)] * pop.stratum_probs[static_cast<std::size_t>(j)];
        logc += detail::log_binomial(pop.stratum_sizes[static_cast<std::size_t>(j)],
                                     counts.m[static_cast<std::size_t>(j)]);
    }
    double affine = to_double(c.a) + to_double(c.b) * weighted;
    affine = ScalarTraits<double>::clamp_probability(affine);
    if (affine < 0.0) throw std::domain_error("log_f_pmf: negative mass - expanded population is infeasible for this n");
    if (affine == 0.0) return -std::numeric_limits<double>::infinity();
    return logc + std::log(affine);
}

inline double f_pmf(const StratifiedPopulation<double>& pop, int n_sample, const StratumCounts& counts) {
    return std::exp(log_f_pmf(pop, n_sample, counts));
}

/// Multinomial(n; lambda) proposal mass, lambda_j = N_j / N.
template <class S>
S g_pmf(const StratifiedPopulation<S>& pop, int n_sample, const StratumCounts& counts) {
    check_counts(pop, n_sample, counts);
    const int N = pop.population();
    if constexpr (ScalarTraits<S>::exact) {
        Rational r(factorial(n_sample));
        for (int j = 0; j < pop.strata(); ++j) {
            const int mj = counts.m[static_cast<std::size_t>(j)];
            r /= Rational(factorial(mj));
            const Rational lam(pop.stratum_sizes[static_cast<std::size_t>(j)], N);
            for (int t = 0; t < mj; ++t) r *= lam;
        }
        return r;
    } else {
        double lg = std::lgamma(n_sample + 1.0);
        for (int j = 0; j < pop.strata(); ++j) {
            const int mj = counts.m[static_cast<std::size_t>(j)];
            lg -= std::lgamma(mj + 1.0);
            lg += mj * std::log(static_cast<double>(pop.stratum_sizes[static_cast<std::size_t>(j)]) / N);
        }
        return std::exp(lg);
    }
}

inline double log_g_pmf(const StratifiedPopulation<double>& pop, int n_sample, const StratumCounts& counts) {
    check_counts(pop, n_sample, counts);
    const int N = pop.population();
    double lg = std::lgamma(n_sample + 1.0);
    for (int j = 0; j < pop.strata(); ++j) {
        const int mj = counts.m[static_cast<std::size_t>(j)];
        lg -= std::lgamma(mj + 1.0);
        lg += mj * std::log(static_cast<double>(pop.stratum_sizes[static_cast<std::size_t>(j)]) / N);
    }
    return lg;
}

/// Importance ratio h(m) = f(m)/g(m), in log space.
inline double log_h(const StratifiedPopulation<double>& pop, int n_sample, const StratumCounts& counts) {
    return log_f_pmf(pop, n_sample, counts) - log_g_pmf(pop, n_sample, counts);
}

/// Bracket for (s-r)!/s! (1 <= r <= s) in log space:
///   -r log s - r^3/(s(s-r)) - r/(2(s-r)) - 1/(144 s^2)
///     <= log((s-r)!/s!) <=
///   -r log s + (r^2 + 1/12)/(s-r) - r/(2s).
/// At r = s both sides degenerate to -inf / +inf (still a valid bracket).
struct FactorialRatioBounds {
    double log_lower;
    double log_upper;
};

inline FactorialRatioBounds factorial_ratio_bounds(int r, int s) {
    if (r < 1 || r > s) throw std::domain_error("factorial_ratio_bounds: need 1 <= r <= s");
    const double rd = r, sd = s;
    const double gap = sd - rd;  // may be 0; IEEE division then gives the infinite degenerate bracket
    FactorialRatioBounds b;
    b.log_lower = -rd * std::log(sd) - rd * rd * rd / (sd * gap) - 0.5 * rd / gap - 1.0 / (144.0 * sd * sd);
    b.log_upper = -rd * std::log(sd) + (rd * rd + 1.0 / 12.0) / gap - 0.5 * rd / sd;
    return b;
}

/// The rejection-sampling envelope constant of the stratified scheme:
///
///   C = exp{ sum_j [ n^3/(N_j(N_j-n)) + n/(N_j-n) + 1/(144 N_j^2) ] }
///     * exp{ (n^2 + 1/12)/(N-n-2) + (3/2) n/(N-2) }
///     * N (n max_j p^(j) - (n-1)/(N-1)),
///
/// a uniform upper bound on h = f/g. Requires n < N_j for every stratum and
/// n < N-2. `approx` carries the rule-of-thumb bound n omega e^{n^2/N} with
/// omega = max p^(j) / min p^(j).
struct RejectionBound {
    double value = 0.0;
    double log_value = 0.0;
    double approx = 0.0;
    double omega = 0.0;
};

template <class S>
RejectionBound bound_C(const StratifiedPopulation<S>& pop, int n_sample) {
    const int N = pop.population();
    if (n_sample >= pop.min_stratum()) throw std::domain_error("bound_C: requires n < N_j for every stratum");
    if (N <= n_sample + 2) throw std::domain_error("bound_C: requires N > n + 2");
    const double n = n_sample;
    double expo = (n * n + 1.0 / 12.0) / (N - n - 2.0) + 1.5 * n / (N - 2.0);
    double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < pop.strata(); ++j) {
        const double nj = pop.stratum_sizes[static_cast<std::size_t>(j)];
        expo += n * n * n / (nj * (nj - n)) + n / (nj - n) + 1.0 / (144.0 * nj * nj);
        const double pj = to_double(pop.stratum_probs[static_cast<std::size_t>(j)]);
        pmax = std::max(pmax, pj);
        pmin = std::min(pmin, pj);
    }
    RejectionBound b;
    b.omega = pmax / pmin;
    const double tail = N * (n * pmax - (n - 1.0) / (N - 1.0));
    b.log_value = expo + std::log(tail);
    b.value = std::exp(b.log_value);
    b.approx = n * b.omega * std::exp(n * n / N);
    return b;
}

struct RejectionStats {
    std::uint64_t accepted = 0;
    std::uint64_t proposals = 0;
    double bound_C = 0.0;
    double empirical_iterations_per_accept() const {
        return accepted == 0 ? 0.0 : static_cast<double>(proposals) / static_cast<double>(accepted);
    }
};

/// Draws from the affine SWOR design of a stratified population: stratum
/// counts M ~ f by rejection against the multinomial proposal (accept when
/// U <= f(M)/(C g(M))), then a simple random sample of size m_j inside each
/// stratum, then a uniform shuffle of the concatenated labels.
///
/// Owns its rng and stats; one instance per thread. Draw k consumes the
/// child stream mix(seed, k) only (see rng.hpp), so fixed seeds reproduce
/// exactly.
class StratifiedSampler {
public:
    StratifiedSampler(StratifiedPopulation<double> pop, int n_sample, std::uint64_t seed)
        : pop_(std::move(pop)), n_(n_sample), seed_(seed) {
        if (n_ < 2) throw std::domain_error("StratifiedSampler: sample size must be at least 2");
        const auto chk = existence_check(pop_.expand(), n_);
        if (!chk.feasible)
            throw InfeasibleDesign("StratifiedSampler: expanded population infeasible for this n", chk.min_subset);
        stats_.bound_C = bound_C(pop_, n_).value;
        log_c_ = bound_C(pop_, n_).log_value;
        lambda_.reserve(static_cast<std::size_t>(pop_.strata()));
        const double N = pop_.population();
        for (int j = 0; j < pop_.strata(); ++j)
            lambda_.push_back(pop_.stratum_sizes[static_cast<std::size_t>(j)] / N);
    }

    const StratifiedPopulation<double>& population() const { return pop_; }
    int n_sample() const { return n_; }
    const RejectionStats& stats() const { return stats_; }

    StratumCounts draw_counts() {
        RandomStream stream = child_stream(seed_, draw_index_++);
        return draw_counts_with(stream);
    }

    struct Draw {
        StratumCounts counts;
        std::vector<int> labels;  // 0-based, distinct, ordered as sampled
    };

    Draw draw() {
        RandomStream stream = child_stream(seed_, draw_index_++);
        Draw d;
        d.counts = draw_counts_with(stream);
        d.labels = expand_counts(d.counts, stream);
        return d;
    }

    /// Turns accepted stratum counts into concrete labels using the supplied
    /// stream (exposed for tests; draw() wires it to the draw's own stream).
    std::vector<int> expand_counts(const StratumCounts& counts, RandomStream& stream) const {
        check_counts(pop_, n_, counts);
        std::vector<int> labels;
        labels.reserve(static_cast<std::size_t>(n_));
        int offset = 0;
        std::vector<int> pool;
        for (int j = 0; j < pop_.strata(); ++j) {
            const int nj = pop_.stratum_sizes[static_cast<std::size_t>(j)];
            const int mj = counts.m[static_cast<std::size_t>(j)];
            pool.resize(static_cast<std::size_t>(nj));
            std::iota(pool.begin(), pool.end(), offset);
            for (int t = 0; t < mj; ++t) {  // partial Fisher-Yates
                const auto pick = static_cast<std::size_t>(t) + static_cast<std::size_t>(stream.below(
                                      static_cast<std::uint64_t>(nj - t)));
                std::swap(pool[static_cast<std::size_t>(t)], pool[pick]);
                labels.push_back(pool[static_cast<std::size_t>(t)]);
            }
            offset += nj;
        }
        for (int t = n_ - 1; t > 0; --t) {  // uniform permutation of the n labels
            const auto pick = static_cast<std::size_t>(stream.below(static_cast<std::uint64_t>(t + 1)));
            std::swap(labels[static_cast<std::size_t>(t)], labels[pick]);
        }
        return labels;
    }

private:
    StratumCounts draw_counts_with(RandomStream& stream) {
        const auto cap = static_cast<std::uint64_t>(1e6 * std::max(stats_.bound_C, 1.0));
        StratumCounts counts;
        counts.m.resize(static_cast<std::size_t>(pop_.strata()));
        for (std::uint64_t iter = 0; iter < cap; ++iter) {
            ++stats_.proposals;
            propose_multinomial(counts, stream);
            const double u = stream.uniform01();
            const double lf = log_f_pmf(pop_, n_, counts);
            if (lf == -std::numeric_limits<double>::infinity()) continue;
            if (std::log(u) <= lf - log_g_pmf(pop_, n_, counts) - log_c_) {
                ++stats_.accepted;
                return counts;
            }
        }
        throw std::runtime_error("StratifiedSampler: rejection loop exceeded 1e6 * C proposals; "
                                 "the envelope constant looks wrong for this input");
    }

    void propose_multinomial(StratumCounts& counts, RandomStream& stream) const {
        std::fill(counts.m.begin(), counts.m.end(), 0);
        for (int t = 0; t < n_; ++t) {
            double u = stream.uniform01();
            int j = 0;
            for (; j < pop_.strata() - 1; ++j) {
                u -= lambda_[static_cast<std::size_t>(j)];
                if (u < 0.0) break;
            }
            ++counts.m[static_cast<std::size_t>(j)];
        }
    }

    StratifiedPopulation<double> pop_;
    int n_;
    std::uint64_t seed_;
    std::uint64_t draw_index_ = 0;
    double log_c_ = 0.0;
    std::vector<double> lambda_;
    RejectionStats stats_;
};

}  // namespace affswor
