#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "affswor/coeffs.hpp"
#include "affswor/design.hpp"
#include "affswor/polytope.hpp"
#include "affswor/rng.hpp"
#include "affswor/sampler.hpp"
#include "affswor/variance.hpp"

namespace affswor {

// ---------------------------------------------------------------------------
// Self-check suites. These re-derive the library's closed forms through
// independent routes (exhaustive enumeration, generic linear algebra, exact
// factorial scans) and are runnable from the CLI, so a deployment can always
// re-certify itself.
// ---------------------------------------------------------------------------

struct SuiteResult {
    std::string name;
    std::uint64_t checks = 0;
    std::uint64_t failures = 0;
    std::vector<std::string> messages;  // first few failure descriptions

    bool passed() const { return failures == 0; }
    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok) {
            ++failures;
            if (messages.size() < 20) messages.push_back(what);
        }
    }
};

/// Uniform random rational point of the N-1 simplex with strictly positive
/// coordinates (integer grid of the given resolution).
inline std::vector<Rational> random_rational_simplex(int n_pop, RandomStream& rs, int resolution = 1000) {
    std::vector<BigInt> raw(static_cast<std::size_t>(n_pop));
    BigInt total = 0;
    for (auto& r : raw) {
        r = BigInt(1 + rs.below(static_cast<std::uint64_t>(resolution)));
        total += r;
    }
    std::vector<Rational> out;
    out.reserve(raw.size());
    for (const auto& r : raw) out.emplace_back(r, total);
    return out;
}

/// Random rational p that is exactly feasible for (N, n): a random simplex
/// point pulled toward the barycenter by a factor t <= (N-n)/(n(N-1)), which
/// guarantees the n smallest entries reach (n-1)/(N-1).
inline ProbabilityVector<Rational> random_feasible_rational(int n_pop, int n_sample, RandomStream& rs,
                                                            int resolution = 1000) {
    const std::vector<Rational> q = random_rational_simplex(n_pop, rs, resolution);
    const Rational t_max(n_pop - n_sample, static_cast<long long>(n_sample) * (n_pop - 1));
    const Rational t = t_max * Rational(1 + rs.below(static_cast<std::uint64_t>(resolution)), resolution);
    const Rational u(1, n_pop);
    std::vector<Rational> w;
    w.reserve(q.size());
    for (const auto& qi : q) w.push_back((1 - t) * u + t * qi);
    return ProbabilityVector<Rational>(std::move(w));
}

/// Identities 1-5 in exact arithmetic over 3 <= N <= 12, 2 <= k <= N-1.
inline SuiteResult run_identities_suite(int n_max = 12) {
    SuiteResult r;
    r.name = "identities";
    for (int N = 3; N <= n_max; ++N) {
        for (int k = 2; k <= N - 1; ++k) {
            const auto st = verify_identities(N, k);
            for (int i = 0; i < 5; ++i) {
                const bool applicable_ok = (i < 3) ? st[static_cast<std::size_t>(i)] != IdentityStatus::NotApplicable
                                                   : (k >= 3) == (st[static_cast<std::size_t>(i)] != IdentityStatus::NotApplicable);
                std::ostringstream os;
                os << "identity " << (i + 1) << " at N=" << N << " k=" << k;
                r.expect(applicable_ok && st[static_cast<std::size_t>(i)] != IdentityStatus::Fails, os.str());
            }
        }
    }
    return r;
}

/// Brute-force enumeration variance against the Psi-form variance.
inline SuiteResult run_variance_oracle_suite(std::uint64_t seed = 20240915u, int p_per_config = 50,
                                             int x_per_p = 10, double tol = 1e-10) {
    SuiteResult r;
    r.name = "variance-oracle";
    RandomStream rs(seed);
    for (int N : {4, 5, 6}) {
        for (int n : {2, 3}) {
            for (int rep = 0; rep < p_per_config; ++rep) {
                const auto p_exact = random_feasible_rational(N, n, rs);
                const ProbabilityVector<double> p = p_exact.to_float();
                const AffineDesign<double> d(p, n);
                for (int xr = 0; xr < x_per_p; ++xr) {
                    std::vector<double> x(static_cast<std::size_t>(N));
                    for (auto& xi : x) xi = 2.0 * rs.uniform01() - 1.0;
                    const PopulationValues<double> pv(p, x);
                    const double direct = variance_without_replacement(pv, d);
                    const double brute = variance_without_replacement_enumerated(pv, d);
                    std::ostringstream os;
                    os << "variance mismatch at N=" << N << " n=" << n << " rep=" << rep << " x=" << xr
                       << ": " << direct << " vs " << brute;
                    r.expect(std::abs(direct - brute) <= tol, os.str());
                }
            }
        }
    }
    return r;
}

/// Closed-form vertex/facet structure against the generic inequality-system
/// enumeration, plus the cone-vertex reconstruction of the appendix.
inline SuiteResult run_polytope_oracle_suite(int n_pop_max = 6) {
    SuiteResult r;
    r.name = "polytope-oracle";
    for (int N = 4; N <= n_pop_max; ++N) {
        for (int n = 2; n < N; ++n) {
            const auto verts = vertices(N, n);
            std::vector<std::vector<Rational>> formula;
            formula.reserve(verts.size());
            for (const auto& v : verts) formula.push_back(v.coords);
            std::sort(formula.begin(), formula.end());
            const auto brute = enumerate_vertices_bruteforce(N, n);
            {
                std::ostringstream os;
                os << "vertex sets differ at N=" << N << " n=" << n << " (" << formula.size() << " vs "
                   << brute.size() << ")";
                r.expect(formula == brute, os.str());
            }
            // facet incidence: every listed vertex saturates, every omitted one is strict
            for (const auto& f : facets(N, n)) {
                for (int id = 0; id < static_cast<int>(verts.size()); ++id) {
                    const bool listed = std::find(f.vertex_ids.begin(), f.vertex_ids.end(), id) != f.vertex_ids.end();
                    std::ostringstream os;
                    os << "facet incidence mismatch at N=" << N << " n=" << n << " vertex " << id;
                    r.expect(listed == saturates(verts[static_cast<std::size_t>(id)], f.subset, N, n), os.str());
                }
            }
            // cone vertices: w^(1) and w^(N-1) generate the vertex list by permutation
            const auto cone = cone_vertices(N, n);
            for (const auto& cv : cone) {
                Rational total = 0, head = 0;
                bool nondecreasing = true;
                for (std::size_t i = 0; i < cv.coords.size(); ++i) {
                    total += cv.coords[i];
                    if (static_cast<int>(i) < n) head += cv.coords[i];
                    if (i + 1 < cv.coords.size()) nondecreasing &= cv.coords[i] <= cv.coords[i + 1];
                }
                std::ostringstream os;
                os << "cone vertex w^(" << cv.j << ") invariants at N=" << N << " n=" << n;
                r.expect(total == 1 && nondecreasing && (cv.j == N || head == Rational(n - 1, N - 1)), os.str());
            }
            if (n < N - 1) {
                std::vector<std::vector<Rational>> from_cone;
                for (int piv = 0; piv < N; ++piv) {
                    auto w1 = cone[0].coords;  // (0, 1/(N-1), ...)
                    std::swap(w1.front(), w1[static_cast<std::size_t>(piv)]);
                    from_cone.push_back(std::move(w1));
                    auto wn = cone[static_cast<std::size_t>(N - 2)].coords;  // w^(N-1), pivot carries b = 1/n
                    std::rotate(wn.begin(), wn.end() - 1, wn.end());        // bring the large coordinate first
                    std::swap(wn.front(), wn[static_cast<std::size_t>(piv)]);
                    from_cone.push_back(std::move(wn));
                }
                std::sort(from_cone.begin(), from_cone.end());
                from_cone.erase(std::unique(from_cone.begin(), from_cone.end()), from_cone.end());
                std::ostringstream os;
                os << "cone-vertex permutations differ from vertex list at N=" << N << " n=" << n;
                r.expect(from_cone == formula, os.str());
            }
            // averaging construction: w^(j) is a mean of permutations of w^(1) (j <= n)
            // and of w^(N-1) (n <= j <= N), exactly
            for (int jj = 1; jj <= N; ++jj) {
                const auto& target = cone[static_cast<std::size_t>(jj - 1)].coords;
                std::vector<Rational> avg(static_cast<std::size_t>(N), Rational(0));
                if (jj <= n) {
                    for (int k = 0; k < jj; ++k) {
                        auto u = cone[0].coords;
                        std::swap(u.front(), u[static_cast<std::size_t>(k)]);
                        for (int i = 0; i < N; ++i) avg[static_cast<std::size_t>(i)] += u[static_cast<std::size_t>(i)];
                    }
                    for (auto& a : avg) a /= jj;
                } else {
                    for (int k = jj; k < N; ++k) {
                        auto v = cone[static_cast<std::size_t>(N - 2)].coords;  // b sits last
                        std::swap(v.back(), v[static_cast<std::size_t>(k)]);
                        for (int i = 0; i < N; ++i) avg[static_cast<std::size_t>(i)] += v[static_cast<std::size_t>(i)];
                    }
                    for (auto& a : avg) a /= (N - jj == 0 ? 1 : N - jj);
                }
                if (jj == N) {  // barycenter: average of all N permutations of w^(1)
                    std::fill(avg.begin(), avg.end(), Rational(0));
                    for (int k = 0; k < N; ++k) {
                        auto u = cone[0].coords;
                        std::swap(u.front(), u[static_cast<std::size_t>(k)]);
                        for (int i = 0; i < N; ++i) avg[static_cast<std::size_t>(i)] += u[static_cast<std::size_t>(i)];
                    }
                    for (auto& a : avg) a /= N;
                }
                std::ostringstream os;
                os << "averaging construction fails for w^(" << jj << ") at N=" << N << " n=" << n;
                r.expect(avg == target, os.str());
            }
        }
        {
            std::ostringstream os;
            os << "nesting chain violated at N=" << N;
            r.expect(nesting_check(N), os.str());
        }
    }
    return r;
}

/// Lemma 2 bracket over the full grid 1 <= r <= s <= s_max, compared in log
/// space against the exact log-factorial ratio (plain summation).
inline SuiteResult run_lemma2_suite(int s_max = 500) {
    SuiteResult r;
    r.name = "lemma2";
    for (int s = 1; s <= s_max; ++s) {
        double exact = 0.0;  // log((s-r)!/s!) accumulated as r grows
        for (int rr = 1; rr <= s; ++rr) {
            exact -= std::log(static_cast<double>(s - rr + 1));
            const auto b = factorial_ratio_bounds(rr, s);
            std::ostringstream os;
            os << "Lemma 2 bracket fails at r=" << rr << " s=" << s;
            r.expect(b.log_lower <= exact + 1e-9 && exact <= b.log_upper + 1e-9, os.str());
        }
    }
    return r;
}

/// h(m) <= C for every valid m, across all stratum-size compositions with
/// K <= 3 and N <= pop_max, several weightings each.
inline SuiteResult run_theorem8_suite(int pop_max = 30, int n_max = 5, int weightings = 3,
                                      std::uint64_t seed = 20240915u) {
    SuiteResult r;
    r.name = "theorem8";
    RandomStream rs(seed);
    std::vector<std::vector<int>> size_sets;
    for (int a = 2; a <= pop_max; ++a) {
        size_sets.push_back({a});
        for (int b = a; b <= pop_max - a; ++b) {
            size_sets.push_back({a, b});
            for (int c = b; c <= pop_max - a - b; ++c) size_sets.push_back({a, b, c});
        }
    }
    for (const auto& sizes : size_sets) {
        const int minsz = *std::min_element(sizes.begin(), sizes.end());
        const int N = std::accumulate(sizes.begin(), sizes.end(), 0);
        for (int n = 2; n <= n_max && n < minsz && n < N - 2; ++n) {
            for (int w = 0; w < weightings; ++w) {
                std::vector<double> probs(sizes.size());
                double total = 0.0;
                for (std::size_t j = 0; j < sizes.size(); ++j) {
                    probs[j] = 0.2 + 0.8 * rs.uniform01();
                    total += probs[j] * sizes[j];
                }
                for (auto& pj : probs) pj /= total;
                const StratifiedPopulation<double> pop(probs, sizes);
                const RejectionBound c = bound_C(pop, n);
                for_each_counts(pop, n, [&](const StratumCounts& m) {
                    // h may be "negative" (f < 0) for infeasible weightings; the
                    // bound claim only concerns nonnegative mass, so route
                    // through the raw affine expression rather than log_f
                    const CoeffPair cp = coeff_pair(N, n);
                    double weighted = 0.0;
                    for (std::size_t j = 0; j < probs.size(); ++j) weighted += m.m[j] * probs[j];
                    const double affine = to_double(cp.a) + to_double(cp.b) * weighted;
                    if (affine <= 0.0) return;
                    double logf = std::lgamma(n + 1.0) + std::log(affine);
                    for (std::size_t j = 0; j < probs.size(); ++j)
                        logf += detail::log_binomial(sizes[j], m.m[j]);
                    const double lh = logf - log_g_pmf(pop, n, m);
                    std::ostringstream os;
                    os << "h > C at sizes={";
                    for (int sz : sizes) os << sz << ",";
                    os << "} n=" << n << " weighting " << w;
                    r.expect(lh <= c.log_value + 1e-9, os.str());
                });
            }
        }
    }
    return r;
}

}  // namespace affswor
