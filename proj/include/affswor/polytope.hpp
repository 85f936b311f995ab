#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "affswor/design.hpp"
#include "affswor/probability.hpp"
#include "affswor/spectral.hpp"
#include "affswor/variance.hpp"

namespace affswor {

// ---------------------------------------------------------------------------
// The feasibility polytope T_{N,n}: probability vectors whose n smallest
// entries sum to at least (n-1)/(N-1). Everything combinatorial here runs in
// exact rationals; only spectral checks drop to floating point.
// ---------------------------------------------------------------------------

/// Same test as design existence_check, shared implementation.
template <class S>
bool membership(const ProbabilityVector<S>& p, int n_sample) {
    return existence_check(p, n_sample).feasible;
}

enum class VertexKind { ZERO, ONE_OVER_N };

struct PolytopeVertex {
    VertexKind kind;
    int pivot;  // 0-based label carrying the distinguished coordinate
    std::vector<Rational> coords;
};

inline PolytopeVertex make_vertex(VertexKind kind, int pivot, int n_pop, int n_sample) {
    PolytopeVertex v{kind, pivot, {}};
    if (kind == VertexKind::ZERO) {
        v.coords.assign(static_cast<std::size_t>(n_pop), Rational(1, n_pop - 1));
        v.coords[static_cast<std::size_t>(pivot)] = 0;
    } else {
        v.coords.assign(static_cast<std::size_t>(n_pop),
                        Rational(n_sample - 1, static_cast<long long>(n_sample) * (n_pop - 1)));
        v.coords[static_cast<std::size_t>(pivot)] = Rational(1, n_sample);
    }
    return v;
}

/// The vertices of T_{N,n}: the 2N points p^(i,0), p^(i,1/n) when n < N-1,
/// and only the N points p^(i,0) when n = N-1 (a simplex). Ordering: all
/// ZERO-kind by pivot, then all ONE_OVER_N-kind by pivot.
inline std::vector<PolytopeVertex> vertices(int n_pop, int n_sample) {
    if (n_pop < 3 || n_sample < 2 || n_sample >= n_pop)
        throw std::domain_error("vertices: need N >= 3 and 2 <= n < N");
    std::vector<PolytopeVertex> out;
    for (int i = 0; i < n_pop; ++i) out.push_back(make_vertex(VertexKind::ZERO, i, n_pop, n_sample));
    if (n_sample < n_pop - 1)
        for (int i = 0; i < n_pop; ++i) out.push_back(make_vertex(VertexKind::ONE_OVER_N, i, n_pop, n_sample));
    return out;
}

struct Facet {
    std::vector<int> subset;      // the size-n label set F of the inequality, sorted
    std::vector<int> vertex_ids;  // indices into vertices(N, n)
};

/// Exact saturation test: does vertex v lie on the facet of subset F?
inline bool saturates(const PolytopeVertex& v, const std::vector<int>& subset, int n_pop, int n_sample) {
    Rational sum = 0;
    for (int i : subset) sum += v.coords[static_cast<std::size_t>(i)];
    return sum == Rational(n_sample - 1, n_pop - 1);
}

/// One facet per size-n subset F, in lexicographic subset order. For
/// n < N-1 the incident vertices are {p^(i,0) : i in F} and
/// {p^(i,1/n) : i not in F}; for n = N-1 incidence is found by direct
/// saturation since the closed-form vertex set only covers n < N-1.
inline std::vector<Facet> facets(int n_pop, int n_sample) {
    const std::vector<PolytopeVertex> verts = vertices(n_pop, n_sample);
    std::vector<Facet> out;
    std::vector<int> comb(static_cast<std::size_t>(n_sample));
    for (int i = 0; i < n_sample; ++i) comb[static_cast<std::size_t>(i)] = i;
    while (true) {
        Facet f;
        f.subset = comb;
        if (n_sample < n_pop - 1) {
            for (int i : comb) f.vertex_ids.push_back(i);  // ZERO kind occupies ids 0..N-1
            for (int i = 0; i < n_pop; ++i)
                if (std::find(comb.begin(), comb.end(), i) == comb.end())
                    f.vertex_ids.push_back(n_pop + i);  // ONE_OVER_N kind at ids N..2N-1
        } else {
            for (int id = 0; id < static_cast<int>(verts.size()); ++id)
                if (saturates(verts[static_cast<std::size_t>(id)], f.subset, n_pop, n_sample))
                    f.vertex_ids.push_back(id);
        }
        out.push_back(std::move(f));
        int i = n_sample - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] == n_pop - n_sample + i) --i;
        if (i < 0) break;
        ++comb[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n_sample; ++j)
            comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

/// Vertex adjacency (one-dimensional faces):
///   - p^(i,0) and p^(i,1/n) (same pivot) are never adjacent;
///   - p^(i,0), p^(j,0) with i != j are adjacent iff n > 2;
///   - p^(i,1/n), p^(j,1/n) with i != j are adjacent iff n < N-2;
///   - mixed kinds with distinct pivots are always adjacent;
///   - at n = N-1 the polytope is a simplex, so all distinct vertices are
///     adjacent (only ZERO kind exists there).
inline bool adjacent(const PolytopeVertex& v1, const PolytopeVertex& v2, int n_pop, int n_sample) {
    if (n_sample == n_pop - 1) {
        if (v1.kind != VertexKind::ZERO || v2.kind != VertexKind::ZERO)
            throw std::domain_error("adjacent: only p^(i,0) vertices exist at n = N-1");
        return v1.pivot != v2.pivot;
    }
    if (v1.pivot == v2.pivot) return false;
    if (v1.kind == VertexKind::ZERO && v2.kind == VertexKind::ZERO) return n_sample > 2;
    if (v1.kind == VertexKind::ONE_OVER_N && v2.kind == VertexKind::ONE_OVER_N) return n_sample < n_pop - 2;
    return true;
}

/// Monte-Carlo check of the nesting chain T_{N,2} >= T_{N,3} >= ... >=
/// T_{N,N-1}: no sampled simplex point may belong to T_{N,n+1} without
/// belonging to T_{N,n}.
inline bool nesting_check(int n_pop, int samples = 1000, std::uint64_t seed = 20240915u) {
    if (n_pop < 4) throw std::domain_error("nesting_check: needs N >= 4");
    std::mt19937_64 eng(seed);
    auto unit = [&] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
    for (int s = 0; s < samples; ++s) {
        // spacing construction: normalized exponentials are uniform on the simplex
        std::vector<double> w(static_cast<std::size_t>(n_pop));
        double tot = 0.0;
        for (auto& wi : w) {
            wi = -std::log(std::max(unit(), 1e-300));
            tot += wi;
        }
        for (auto& wi : w) wi /= tot;
        ProbabilityVector<double> p(w);
        for (int n = 2; n <= n_pop - 2; ++n)
            if (membership(p, n + 1) && !membership(p, n)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Spectral behavior on the boundary.
// ---------------------------------------------------------------------------

/// Gamma spectrum at a p^(i,0) vertex: {0, then 1/((N-1)(N-2)) repeated}.
inline std::vector<Rational> zero_vertex_spectrum(int n_pop) {
    std::vector<Rational> out{Rational(0)};
    out.insert(out.end(), static_cast<std::size_t>(n_pop - 2),
               Rational(1, static_cast<long long>(n_pop - 1) * (n_pop - 2)));
    return out;
}

/// Gamma spectrum at a p^(i,1/n) vertex, ascending:
/// {(n-2)/((N-2)(N-1)n) repeated, then N^2/((N-1)n^2)}.
inline std::vector<Rational> inv_n_vertex_spectrum(int n_pop, int n_sample) {
    std::vector<Rational> out(static_cast<std::size_t>(n_pop - 2),
                              Rational(n_sample - 2, static_cast<long long>(n_pop - 2) * (n_pop - 1) * n_sample));
    out.push_back(Rational(static_cast<long long>(n_pop) * n_pop,
                           static_cast<long long>(n_pop - 1) * n_sample * n_sample));
    return out;
}

/// Numeric Gamma spectrum at a vertex. The closed forms above assume the
/// distinguished coordinate sits last, so the coordinates are rotated to put
/// the pivot there before building Gamma (PSD-ness is permutation-invariant;
/// the individual Gamma eigenvalues are not).
inline SpectralReport vertex_spectral(int n_pop, int n_sample, const PolytopeVertex& v, double tol = 1e-9) {
    if (n_pop <= 3) throw std::domain_error("vertex_spectral: needs N > 3");
    std::vector<Rational> coords = v.coords;
    std::swap(coords[static_cast<std::size_t>(v.pivot)], coords.back());
    (void)n_sample;
    ProbabilityVector<Rational> p(std::move(coords));
    return symmetric_eigenvalues(gamma_matrix(p).to_float(), tol);
}

/// The boundary point of Theorem 7, and everything needed to check its
/// negative eigenvalue against the closed form.
struct BoundaryCounterexample {
    ProbabilityVector<Rational> p;   // (1/4 + 1/(2(N-1)), 3/(4(N-1)), ..., 1/(4(N-1)))
    SpectralReport gamma_report;     // spectrum of Gamma(p)
    double lambda;                   // closed-form negative eigenvalue of Gamma
    Rational quad_a, quad_b, quad_c; // coefficients of the eigenvector equation
    Rational discriminant;           // D = B^2 - 4AC
};

inline BoundaryCounterexample theorem7_counterexample(int n_pop, double tol = 1e-9) {
    if (n_pop <= 3) throw std::domain_error("theorem7_counterexample: needs N > 3");
    const long long N = n_pop;
    std::vector<Rational> coords(static_cast<std::size_t>(n_pop), Rational(3, 4 * (N - 1)));
    coords.front() = Rational(1, 4) + Rational(1, 2 * (N - 1));
    coords.back() = Rational(1, 4 * (N - 1));

    const Rational qa = Rational(N, 8 * (N - 1) * (N - 1)) - Rational(1, 2 * (N - 1) * (N - 2));
    const Rational qb = -Rational(N * N * N + 10 * N * N - 40 * N + 24, 16 * (N - 2) * (N - 1) * (N - 1));
    const Rational qc = -(Rational(N * (N - 2), 8 * (N - 1) * (N - 1)) - Rational(1, 2 * (N - 1)));
    const Rational disc = qb * qb - 4 * qa * qc;

    BoundaryCounterexample out{ProbabilityVector<Rational>(std::move(coords)), {}, 0.0, qa, qb, qc, disc};
    out.gamma_report = symmetric_eigenvalues(gamma_matrix(out.p).to_float(), tol);
    const double nd = static_cast<double>(N);
    out.lambda = (1.0 + 8.0 / (nd - 2.0) - 3.0 / ((nd - 1.0) * (nd - 1.0)) - 2.0 / (nd - 1.0) -
                  std::sqrt(256.0 * to_double(disc))) /
                 32.0;
    return out;
}

// ---------------------------------------------------------------------------
// The cone decomposition behind the vertex theorem (the ordered-orthant
// section U_{N,n}), used as an oracle for the vertex list.
// ---------------------------------------------------------------------------

/// w^(j) = (a_j, ..., a_j, b_j, ..., b_j) with j leading and N-j trailing
/// coordinates. For j = N the point is the barycenter and b is unused.
struct ConeVertex {
    int j;  // 1-based, matching the block length
    Rational a, b;
    std::vector<Rational> coords;
};

inline std::vector<ConeVertex> cone_vertices(int n_pop, int n_sample) {
    if (n_pop < 3 || n_sample < 2 || n_sample >= n_pop)
        throw std::domain_error("cone_vertices: need N >= 3 and 2 <= n < N");
    const long long N = n_pop, n = n_sample;
    std::vector<ConeVertex> out;
    for (int j = 1; j <= n_pop; ++j) {
        ConeVertex cv;
        cv.j = j;
        if (j == n_pop) {
            cv.a = Rational(1, N);
            cv.b = 0;
        } else {
            cv.a = j <= n_sample ? Rational(j - 1, static_cast<long long>(j) * (N - 1))
                                 : Rational(n - 1, n * (N - 1));
            cv.b = j <= n_sample ? Rational(1, N - 1)
                                 : Rational(n * (N - 1) - j * (n - 1), n * (N - j) * (N - 1));
        }
        cv.coords.assign(static_cast<std::size_t>(j), cv.a);
        cv.coords.insert(cv.coords.end(), static_cast<std::size_t>(n_pop - j), j == n_pop ? cv.a : cv.b);
        out.push_back(std::move(cv));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Generic vertex enumeration over the defining inequality system, kept
// deliberately independent of the closed-form vertex list so the two can
// cross-check each other.
// ---------------------------------------------------------------------------

/// Solves the square rational system M x = rhs. Returns false if M is
/// singular.
inline bool solve_rational(std::vector<std::vector<Rational>> m, std::vector<Rational> rhs,
                           std::vector<Rational>& x) {
    const std::size_t n = m.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && m[piv][col] == 0) ++piv;
        if (piv == n) return false;
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        const Rational d = m[col][col];
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || m[r][col] == 0) continue;
            const Rational f = m[r][col] / d;
            for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / m[i][i];
    return true;
}

/// Brute-force vertex oracle: every choice of N-1 active inequalities from
/// {facet inequalities} union {nonnegativity}, solved together with the
/// simplex equality; solutions of full rank that satisfy every inequality
/// are vertices. Returns the distinct coordinate vectors, sorted.
inline std::vector<std::vector<Rational>> enumerate_vertices_bruteforce(int n_pop, int n_sample) {
    if (n_pop < 3 || n_sample < 2 || n_sample >= n_pop)
        throw std::domain_error("enumerate_vertices_bruteforce: need N >= 3 and 2 <= n < N");
    const Rational thr(n_sample - 1, n_pop - 1);

    std::vector<std::pair<std::vector<Rational>, Rational>> ineqs;  // <coeffs, rhs> meaning coeffs . x >= rhs
    {
        std::vector<int> comb(static_cast<std::size_t>(n_sample));
        for (int i = 0; i < n_sample; ++i) comb[static_cast<std::size_t>(i)] = i;
        while (true) {
            std::vector<Rational> row(static_cast<std::size_t>(n_pop), Rational(0));
            for (int i : comb) row[static_cast<std::size_t>(i)] = 1;
            ineqs.emplace_back(std::move(row), thr);
            int i = n_sample - 1;
            while (i >= 0 && comb[static_cast<std::size_t>(i)] == n_pop - n_sample + i) --i;
            if (i < 0) break;
            ++comb[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < n_sample; ++j)
                comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
        }
        for (int i = 0; i < n_pop; ++i) {
            std::vector<Rational> row(static_cast<std::size_t>(n_pop), Rational(0));
            row[static_cast<std::size_t>(i)] = 1;
            ineqs.emplace_back(std::move(row), Rational(0));
        }
    }

    std::vector<std::vector<Rational>> found;
    const int m_total = static_cast<int>(ineqs.size());
    std::vector<int> pick(static_cast<std::size_t>(n_pop - 1));
    for (int i = 0; i < n_pop - 1; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
        std::vector<std::vector<Rational>> mat;
        std::vector<Rational> rhs;
        for (int idx : pick) {
            mat.push_back(ineqs[static_cast<std::size_t>(idx)].first);
            rhs.push_back(ineqs[static_cast<std::size_t>(idx)].second);
        }
        mat.emplace_back(static_cast<std::size_t>(n_pop), Rational(1));  // simplex equality
        rhs.emplace_back(1);
        std::vector<Rational> x;
        if (solve_rational(std::move(mat), std::move(rhs), x)) {
            bool feasible = true;
            for (const auto& [row, bound] : ineqs) {
                Rational lhs = 0;
                for (int c = 0; c < n_pop; ++c) lhs += row[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
                if (lhs < bound) {
                    feasible = false;
                    break;
                }
            }
            if (feasible) found.push_back(std::move(x));
        }
        int i = n_pop - 2;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == m_total - (n_pop - 1) + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n_pop - 1; ++j)
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
}

}  // namespace affswor
