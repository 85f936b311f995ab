#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "affswor/numeric.hpp"

namespace affswor {

/// Dense symmetric matrix, lower triangle stored row-wise. S is double for
/// the eigensolver path and Rational where tests want exact entries.
template <class S>
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(int dim) : dim_(dim), data_(packed_size(dim), S{0}) {
        if (dim < 1) throw std::domain_error("SymmetricMatrix: dimension must be positive");
    }

    int dim() const { return dim_; }

    S& operator()(int i, int j) { return data_[index(i, j)]; }
    const S& operator()(int i, int j) const { return data_[index(i, j)]; }

    SymmetricMatrix<double> to_float() const {
        SymmetricMatrix<double> m(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j <= i; ++j) m(i, j) = to_double((*this)(i, j));
        return m;
    }

    /// max_i sum_j |a_ij|
    double inf_norm() const {
        double best = 0.0;
        for (int i = 0; i < dim_; ++i) {
            double row = 0.0;
            for (int j = 0; j < dim_; ++j) row += std::abs(to_double((*this)(i, j)));
            best = std::max(best, row);
        }
        return best;
    }

    /// x' M x accumulated in long double.
    double quadratic_form(const std::vector<double>& x) const {
        long double acc = 0.0L;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                acc += static_cast<long double>(to_double((*this)(i, j))) * x[static_cast<std::size_t>(i)] *
                       x[static_cast<std::size_t>(j)];
        return static_cast<double>(acc);
    }

private:
    static std::size_t packed_size(int dim) {
        return static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim + 1) / 2;
    }
    std::size_t index(int i, int j) const {
        if (i < 0 || j < 0 || i >= dim_ || j >= dim_) throw std::out_of_range("SymmetricMatrix: index");
        if (j > i) std::swap(i, j);
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(i + 1) / 2 + static_cast<std::size_t>(j);
    }

    int dim_;
    std::vector<S> data_;
};

enum class PsdVerdict { PSD, INDEFINITE, INCONCLUSIVE };

inline const char* to_string(PsdVerdict v) {
    switch (v) {
        case PsdVerdict::PSD: return "PSD";
        case PsdVerdict::INDEFINITE: return "INDEFINITE";
        default: return "INCONCLUSIVE";
    }
}

struct SpectralReport {
    std::vector<double> eigenvalues;  // ascending
    double min_eigenvalue = 0.0;
    PsdVerdict verdict = PsdVerdict::INCONCLUSIVE;
    std::optional<std::vector<double>> witness;  // x with x'Mx < 0 when INDEFINITE
    double tol = 0.0;                            // effective threshold used for the verdict
    int sweeps = 0;
};

struct JacobiResult {
    std::vector<double> eigenvalues;               // ascending
    std::vector<std::vector<double>> eigenvectors;  // eigenvectors[k] pairs with eigenvalues[k]
    int sweeps = 0;
};

/// Cyclic Jacobi diagonalization. Small dense symmetric matrices only; the
/// sweep budget of 50 is far beyond what dimensions <= 16 ever need, so
/// hitting it signals a pathological input (NaN/Inf entries).
inline JacobiResult jacobi_eigen(SymmetricMatrix<double> m, int max_sweeps = 50) {
    const int n = m.dim();
    std::vector<std::vector<double>> a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    std::vector<std::vector<double>> v(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;

    double fro = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) fro += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                                           a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    fro = std::sqrt(fro);
    const double stop = 1e-15 * std::max(fro, 1e-300);

    JacobiResult out;
    int sweep = 0;
    for (; sweep < max_sweeps && n > 1; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2.0 * a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                                                   a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (std::sqrt(off) <= stop) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
                if (apq == 0.0) continue;
                const double app = a[static_cast<std::size_t>(p)][static_cast<std::size_t>(p)];
                const double aqq = a[static_cast<std::size_t>(q)][static_cast<std::size_t>(q)];
                // skip rotations that cannot change anything at working precision
                if (std::abs(apq) <= 1e-300 ||
                    std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq))) {
                    a[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = 0.0;
                    a[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)] = 0.0;
                    continue;
                }
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                a[static_cast<std::size_t>(p)][static_cast<std::size_t>(p)] = app - t * apq;
                a[static_cast<std::size_t>(q)][static_cast<std::size_t>(q)] = aqq + t * apq;
                a[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = 0.0;
                a[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)] = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(p)];
                    const double arq = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)];
                    a[static_cast<std::size_t>(r)][static_cast<std::size_t>(p)] = arp - s * (arq + tau * arp);
                    a[static_cast<std::size_t>(p)][static_cast<std::size_t>(r)] = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(p)];
                    a[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)] = arq + s * (arp - tau * arq);
                    a[static_cast<std::size_t>(q)][static_cast<std::size_t>(r)] = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)];
                }
                for (int r = 0; r < n; ++r) {
                    const double vrp = v[static_cast<std::size_t>(r)][static_cast<std::size_t>(p)];
                    const double vrq = v[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)];
                    v[static_cast<std::size_t>(r)][static_cast<std::size_t>(p)] = vrp - s * (vrq + tau * vrp);
                    v[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
    if (sweep >= max_sweeps) throw std::runtime_error("jacobi_eigen: no convergence within the sweep budget");

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return a[static_cast<std::size_t>(x)][static_cast<std::size_t>(x)] <
               a[static_cast<std::size_t>(y)][static_cast<std::size_t>(y)];
    });
    out.sweeps = sweep;
    out.eigenvalues.reserve(static_cast<std::size_t>(n));
    out.eigenvectors.reserve(static_cast<std::size_t>(n));
    for (int k : order) {
        out.eigenvalues.push_back(a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)]);
        std::vector<double> col(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r) col[static_cast<std::size_t>(r)] = v[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
        out.eigenvectors.push_back(std::move(col));
    }
    return out;
}

/// Eigenvalues plus a PSD verdict at tolerance tol (scaled by the matrix
/// norm). An INDEFINITE verdict always carries a witness vector whose
/// quadratic form was re-verified negative in extended precision; if the
/// re-check disagrees the verdict degrades to INCONCLUSIVE.
inline SpectralReport symmetric_eigenvalues(const SymmetricMatrix<double>& m, double tol = 1e-9) {
    JacobiResult jr = jacobi_eigen(m);
    SpectralReport rep;
    rep.eigenvalues = jr.eigenvalues;
    rep.min_eigenvalue = jr.eigenvalues.front();
    rep.sweeps = jr.sweeps;
    rep.tol = tol * std::max(1.0, m.inf_norm());
    if (rep.min_eigenvalue >= -rep.tol) {
        rep.verdict = PsdVerdict::PSD;
    } else {
        const std::vector<double>& x = jr.eigenvectors.front();
        if (m.quadratic_form(x) < 0.0) {
            rep.verdict = PsdVerdict::INDEFINITE;
            rep.witness = x;
        } else {
            rep.verdict = PsdVerdict::INCONCLUSIVE;
        }
    }
    return rep;
}

}  // namespace affswor
