#include <doctest.h>

#include <cmath>

#include "affswor/probability.hpp"
#include "affswor/rng.hpp"
#include "affswor/spectral.hpp"
#include "affswor/variance.hpp"

using namespace affswor;

namespace {

SymmetricMatrix<double> random_symmetric(int dim, RandomStream& rs) {
    SymmetricMatrix<double> m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) = 2.0 * rs.uniform01() - 1.0;
    return m;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("diagonal matrices return the sorted diagonal") {
    SymmetricMatrix<double> m(4);
    m(0, 0) = 3.0;
    m(1, 1) = -1.0;
    m(2, 2) = 0.5;
    m(3, 3) = 2.0;
    const auto rep = symmetric_eigenvalues(m);
    CHECK(rep.eigenvalues == std::vector<double>{-1.0, 0.5, 2.0, 3.0});
    CHECK(rep.min_eigenvalue == -1.0);
}

TEST_CASE("2x2 closed form") {
    SymmetricMatrix<double> m(2);
    m(0, 0) = 2.0;
    m(1, 1) = 2.0;
    m(1, 0) = 1.0;
    const auto rep = symmetric_eigenvalues(m);
    CHECK(rep.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(rep.verdict == PsdVerdict::PSD);
}

TEST_CASE("uniform-p Gamma spectrum matches (N+1)/(N(N-1)) and 1/(N(N-1))") {
    for (int N = 4; N <= 9; ++N) {
        const auto g = gamma_matrix(ProbabilityVector<Rational>::uniform(N)).to_float();
        const auto rep = symmetric_eigenvalues(g);
        const double lo = 1.0 / (static_cast<double>(N) * (N - 1));
        const double hi = (N + 1.0) / (static_cast<double>(N) * (N - 1));
        for (int i = 0; i < N - 2; ++i)
            CHECK(rep.eigenvalues[static_cast<std::size_t>(i)] == doctest::Approx(lo).epsilon(1e-12));
        CHECK(rep.eigenvalues.back() == doctest::Approx(hi).epsilon(1e-12));
        CHECK(rep.verdict == PsdVerdict::PSD);
    }
}

TEST_CASE("uniform-p Psi spectrum is {0, N/(N-1) repeated}") {
    for (int N = 4; N <= 9; ++N) {
        const auto rep = symmetric_eigenvalues(psi_matrix(ProbabilityVector<Rational>::uniform(N)).to_float());
        CHECK(std::abs(rep.eigenvalues.front()) < 1e-12);
        for (int i = 1; i < N; ++i)
            CHECK(rep.eigenvalues[static_cast<std::size_t>(i)] ==
                  doctest::Approx(static_cast<double>(N) / (N - 1)).epsilon(1e-12));
        CHECK(rep.verdict == PsdVerdict::PSD);
    }
}

TEST_CASE("indefinite matrices produce a re-verified witness") {
    SymmetricMatrix<double> m(3);
    m(0, 0) = 1.0;
    m(1, 1) = -2.0;
    m(2, 2) = 1.0;
    const auto rep = symmetric_eigenvalues(m);
    CHECK(rep.verdict == PsdVerdict::INDEFINITE);
    REQUIRE(rep.witness.has_value());
    CHECK(m.quadratic_form(*rep.witness) < 0.0);
}

TEST_CASE("trace and Frobenius norm are preserved, residuals vanish") {
    RandomStream rs(23);
    for (int rep = 0; rep < 20; ++rep) {
        const int dim = 2 + static_cast<int>(rs.below(9));
        const auto m = random_symmetric(dim, rs);
        const auto jr = jacobi_eigen(m);
        double trace = 0.0, fro2 = 0.0, sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            trace += m(i, i);
            for (int j = 0; j < dim; ++j) fro2 += m(i, j) * m(i, j);
        }
        for (double ev : jr.eigenvalues) {
            sum += ev;
            sum2 += ev * ev;
        }
        CHECK(sum == doctest::Approx(trace).epsilon(1e-11));
        CHECK(sum2 == doctest::Approx(fro2).epsilon(1e-11));
        // residual ||Mv - ev v|| for each pair
        for (int k = 0; k < dim; ++k) {
            const auto& v = jr.eigenvectors[static_cast<std::size_t>(k)];
            for (int i = 0; i < dim; ++i) {
                double mv = 0.0;
                for (int j = 0; j < dim; ++j) mv += m(i, j) * v[static_cast<std::size_t>(j)];
                CHECK(mv == doctest::Approx(jr.eigenvalues[static_cast<std::size_t>(k)] *
                                            v[static_cast<std::size_t>(i)])
                                .epsilon(1e-9)
                                .scale(1.0));
            }
        }
    }
}

TEST_CASE("verdict threshold scales with the matrix norm") {
    SymmetricMatrix<double> m(2);
    m(0, 0) = 1e6;
    m(1, 1) = -1e-5;  // tiny negative relative to the norm: still PSD at 1e-9 scaled
    auto rep = symmetric_eigenvalues(m, 1e-9);
    CHECK(rep.verdict == PsdVerdict::PSD);
    rep = symmetric_eigenvalues(m, 1e-13);
    CHECK(rep.verdict == PsdVerdict::INDEFINITE);
}

TEST_CASE("dimension checks") {
    CHECK_THROWS_AS(SymmetricMatrix<double>(0), std::domain_error);
    SymmetricMatrix<double> m(2);
    CHECK_THROWS_AS(m(2, 0), std::out_of_range);
}

}  // TEST_SUITE
