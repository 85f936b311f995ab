#include <doctest.h>

#include <array>
#include <map>

#include "affswor/design.hpp"
#include "affswor/polytope.hpp"
#include "affswor/verify.hpp"

using namespace affswor;

namespace {
const std::vector<Rational> kExampleP{Rational(83, 200), Rational(1, 4), Rational(1, 4), Rational(17, 200)};
}

TEST_SUITE("design") {

TEST_CASE("existence check") {
    SUBCASE("uniform is interior for every n") {
        for (int N = 3; N <= 8; ++N) {
            for (int n = 2; n < N; ++n) {
                const auto chk = existence_check(ProbabilityVector<Rational>::uniform(N), n);
                CHECK(chk.feasible);
                CHECK(chk.margin == Rational(n, N) - Rational(n - 1, N - 1));
                CHECK(chk.margin > 0);
            }
        }
    }
    SUBCASE("the worked example clears 1/3 by 1/600") {
        const auto chk = existence_check(ProbabilityVector<Rational>(kExampleP), 2);
        CHECK(chk.feasible);
        CHECK(chk.margin == Rational(67, 200) - Rational(1, 3));
        CHECK(chk.margin == Rational(1, 600));
    }
    SUBCASE("a concentrated vector fails") {
        const ProbabilityVector<double> p({0.7, 0.1, 0.1, 0.1});
        const auto chk = existence_check(p, 2);
        CHECK_FALSE(chk.feasible);
        CHECK(chk.margin == doctest::Approx(0.2 - 1.0 / 3).epsilon(1e-12));
        CHECK_THROWS_AS(AffineDesign<double>(p, 2), InfeasibleDesign);
        try {
            AffineDesign<double> d(p, 2);
        } catch (const InfeasibleDesign& e) {
            CHECK(e.violating_subset == std::vector<int>{1, 2});
        }
    }
    SUBCASE("n out of range") {
        const auto p = ProbabilityVector<Rational>::uniform(4);
        CHECK_THROWS_AS(existence_check(p, 1), std::domain_error);
        CHECK_THROWS_AS(existence_check(p, 4), std::domain_error);
    }
}

TEST_CASE("joint pmf reproduces the worked pairwise matrix") {
    const AffineDesign<Rational> d(ProbabilityVector<Rational>(kExampleP), 2);
    const std::array<std::array<long, 4>, 4> expect{{{0, 199, 199, 100}, {199, 0, 100, 1}, {199, 100, 0, 1}, {100, 1, 1, 0}}};
    for (int u = 0; u < 4; ++u) {
        for (int v = 0; v < 4; ++v) {
            const int tuple[2] = {u, v};
            CHECK(d.joint_pmf(tuple) == Rational(expect[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)], 1200));
            CHECK(d.bivariate_marginal(u, v) ==
                  Rational(expect[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)], 1200));
        }
    }
    const int bad[2] = {0, 4};
    CHECK_THROWS_AS(d.joint_pmf(bad), std::out_of_range);
    CHECK_THROWS_AS(d.bivariate_marginal(-1, 0), std::out_of_range);
}

TEST_CASE("repeated labels carry zero mass") {
    const AffineDesign<Rational> d(ProbabilityVector<Rational>::uniform(5), 3);
    const int rep[3] = {2, 2, 4};
    CHECK(d.joint_pmf(rep) == 0);
}

TEST_CASE("exchangeability and normalization, exact") {
    RandomStream rs(11);
    for (int N = 4; N <= 6; ++N) {
        for (int n = 2; n <= 3; ++n) {
            const auto p = random_feasible_rational(N, n, rs);
            const AffineDesign<Rational> d(p, n);
            Rational total = 0;
            d.for_each_support([&](std::span<const int> tuple, const Rational& pr) {
                total += pr;
                CHECK(pr >= 0);
                // any transposition leaves the pmf unchanged
                std::vector<int> swapped(tuple.begin(), tuple.end());
                std::swap(swapped.front(), swapped.back());
                CHECK(d.joint_pmf(swapped) == pr);
            });
            CHECK(total == 1);
        }
    }
}

TEST_CASE("subset weights") {
    SUBCASE("uniform p gives 1/C(N,n)") {
        for (int N = 4; N <= 7; ++N) {
            const AffineDesign<Rational> d(ProbabilityVector<Rational>::uniform(N), 3);
            const auto ws = d.subset_weights();
            CHECK(ws.size() == static_cast<std::size_t>(binomial(N, 3).convert_to<long long>()));
            for (const auto& w : ws) CHECK(w.q == Rational(1, binomial(N, 3)));
        }
    }
    SUBCASE("worked example, F = {2,4}") {
        const AffineDesign<Rational> d(ProbabilityVector<Rational>(kExampleP), 2);
        for (const auto& w : d.subset_weights())
            if (w.subset == std::vector<int>{1, 3}) CHECK(w.q == Rational(1, 600));
    }
    SUBCASE("properties (a)-(c) on random feasible p") {
        RandomStream rs(13);
        for (int rep = 0; rep < 5; ++rep) {
            const int N = 5 + static_cast<int>(rs.below(3));
            const int n = 2 + static_cast<int>(rs.below(2));
            const auto p = random_feasible_rational(N, n, rs);
            const AffineDesign<Rational> d(p, n);
            Rational total = 0;
            std::vector<Rational> per_label(static_cast<std::size_t>(N), Rational(0));
            for (const auto& w : d.subset_weights()) {
                CHECK(w.q >= 0);
                total += w.q;
                for (int i : w.subset) per_label[static_cast<std::size_t>(i)] += w.q;
            }
            CHECK(total == 1);
            for (int i = 0; i < N; ++i) CHECK(per_label[static_cast<std::size_t>(i)] == n * p[i]);
        }
    }
}

TEST_CASE("bivariate marginal row sums recover p") {
    RandomStream rs(17);
    const auto p = random_feasible_rational(6, 3, rs);
    const AffineDesign<Rational> d(p, 3);
    for (int u = 0; u < 6; ++u) {
        Rational row = 0;
        for (int v = 0; v < 6; ++v) row += d.bivariate_marginal(u, v);
        CHECK(row == p[u]);
        CHECK(d.bivariate_marginal(u, u) == 0);
    }
}

TEST_CASE("k-marginals") {
    SUBCASE("k = n is the joint pmf; k = 1 is p_u") {
        const AffineDesign<Rational> d(ProbabilityVector<Rational>(kExampleP), 2);
        const int t2[2] = {0, 3};
        CHECK(d.k_marginal(2, t2) == d.joint_pmf(t2));
        for (int u = 0; u < 4; ++u) {
            const int t1[1] = {u};
            CHECK(d.k_marginal(1, t1) == kExampleP[static_cast<std::size_t>(u)]);
        }
        CHECK_THROWS_AS(d.k_marginal(3, t2), std::domain_error);
    }
    SUBCASE("uniform N=5, n=3: two-dimensional marginal is 1/20") {
        const AffineDesign<Rational> d(ProbabilityVector<Rational>::uniform(5), 3);
        const int t[2] = {0, 1};
        CHECK(d.k_marginal(2, t) == Rational(1, 20));
    }
    SUBCASE("closed form equals marginal summation of the joint pmf") {
        RandomStream rs(19);
        for (int N = 4; N <= 6; ++N) {
            const int n = 3;
            const auto p = random_feasible_rational(N, n, rs);
            const AffineDesign<Rational> d(p, n);
            for (int k = 1; k < n; ++k) {
                std::map<std::vector<int>, Rational> sums;
                d.for_each_support([&](std::span<const int> tuple, const Rational& pr) {
                    sums[std::vector<int>(tuple.begin(), tuple.begin() + k)] += pr;
                });
                for (const auto& [prefix, sum] : sums) CHECK(sum == d.k_marginal(k, prefix));
            }
        }
    }
}

TEST_CASE("on-facet input has an exactly vanishing minimizing tuple") {
    // the Theorem 7 point sits exactly on a facet of T_{N,2}
    const auto ce = theorem7_counterexample(5);
    const auto chk = existence_check(ce.p, 2);
    CHECK(chk.feasible);
    CHECK(chk.margin == 0);
    const AffineDesign<Rational> d(ce.p, 2);
    const int minimizing[2] = {chk.min_subset[0], chk.min_subset[1]};
    CHECK(d.joint_pmf(minimizing) == 0);
}

TEST_CASE("float mode tracks rational mode and clamps facet noise") {
    const ProbabilityVector<Rational> pr(kExampleP);
    const AffineDesign<Rational> dr(pr, 2);
    const AffineDesign<double> df(pr.to_float(), 2);
    for (int u = 0; u < 4; ++u)
        for (int v = 0; v < 4; ++v)
            CHECK(df.bivariate_marginal(u, v) ==
                  doctest::Approx(to_double(dr.bivariate_marginal(u, v))).epsilon(1e-14));

    // vertex coordinates in floating point land within 1e-16 of the facet;
    // the pmf of the minimizing tuple must come out exactly 0, not -1e-17
    const auto ce = theorem7_counterexample(6);
    const AffineDesign<double> db(ce.p.to_float(), 2);
    const auto chk = existence_check(ce.p.to_float(), 2);
    CHECK(chk.feasible);
    const int minimizing[2] = {chk.min_subset[0], chk.min_subset[1]};
    CHECK(db.joint_pmf(minimizing) >= 0.0);
    CHECK(db.joint_pmf(minimizing) <= 1e-15);
}

TEST_CASE("support enumeration cap") {
    const AffineDesign<Rational> d(ProbabilityVector<Rational>::uniform(6), 3);
    CHECK(d.support_size() == 120);
    CHECK_THROWS_AS(d.for_each_support([](std::span<const int>, const Rational&) {}, 10), std::length_error);
}

}  // TEST_SUITE
