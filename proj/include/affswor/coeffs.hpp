#pragma once

#include <array>
#include <stdexcept>

#include "affswor/numeric.hpp"

namespace affswor {

/// The scheme constants A_{N,k}, B_{N,k} for a population of size N and a
/// marginal order k:
///
///   A_{N,k} = -(k-1) (N-k-1)! / (N-1)!
///   B_{N,k} =        (N-k-1)! / (N-2)!
///
/// together with the tilde variants A~ = k! A and B~ = k! B. All four are kept
/// as exact rationals; conversion to floating point happens only at module
/// boundaries via to_double().
struct CoeffPair {
    int n_pop = 0;  // N
    int k = 0;
    Rational a;        // A_{N,k} < 0
    Rational b;        // B_{N,k} > 0
    Rational a_tilde;  // k! * A_{N,k}
    Rational b_tilde;  // k! * B_{N,k}

    /// -A/B, the feasibility threshold (k-1)/(N-1).
    Rational threshold() const { return -a / b; }
};

/// The formulas put N-2 in a denominator, so N <= 2 has no meaning; k ranges
/// over 2..N-1. Extending to k = 1 gives A = 0, B = 1 (the univariate
/// marginal), which design.k_marginal relies on.
inline CoeffPair coeff_pair(int n_pop, int k) {
    if (n_pop < 3) throw std::domain_error("coeff_pair: population size must be at least 3");
    if (k < 2 || k > n_pop - 1) throw std::domain_error("coeff_pair: order k must satisfy 2 <= k <= N-1");
    const BigInt tail = factorial(n_pop - k - 1);
    CoeffPair c;
    c.n_pop = n_pop;
    c.k = k;
    c.a = -Rational(BigInt(k - 1) * tail, factorial(n_pop - 1));
    c.b = Rational(tail, factorial(n_pop - 2));
    const BigInt kf = factorial(k);
    c.a_tilde = c.a * kf;
    c.b_tilde = c.b * kf;
    return c;
}

enum class IdentityStatus { Holds, Fails, NotApplicable };

/// Combinatorial identities tying the coefficients together:
///   1. A~_{N,k} C(N,k)     + B~_{N,k} C(N-1,k-1) = 1
///   2. A~_{N,k} C(N-1,k-1) + B~_{N,k} C(N-2,k-2) = 0
///   3. B~_{N,k} C(N-2,k-1) = k
///   4. B_{N,k} (N-k) = B_{N,k-1}            (needs k >= 3)
///   5. A_{N,k} (N-k+1) + B_{N,k} = A_{N,k-1} (needs k >= 3)
/// Identities 4-5 reference order k-1, which only exists for k-1 >= 2; out of
/// range they report NotApplicable rather than an error.
inline std::array<IdentityStatus, 5> verify_identities(int n_pop, int k) {
    const CoeffPair c = coeff_pair(n_pop, k);
    auto check = [](bool ok) { return ok ? IdentityStatus::Holds : IdentityStatus::Fails; };
    std::array<IdentityStatus, 5> out{};
    out[0] = check(c.a_tilde * binomial(n_pop, k) + c.b_tilde * binomial(n_pop - 1, k - 1) == 1);
    out[1] = check(c.a_tilde * binomial(n_pop - 1, k - 1) + c.b_tilde * binomial(n_pop - 2, k - 2) == 0);
    out[2] = check(c.b_tilde * binomial(n_pop - 2, k - 1) == k);
    if (k >= 3) {
        const CoeffPair prev = coeff_pair(n_pop, k - 1);
        out[3] = check(c.b * (n_pop - k) == prev.b);
        out[4] = check(c.a * (n_pop - k + 1) + c.b == prev.a);
    } else {
        out[3] = out[4] = IdentityStatus::NotApplicable;
    }
    return out;
}

}  // namespace affswor
