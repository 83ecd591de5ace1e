#include <random>

#include "doctest.h"
#include "nov/coeff.hpp"
#include "nov/errors.hpp"

using namespace nov;

namespace {

// Brute-force roots of a polynomial with integer coefficients modulo p.
std::vector<long> brute_roots(const std::vector<long>& coeffs, long p) {
    std::vector<long> out;
    for (long x = 0; x < p; ++x) {
        long acc = 0;
        for (size_t i = coeffs.size(); i-- > 0;) acc = ((acc * x + coeffs[i]) % p + p) % p;
        if (acc == 0) out.push_back(x);
    }
    return out;
}

Scalar random_scalar(const Field& f, std::mt19937_64& rng) {
    std::vector<Rat> c;
    const long den_range = f->kind == FieldKind::FiniteField ? 1 : 5;
    for (int i = 0; i < f->degree; ++i)
        c.push_back(Rat(static_cast<long>(rng() % 21) - 10, static_cast<long>(rng() % den_range) + 1));
    for (auto& r : c) r.canonicalize();
    return Scalar::from_coords(f, c);
}

SPoly product(const std::vector<SPoly>& fs, const Field& f) {
    SPoly acc{Scalar::one(f)};
    for (const auto& g : fs) acc = spoly::mul(acc, g);
    return acc;
}

}  // namespace

TEST_CASE("reduce_mod_p examples") {
    CHECK(reduce_mod_p(GaussianRat(1), 5).to_string() == "1");
    // 1/2 mod 7 must be the brute-force inverse of 2.
    long inv2 = 0;
    for (long x = 1; x < 7; ++x)
        if (2 * x % 7 == 1) inv2 = x;
    CHECK(reduce_mod_p(GaussianRat(make_rat(1, 2)), 7).to_string() == std::to_string(inv2));
    auto roots = brute_roots({1, 0, 1}, 5);
    REQUIRE(roots.size() == 2);
    Scalar i5 = reduce_mod_p(GaussianRat(0, 1), 5);
    CHECK(i5.to_string() == std::to_string(roots.front()));
    CHECK((i5 * i5 + Scalar::one(i5.field())).is_zero());
}

TEST_CASE("reduction of i at p = 3 mod 4 extends by x^2+1") {
    Scalar i3 = reduce_mod_p(GaussianRat(0, 1), 3);
    CHECK(i3.field()->degree == 2);
    CHECK(describe(i3.field()) == "F_3[x]/(x^2 + 1)");
    CHECK((i3 * i3).to_string() == "2");
}

TEST_CASE("denominator divisible by p") {
    CHECK_THROWS_AS(reduce_mod_p(GaussianRat(make_rat(1, 7)), 7), Error);
    try {
        reduce_mod_p(GaussianRat(make_rat(1, 14)), 7);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DenominatorDivisibleByP);
    }
}

TEST_CASE("extend_field examples") {
    CHECK(brute_roots({1, 0, 1}, 3).empty());
    CHECK(extend_field(3, {1, 0, 1})->degree == 2);
    CHECK(brute_roots({2, 0, 1}, 5).empty());
    CHECK(extend_field(5, {2, 0, 1})->degree == 2);
    bool raised = false;
    try {
        extend_field(5, {1, 0, 1});
    } catch (const Error& e) {
        raised = e.code() == ErrorCode::ReduciblePolynomial;
    }
    CHECK(raised);
    // Degree-4 product of two irreducible quadratics without roots.
    bool raised4 = false;
    try {
        extend_field(3, {2, 2, 1, 2, 1});  // (x^2+1)(x^2+2x+2) over F_3
    } catch (const Error& e) {
        raised4 = e.code() == ErrorCode::ReduciblePolynomial;
    }
    CHECK(raised4);
}

TEST_CASE("field axioms on random triples") {
    std::mt19937_64 rng(7);
    std::vector<Field> fields = {rationals(), gaussian_rationals(), prime_field(7), extend_field(3, {1, 0, 1}),
                                 number_field({Rat(1), Rat(1), Rat(1)}, "w")};
    for (const auto& f : fields) {
        for (int trial = 0; trial < 40; ++trial) {
            Scalar a = random_scalar(f, rng), b = random_scalar(f, rng), c = random_scalar(f, rng);
            CHECK((a * b) * c == a * (b * c));
            CHECK((a + b) * c == a * c + b * c);
            CHECK(a * b == b * a);
            if (!a.is_zero()) CHECK((a * a.inverse()).is_one());
        }
    }
}

TEST_CASE("reduction is a ring map") {
    std::mt19937_64 rng(11);
    for (long p : {5L, 7L, 11L, 13L}) {
        for (int t = 0; t < 30; ++t) {
            GaussianRat x(make_rat(static_cast<long>(rng() % 9) - 4, static_cast<long>(rng() % 3) + 1),
                          make_rat(static_cast<long>(rng() % 9) - 4, 1));
            GaussianRat y(make_rat(static_cast<long>(rng() % 9) - 4, 1), make_rat(static_cast<long>(rng() % 9) - 4, 2));
            CHECK(reduce_mod_p(x * y, p) == reduce_mod_p(x, p) * reduce_mod_p(y, p));
            CHECK(reduce_mod_p(x + y, p) == reduce_mod_p(x, p) + reduce_mod_p(y, p));
        }
        CHECK(reduce_mod_p(GaussianRat(1), p).is_one());
    }
}

TEST_CASE("rational factorization reproduces the input") {
    const Field Q = rationals();
    std::vector<QPoly> cases = {
        {Rat(-1), 0, 0, 0, 1},           // x^4 - 1
        {Rat(6), 0, Rat(-5), 0, 1},      // (x^2-2)(x^2-3)
        {Rat(1), 0, Rat(-10), 0, 1},     // irreducible, splits mod every prime
        {Rat(-2), 0, 0, 1},              // x^3 - 2
        {Rat(-1), 0, 0, 0, 0, 0, 1},     // x^6 - 1
    };
    std::vector<size_t> expected_counts = {3, 2, 1, 1, 4};
    for (size_t k = 0; k < cases.size(); ++k) {
        auto facs = factor_rational(cases[k]);
        CHECK(facs.size() == expected_counts[k]);
        QPoly prod{Rat(1)};
        for (const auto& f : facs) prod = qpoly::mul(prod, f);
        CHECK(prod == qpoly::monic(cases[k]));
    }
}

TEST_CASE("factorization over Q(i) and Q(w)") {
    const Field K = gaussian_rationals();
    SPoly f = spoly::from_q(K, {Rat(-1), 0, 0, 0, 1});
    auto facs = factor_over(K, f);
    CHECK(facs.size() == 4);
    CHECK(product(facs, K) == f);
    const Field W = number_field({Rat(1), Rat(1), Rat(1)}, "w");
    SPoly g = spoly::from_q(W, {Rat(-1), 0, 0, 1});
    auto gf = factor_over(W, g);
    CHECK(gf.size() == 3);
    CHECK(product(gf, W) == g);
    // x^2 - 2 stays irreducible over Q(i).
    CHECK(factor_over(K, spoly::from_q(K, {Rat(-2), 0, 1})).size() == 1);
}

TEST_CASE("splitting fields by substitution oracle") {
    SPoly f = spoly::from_q(rationals(), {Rat(-2), 0, 0, 1});
    Splitting s = split_polynomial(rationals(), f);
    CHECK(s.embed.to->degree == 6);
    CHECK(s.roots.size() == 3);
    for (const auto& r : s.roots) CHECK((r * r * r - Scalar::from_int(r.field(), 2)).is_zero());
    // Roots of x^2 - 3 over Q(i): degree-4 field, and i maps to a square root of -1.
    SPoly g = spoly::from_q(gaussian_rationals(), {Rat(-3), 0, 1});
    Splitting t = split_polynomial(gaussian_rationals(), g);
    CHECK(t.embed.to->degree == 4);
    Scalar img = t.embed.image_of_gen;
    CHECK((img * img + Scalar::one(img.field())).is_zero());
    for (const auto& r : t.roots) CHECK((r * r - Scalar::from_int(r.field(), 3)).is_zero());
}

TEST_CASE("budget is enforced") {
    SPoly f = spoly::from_q(rationals(), {Rat(-2), 0, 0, 1});
    bool raised = false;
    try {
        split_polynomial(rationals(), f, 4);
    } catch (const Error& e) {
        raised = e.code() == ErrorCode::FieldBudgetExceeded;
    }
    CHECK(raised);
}

TEST_CASE("finite field factorization") {
    const Field F3 = prime_field(3);
    SPoly f = spoly::from_q(F3, {Rat(1), 0, 0, 0, 1});  // x^4 + 1
    auto facs = factor_over(F3, f);
    CHECK(facs.size() == 2);
    CHECK(product(facs, F3) == f);
    const Field F25 = extend_field(5, {2, 0, 1});
    SPoly g = spoly::from_q(F25, {Rat(-1), 0, 0, 1});  // x^3 - 1 splits over F_25
    CHECK(roots_in_field(F25, g).size() == 3);
    CHECK(roots_in_field(prime_field(5), spoly::from_q(prime_field(5), {Rat(-1), 0, 0, 1})).size() == 1);
}

TEST_CASE("gaussian parsing") {
    CHECK(parse_gaussian("3-2i").to_string() == "-2*i + 3");
    CHECK(parse_gaussian("-i") == GaussianRat(0, -1));
    CHECK(parse_gaussian("1/2") == GaussianRat(make_rat(1, 2)));
}
