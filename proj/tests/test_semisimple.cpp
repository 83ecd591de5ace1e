#include <algorithm>
#include <functional>

#include "doctest.h"
#include "nov/errors.hpp"
#include "nov/potential.hpp"
#include "nov/random.hpp"
#include "nov/semisimple.hpp"

using namespace nov;

namespace {

const Field& Q() {
    static Field f = rationals();
    return f;
}

Series mono(const Field& f, const Rat& c, const Rat& e) { return Series::monomial(Scalar::from_rat(f, c), e); }
Series cst(const Field& f, const Rat& c) { return Series::constant(Scalar::from_rat(f, c)); }

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}

Series cut(const Series& s, const Rat& cap) {
    std::vector<Series::Term> kept;
    for (const auto& t : s.terms())
        if (t.first < cap) kept.push_back(t);
    return Series::from_terms(s.field(), std::move(kept));
}

bool vec_agrees_below(const Vec& a, const Vec& b, const Rat& cap) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(cut(a[i] - b[i], cap).is_exact_zero())) return false;
    return true;
}

void require_identities(const Algebra& A, const Vec& a, const IdempotentSplit& S, const Rat& Z) {
    SplitResiduals r = split_residuals(A, a, S);
    CHECK_FALSE(r.idempotent < ExtRat::of(Z));
    CHECK_FALSE(r.orthogonal < ExtRat::of(Z));
    CHECK_FALSE(r.unit_sum < ExtRat::of(Z));
    CHECK_FALSE(r.eigen < ExtRat::of(Z));
}

Vec random_element(Rng& rng, const Algebra& A) {
    Vec v;
    for (std::size_t i = 0; i < A.dim(); ++i) {
        Series s = Series::zero(A.field);
        for (int t = 0; t < 2; ++t)
            s += Series::monomial(Scalar::from_rat(A.field, rng.rational(-3, 3, 3)), rng.rational(-1, 2, 2));
        v.push_back(s);
    }
    return v;
}

// Idempotents of Λ[x]/(x^m - c T) for the element x, written down directly:
// e_l = (1/m) sum_k (x / r_l)^k where r_l runs over the m-th roots of cT.
std::vector<Vec> power_root_idempotents(const std::vector<Series>& roots, const Rat& cap) {
    const std::size_t m = roots.size();
    std::vector<Vec> out;
    for (const auto& r : roots) {
        const Field& F = r.field();
        Series inv = r.invert(cap + 4);
        Vec e;
        Series pw = Series::one(F);
        for (std::size_t k = 0; k < m; ++k) {
            e.push_back(cut(pw.scaled(Scalar::from_rat(F, make_rat(1, static_cast<long>(m)))), cap));
            pw = cut(pw * inv, cap + 4);
        }
        out.push_back(e);
    }
    return out;
}

bool same_up_to_order(const std::vector<Vec>& got, const std::vector<Vec>& want, const Rat& cap) {
    if (got.size() != want.size()) return false;
    std::vector<bool> used(want.size(), false);
    for (const auto& g : got) {
        bool hit = false;
        for (std::size_t j = 0; j < want.size() && !hit; ++j)
            if (!used[j] && vec_agrees_below(g, want[j], cap)) used[j] = hit = true;
        if (!hit) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("multiplication operators") {
    Algebra D = diagonal_algebra(Q(), 3);
    Mat I = mult_operator(D, D.unit);
    CHECK(mat::is_exact_zero(mat::sub(I, mat::identity(Q(), 3))));
    Vec a{cst(Q(), 1), mono(Q(), 2, make_rat(1, 2)), cst(Q(), -5)};
    Mat M = mult_operator(D, a);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(M[i][j] == (i == j ? a[i] : Series::zero(Q())));

    Rng rng(11);
    for (const Algebra& A : {projective_model(2), projective_model(3), clifford_from_hessian(mat::identity(Q(), 2))}) {
        CHECK(mat::is_exact_zero(mat::sub(mult_operator(A, A.unit), mat::identity(Q(), A.dim()))));
        for (int trial = 0; trial < 5; ++trial) {
            Vec x = random_element(rng, A), y = random_element(rng, A);
            Mat lhs = mult_operator(A, multiply(A, x, y));
            Mat rhs = mat::mul(mult_operator(A, x), mult_operator(A, y));
            CHECK(mat::is_exact_zero(mat::sub(lhs, rhs)));
        }
    }
}

TEST_CASE("characteristic polynomial against determinants") {
    Rng rng(5);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t n = 1 + trial % 4;
        Mat M = mat::zeros(Q(), n, n);
        for (auto& row : M)
            for (auto& e : row)
                if (rng.coin(2, 3)) e = mono(Q(), rng.rational(-4, 4, 3), rng.rational(0, 2, 2));
        std::vector<Series> f = characteristic_polynomial(M);
        REQUIRE(f.size() == n + 1);
        CHECK(f[n] == Series::one(Q()));
        for (long x = -2; x <= 2; ++x) {
            Series X = cst(Q(), x);
            Mat shifted = mat::sub(mat::scale(mat::identity(Q(), n), X), M);
            Series direct = mat::determinant(shifted);
            Series viaf = Series::zero(Q());
            for (std::size_t k = f.size(); k-- > 0;) viaf = viaf * X + f[k];
            CHECK(direct == viaf);
        }
    }
}

TEST_CASE("splitting small algebras") {
    SUBCASE("diagonal with distinct eigenvalues") {
        Algebra D = diagonal_algebra(Q(), 2);
        Vec a{cst(Q(), 1), cst(Q(), 2)};
        IdempotentSplit S = certify_semisimple(D, a, Rat(8));
        CHECK(same_up_to_order(S.idempotents, {{cst(Q(), 1), Series::zero(Q())}, {Series::zero(Q()), cst(Q(), 1)}}, Rat(8)));
        for (const auto& l : S.levels) CHECK(l == 0);
        require_identities(D, a, S, Rat(8));
    }
    SUBCASE("x*x = T in a non-idempotent basis") {
        Algebra A = quotient_algebra({mono(Q(), 1, 1), Series::zero(Q())});
        Vec x{Series::zero(Q()), cst(Q(), 1)};
        IdempotentSplit S = certify_semisimple(A, x, Rat(8));
        REQUIRE(S.eigenvalues.size() == 2);
        std::vector<Vec> want{{cst(Q(), make_rat(1, 2)), mono(Q(), make_rat(1, 2), make_rat(-1, 2))},
                              {cst(Q(), make_rat(1, 2)), mono(Q(), make_rat(-1, 2), make_rat(-1, 2))}};
        CHECK(same_up_to_order(S.idempotents, want, Rat(8)));
        for (const auto& l : S.levels) CHECK(l == make_rat(1, 2));
        for (const auto& lam : S.eigenvalues) CHECK(lam * lam == mono(Q(), 1, 1));
        require_identities(A, x, S, Rat(8));
    }
    SUBCASE("projective plane model needs cube roots of unity") {
        Algebra A = projective_model(2);
        Vec a = projective_chern_class(2);
        IdempotentSplit S = certify_semisimple(A, a, Rat(8));
        CHECK(S.field->degree == 2);
        REQUIRE(S.eigenvalues.size() == 3);
        for (const auto& lam : S.eigenvalues) {
            CHECK(lam.valuation().get() == make_rat(1, 3));
            CHECK(lam * lam * lam == Series::monomial(Scalar::from_int(S.field, 27), Rat(1)));
        }
        CHECK(same_up_to_order(S.idempotents, power_root_idempotents(
                                                  [&] {
                                                      std::vector<Series> r;
                                                      for (const auto& l : S.eigenvalues)
                                                          r.push_back(l.scaled(Scalar::from_rat(S.field, make_rat(1, 3))));
                                                      return r;
                                                  }(),
                                                  Rat(8)),
                               Rat(8)));
        for (const auto& l : S.levels) CHECK(l == make_rat(2, 3));
        require_identities(A, a, S, Rat(8));
    }
    SUBCASE("eigenvalues sharing a leading term") {
        // (x - (1+T)) (x - (1+2T)) = x^2 - (2+3T) x + (1+3T+2T^2)
        Vec relation{-(cst(Q(), 1) + mono(Q(), 3, 1) + mono(Q(), 2, 2)), cst(Q(), 2) + mono(Q(), 3, 1)};
        Algebra A = quotient_algebra(relation);
        Vec x{Series::zero(Q()), cst(Q(), 1)};
        IdempotentSplit S = certify_semisimple(A, x, Rat(6));
        std::vector<Series> want{cst(Q(), 1) + mono(Q(), 1, 1), cst(Q(), 1) + mono(Q(), 2, 1)};
        REQUIRE(S.eigenvalues.size() == 2);
        for (const auto& lam : S.eigenvalues)
            CHECK(std::any_of(want.begin(), want.end(), [&](const Series& w) { return lam == w; }));
        CHECK_FALSE(S.eigenvalues[0] == S.eigenvalues[1]);
        // e = (x - other) / (this - other): coordinates have valuation -1.
        for (const auto& l : S.levels) CHECK(l == 1);
        require_identities(A, x, S, Rat(6));
    }
    SUBCASE("critical values of the projective plane") {
        CriticalSet C = critical_points(build_ghv(cp_polytope(2), BulkDeformation::trivial(3)), Rat(6));
        REQUIRE(C.points.size() == 3);
        Algebra D = diagonal_algebra(C.field, 3);
        Vec a;
        for (const auto& p : C.points) a.push_back(cut(p.value, p.value_precision));
        IdempotentSplit S = certify_semisimple(D, a, Rat(6));
        std::vector<Vec> coord;
        for (std::size_t i = 0; i < 3; ++i) {
            Vec e(3, Series::zero(S.field));
            e[i] = Series::one(S.field);
            coord.push_back(e);
        }
        CHECK(same_up_to_order(S.idempotents, coord, Rat(6)));
    }
}

TEST_CASE("semisimplicity failures") {
    Algebra D = diagonal_algebra(Q(), 2);
    CHECK(code_of([&] { certify_semisimple(D, {cst(Q(), 1), cst(Q(), 1)}, Rat(4)); }) == ErrorCode::RepeatedEigenvalue);
    CHECK(code_of([&] { discriminant_valuation(D, {cst(Q(), 3), cst(Q(), 3)}); }) ==
          ErrorCode::DiscriminantZeroToPrecision);
    CHECK(code_of([&] { certify_semisimple(D, {Series::zero(Q()), cst(Q(), 1)}, Rat(4)); }) == ErrorCode::ZeroEigenvalue);
    // x^2 = 0 has a nilpotent, so no element has distinct eigenvalues.
    Algebra N = quotient_algebra({Series::zero(Q()), Series::zero(Q())});
    CHECK(code_of([&] { certify_semisimple(N, {cst(Q(), 1), cst(Q(), 1)}, Rat(4)); }) == ErrorCode::RepeatedEigenvalue);
}

TEST_CASE("discriminants") {
    Algebra D = diagonal_algebra(Q(), 2);
    DiscriminantReport d = discriminant_valuation(D, {cst(Q(), 1), cst(Q(), 2)});
    CHECK(d.discriminant == cst(Q(), 1));
    CHECK(d.valuation == 0);
    CHECK(d.small_primes.empty());

    DiscriminantReport c1 = discriminant_valuation(projective_model(1), projective_chern_class(1));
    CHECK(c1.discriminant == mono(Q(), 16, 1));
    CHECK(c1.valuation == 1);
    CHECK(c1.small_primes == std::vector<std::int64_t>{2});

    // Product of squared root differences for x^3 = 27T: -27 * 27^2 T^2.
    DiscriminantReport c2 = discriminant_valuation(projective_model(2), projective_chern_class(2));
    CHECK(c2.discriminant == mono(Q(), -27 * 729, 2));
    CHECK(c2.small_primes == std::vector<std::int64_t>{3});

    // Against the squared differences of known eigenvalues.
    Vec a{cst(Q(), 3), mono(Q(), -1, make_rat(1, 2)), mono(Q(), 2, 1)};
    Series want = Series::one(Q());
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) want *= (a[i] - a[j]) * (a[i] - a[j]);
    CHECK(discriminant_valuation(diagonal_algebra(Q(), 3), a).discriminant == want);
}

TEST_CASE("transfer to positive characteristic") {
    SUBCASE("diagonal") {
        Algebra D = diagonal_algebra(Q(), 2);
        TransferReport t = mod_p_transfer(D, {cst(Q(), 1), cst(Q(), 2)}, 5, Rat(8));
        const Field F5 = t.reduced.field;
        CHECK(characteristic(F5) == 5);
        Vec e1{Series::one(F5), Series::zero(F5)}, e2{Series::zero(F5), Series::one(F5)};
        CHECK(same_up_to_order(t.reduced.idempotents, {e1, e2}, Rat(100)));
        CHECK(t.levels_match);
    }
    for (int n : {1, 2}) {
        Algebra A = projective_model(n);
        Vec a = projective_chern_class(n);
        for (std::int64_t p : {5, 7, 11, 13}) {
            CAPTURE(n);
            CAPTURE(p);
            TransferReport t = mod_p_transfer(A, a, p, Rat(8));
            CHECK(characteristic(t.reduced.field) == p);
            CHECK(t.levels_match);
            for (const auto& l : t.reduced.levels) CHECK(l == make_rat(n, n + 1));
            Algebra Ap = reduce_algebra(map_algebra(A, t.characteristic_zero.embed), p);
            Vec ap;
            for (const auto& c : a) ap.push_back(c.map(t.characteristic_zero.embed).reduce_mod_p(p));
            require_identities(Ap, ap, t.reduced, Rat(8));
            // Reduction of the characteristic-zero splitting agrees up to order.
            std::vector<Vec> reduced0;
            for (const auto& e : t.characteristic_zero.idempotents) reduced0.push_back(reduce_vector(mat::truncate(e, Rat(8)), p));
            CHECK(same_up_to_order(t.reduced.idempotents, reduced0, Rat(8) - make_rat(n, n + 1)));
            // Direct solve over the prime field when it already contains the roots.
            if (n == 1 || p % 3 == 1) {
                Algebra direct = reduce_algebra(A, p);
                Vec ad = reduce_vector(a, p);
                IdempotentSplit S = certify_semisimple(direct, ad, Rat(8));
                for (const auto& l : S.levels) CHECK(l == make_rat(n, n + 1));
                REQUIRE(S.field == t.reduced.field);
                CHECK(same_up_to_order(S.idempotents, t.reduced.idempotents, Rat(8) - make_rat(n, n + 1)));
            }
        }
        CHECK(code_of([&] { mod_p_transfer(A, a, 2, Rat(8)); }) == ErrorCode::PrimeTooSmall);
    }
    CHECK(code_of([&] { mod_p_transfer(projective_model(2), projective_chern_class(2), 3, Rat(8)); }) ==
          ErrorCode::PrimeTooSmall);
    // A denominator of 1/7 in the element blocks p = 7.
    Algebra D = diagonal_algebra(Q(), 2);
    CHECK(code_of([&] { mod_p_transfer(D, {cst(Q(), make_rat(1, 7)), cst(Q(), 2)}, 7, Rat(4)); }) ==
          ErrorCode::PrimeTooSmall);
}

TEST_CASE("Clifford algebras from Hessians") {
    SUBCASE("one variable") {
        Mat H{{mono(Q(), 2, make_rat(1, 2))}};
        Algebra C = clifford_from_hessian(H);
        REQUIRE(C.dim() == 2);
        CHECK(C.labels == std::vector<std::string>{"1", "x1"});
        CHECK(C.product[1][1][0] == mono(Q(), 1, make_rat(1, 2)));
        CHECK(C.product[1][1][1].is_exact_zero());
        CHECK(check_algebra(C).ok);
    }
    SUBCASE("identity form") {
        Algebra C = clifford_from_hessian(mat::identity(Q(), 2));
        REQUIRE(C.dim() == 4);
        // x1 x2 = x12 and x2 x1 = -x12.
        CHECK(C.product[1][2][3] == cst(Q(), 1));
        CHECK(C.product[2][1][3] == cst(Q(), -1));
        CHECK(C.product[1][1][0] == cst(Q(), make_rat(1, 2)));
        CHECK(check_algebra(C, false).ok);
        CHECK_FALSE(check_algebra(C, true).ok);
    }
    SUBCASE("anticommutators on random forms") {
        Rng rng(3);
        for (int trial = 0; trial < 3; ++trial) {
            Mat H = mat::zeros(Q(), 3, 3);
            for (std::size_t i = 0; i < 3; ++i) {
                H[i][i] = mono(Q(), rng.rational(1, 4, 2), rng.rational(0, 1, 2));
                for (std::size_t j = 0; j < i; ++j) H[i][j] = H[j][i] = mono(Q(), rng.rational(-2, 2, 2), 1);
            }
            Algebra C = clifford_from_hessian(H);
            CHECK(check_algebra(C, false).ok);
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j) {
                    Vec xi = C.product[0][1u << i], xj = C.product[0][1u << j];
                    Vec s = multiply(C, xi, xj);
                    Vec t = multiply(C, xj, xi);
                    for (std::size_t k = 0; k < 8; ++k) CHECK(s[k] + t[k] == (k == 0 ? H[i][j] : Series::zero(Q())));
                }
        }
    }
    CHECK(code_of([&] { clifford_from_hessian(mat::zeros(Q(), 2, 2)); }) == ErrorCode::DegenerateForm);
}
