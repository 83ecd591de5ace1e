#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "nov/errors.hpp"
#include "nov/matrix.hpp"

using namespace nov;

namespace {

const Field& Q() {
    static Field f = rationals();
    return f;
}

Series mono(long c, const Rat& e) { return Series::monomial(Scalar::from_int(Q(), c), e); }

Mat random_mat(std::mt19937_64& rng, std::size_t r, std::size_t c, bool constant) {
    Mat m = mat::zeros(Q(), r, c);
    for (auto& row : m)
        for (auto& x : row) {
            long v = static_cast<long>(rng() % 7) - 3;
            Rat e = constant ? Rat(0) : make_rat(static_cast<long>(rng() % 5), 2);
            x = v == 0 ? Series::zero(Q()) : mono(v, e);
            if (!constant && rng() % 3 == 0) x += mono(1, e + 1);
        }
    return m;
}

// Leibniz formula over all permutations.
Series leibniz(const Mat& a) {
    const std::size_t n = a.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Series det = Series::zero(Q());
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        Series term = Series::one(Q());
        for (std::size_t i = 0; i < n; ++i) term = term * a[i][perm[i]];
        det = inversions % 2 ? det - term : det + term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

std::size_t rational_rank(const Mat& a) {
    std::vector<std::vector<Rat>> m;
    for (const auto& row : a) {
        std::vector<Rat> r;
        for (const auto& x : row) r.push_back(x.is_exact_zero() ? Rat(0) : x.terms().front().second.as_rat());
        m.push_back(r);
    }
    std::size_t rank = 0;
    const std::size_t cols = m.empty() ? 0 : m[0].size();
    for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
        std::size_t p = rank;
        while (p < m.size() && m[p][c] == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[rank]);
        for (std::size_t i = rank + 1; i < m.size(); ++i) {
            Rat f = m[i][c] / m[rank][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[rank][j];
        }
        ++rank;
    }
    return rank;
}

}  // namespace

TEST_CASE("determinant agrees with the Leibniz formula") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 30; ++t) {
        std::size_t n = 1 + rng() % 4;
        Mat a = random_mat(rng, n, n, false);
        CHECK(mat::determinant(a) == leibniz(a));
    }
}

TEST_CASE("matrix product is associative") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        Mat a = random_mat(rng, 3, 2, false), b = random_mat(rng, 2, 4, false), c = random_mat(rng, 4, 2, false);
        Mat l = mat::mul(mat::mul(a, b), c), r = mat::mul(a, mat::mul(b, c));
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 2; ++j) CHECK(l[i][j] == r[i][j]);
    }
}

TEST_CASE("valuation rank on constant matrices equals the rational rank") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 60; ++t) {
        std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
        Mat a = random_mat(rng, r, c, true);
        // Build dependent rows half of the time.
        if (r > 1 && rng() % 2) a[r - 1] = a[0];
        auto res = mat::valuation_rank(a, Rat(10));
        CHECK(res.resolved);
        CHECK(res.rank == rational_rank(a));
    }
}

TEST_CASE("valuation rank with T-adic entries") {
    Mat a = {{Series::one(Q()), mono(1, Rat(1))}, {mono(1, Rat(1)), mono(1, Rat(2))}};
    CHECK(mat::valuation_rank(a, Rat(10)).rank == 1);
    Mat b = {{mono(1, Rat(1)), Series::zero(Q())}, {Series::zero(Q()), mono(1, Rat(2))}};
    CHECK(mat::valuation_rank(b, Rat(10)).rank == 2);
    // Rank by the determinant oracle on random 3x3.
    std::mt19937_64 rng(4);
    for (int t = 0; t < 30; ++t) {
        Mat m = random_mat(rng, 3, 3, false);
        bool full = !mat::determinant(m).is_exact_zero();
        auto res = mat::valuation_rank(m, Rat(40));
        if (full) CHECK(res.rank == 3);
        else CHECK(res.rank < 3);
    }
}

TEST_CASE("capped solve leaves a residual above the cap") {
    std::mt19937_64 rng(5);
    const Rat cap(6);
    int solved = 0;
    for (int t = 0; t < 30; ++t) {
        Mat a = random_mat(rng, 3, 3, false);
        if (mat::determinant(a).is_exact_zero()) continue;
        Vec b = {mono(1, Rat(0)), mono(2, make_rat(1, 2)), mono(-1, Rat(1))};
        Vec x;
        try {
            x = mat::solve_capped(a, b, cap);
        } catch (const Error&) {
            continue;
        }
        ++solved;
        Vec r = mat::apply(a, x);
        // Truncation errors are amplified at most by the valuation of det a.
        const Rat loss = mat::determinant(a).valuation().get();
        for (std::size_t i = 0; i < 3; ++i) {
            Series diff = r[i] - b[i];
            if (!diff.is_exact_zero()) CHECK(diff.valuation().get() >= cap - loss);
        }
    }
    CHECK(solved > 10);
}
