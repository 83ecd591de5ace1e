#include "nov/matrix.hpp"

#include "nov/errors.hpp"

namespace nov::mat {

namespace {

Series cut(const Series& s, const Rat& cap) {
    std::vector<Series::Term> kept;
    for (const auto& t : s.terms())
        if (t.first < cap) kept.push_back(t);
    return Series::from_terms(s.field(), std::move(kept));
}

const Field& field_of(const Mat& a) {
    if (a.empty() || a.front().empty()) fail(ErrorCode::InvalidArgument, "empty matrix has no field");
    return a.front().front().field();
}

}  // namespace

Mat zeros(const Field& f, std::size_t r, std::size_t c) { return Mat(r, Vec(c, Series::zero(f))); }

Mat identity(const Field& f, std::size_t n) {
    Mat m = zeros(f, n, n);
    for (std::size_t i = 0; i < n; ++i) m[i][i] = Series::one(f);
    return m;
}

std::size_t rows(const Mat& a) { return a.size(); }
std::size_t cols(const Mat& a) { return a.empty() ? 0 : a.front().size(); }

Mat mul(const Mat& a, const Mat& b) {
    if (cols(a) != rows(b)) fail(ErrorCode::InvalidArgument, "matrix shapes do not compose");
    if (rows(a) == 0 || cols(b) == 0) return Mat(rows(a), Vec(cols(b)));
    const Field& f = rows(b) ? field_of(b) : field_of(a);
    Mat c = zeros(f, rows(a), cols(b));
    for (std::size_t i = 0; i < rows(a); ++i)
        for (std::size_t k = 0; k < cols(a); ++k) {
            if (a[i][k].is_exact_zero()) continue;
            for (std::size_t j = 0; j < cols(b); ++j)
                if (!b[k][j].is_exact_zero()) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

Mat add(const Mat& a, const Mat& b) {
    if (rows(a) != rows(b) || cols(a) != cols(b)) fail(ErrorCode::InvalidArgument, "matrix shapes differ");
    Mat c = a;
    for (std::size_t i = 0; i < rows(a); ++i)
        for (std::size_t j = 0; j < cols(a); ++j) c[i][j] += b[i][j];
    return c;
}

Mat sub(const Mat& a, const Mat& b) {
    if (rows(a) != rows(b) || cols(a) != cols(b)) fail(ErrorCode::InvalidArgument, "matrix shapes differ");
    Mat c = a;
    for (std::size_t i = 0; i < rows(a); ++i)
        for (std::size_t j = 0; j < cols(a); ++j) c[i][j] -= b[i][j];
    return c;
}

Mat scale(const Mat& a, const Series& s) {
    Mat c = a;
    for (auto& row : c)
        for (auto& x : row) x = x * s;
    return c;
}

Mat transpose(const Mat& a) {
    Mat t(cols(a), Vec(rows(a)));
    for (std::size_t i = 0; i < rows(a); ++i)
        for (std::size_t j = 0; j < cols(a); ++j) t[j][i] = a[i][j];
    return t;
}

Vec apply(const Mat& a, const Vec& v) {
    if (cols(a) != v.size()) fail(ErrorCode::InvalidArgument, "matrix and vector shapes differ");
    Vec out;
    out.reserve(rows(a));
    for (std::size_t i = 0; i < rows(a); ++i) {
        Series acc = Series::zero(v.empty() ? field_of(a) : v.front().field());
        for (std::size_t j = 0; j < v.size(); ++j)
            if (!a[i][j].is_exact_zero() && !v[j].is_exact_zero()) acc += a[i][j] * v[j];
        out.push_back(acc);
    }
    return out;
}

bool is_exact_zero(const Mat& a) {
    for (const auto& row : a)
        for (const auto& x : row)
            if (!x.is_exact_zero()) return false;
    return true;
}

Mat truncate(const Mat& a, const Rat& cap) {
    Mat c = a;
    for (auto& row : c)
        for (auto& x : row) x = cut(x, cap);
    return c;
}

Vec truncate(const Vec& v, const Rat& cap) {
    Vec out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(cut(x, cap));
    return out;
}

Mat reduce_mod_p(const Mat& a, std::int64_t p) {
    Mat c = a;
    for (auto& row : c)
        for (auto& x : row) x = x.reduce_mod_p(p);
    return c;
}

Mat map(const Mat& a, const Embedding& e) {
    Mat c = a;
    for (auto& row : c)
        for (auto& x : row) x = x.map(e);
    return c;
}

Series determinant(const Mat& a) {
    const std::size_t n = rows(a);
    if (n != cols(a)) fail(ErrorCode::InvalidArgument, "determinant of a non-square matrix");
    if (n == 0) fail(ErrorCode::InvalidArgument, "determinant of an empty matrix");
    if (n == 1) return a[0][0];
    Series det = Series::zero(field_of(a));
    for (std::size_t j = 0; j < n; ++j) {
        if (a[0][j].is_exact_zero()) continue;
        Mat minor;
        for (std::size_t i = 1; i < n; ++i) {
            Vec row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(a[i][k]);
            minor.push_back(std::move(row));
        }
        Series term = a[0][j] * determinant(minor);
        det = j % 2 == 0 ? det + term : det - term;
    }
    return det;
}

RankResult valuation_rank(Mat a, const Rat& target) {
    RankResult res;
    const std::size_t r = rows(a), c = cols(a);
    std::vector<bool> row_used(r, false), col_used(c, false);
    for (;;) {
        std::size_t pi = r, pj = c;
        Rat best;
        for (std::size_t i = 0; i < r; ++i) {
            if (row_used[i]) continue;
            for (std::size_t j = 0; j < c; ++j) {
                if (col_used[j] || a[i][j].terms().empty()) continue;
                Rat v = a[i][j].terms().front().first;
                if (pi == r || v < best) {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if (pi == r) break;
        row_used[pi] = col_used[pj] = true;
        res.pivots.emplace_back(pi, pj);
        ++res.rank;
        const Series inv = a[pi][pj].invert(target);
        for (std::size_t i = 0; i < r; ++i) {
            if (row_used[i] || a[i][pj].is_exact_zero()) continue;
            const Series factor = a[i][pj] * inv;
            for (std::size_t j = 0; j < c; ++j)
                if (!col_used[j] || j == pj) a[i][j] -= factor * a[pi][j];
            a[i][pj] = Series::zero(a[i][pj].field());
        }
    }
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            if (!row_used[i] && !col_used[j] && !a[i][j].is_exact_zero()) res.resolved = false;
    return res;
}

Vec solve_capped(Mat a, Vec b, const Rat& cap) {
    const std::size_t n = rows(a);
    if (n != cols(a) || b.size() != n) fail(ErrorCode::InvalidArgument, "solve needs a square system");
    std::vector<std::size_t> order;
    std::vector<bool> used(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t pi = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i] || a[i][j].terms().empty()) continue;
            if (pi == n || a[i][j].terms().front().first < a[pi][j].terms().front().first) pi = i;
        }
        if (pi == n) fail(ErrorCode::NotInvertible, "singular system");
        used[pi] = true;
        order.push_back(pi);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == pi || a[i][j].terms().empty()) continue;
            const Rat vi = a[i][j].terms().front().first;
            // factor = a_ij / a_pj, accurate up to exponent cap
            const Series factor = cut(a[i][j] * a[pi][j].invert(cap - vi), cap);
            for (std::size_t k = j; k < n; ++k)
                if (!a[pi][k].is_exact_zero()) a[i][k] = cut(a[i][k] - factor * a[pi][k], cap);
            a[i][j] = Series::zero(a[i][j].field());
            if (!b[pi].is_exact_zero()) b[i] = cut(b[i] - factor * b[pi], cap);
        }
    }
    Vec x(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t pi = order[j];
        const Rat vb = b[pi].terms().empty() ? cap : b[pi].terms().front().first;
        x[j] = cut(b[pi] * a[pi][j].invert(cap - vb), cap);
    }
    return x;
}

}  // namespace nov::mat
