#include "nov/semisimple.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "nov/errors.hpp"

namespace nov {

namespace {

using SeriesPoly = std::vector<Series>;  // coefficients from degree 0 up

Series cut(const Series& s, const Rat& cap) {
    std::vector<Series::Term> kept;
    for (const auto& t : s.terms())
        if (t.first < cap) kept.push_back(t);
    return Series::from_terms(s.field(), std::move(kept));
}

Vec basis_vector(const Field& f, std::size_t m, std::size_t i) {
    Vec v(m, Series::zero(f));
    v[i] = Series::one(f);
    return v;
}

ExtRat min_valuation(const Vec& v) {
    ExtRat best = ExtRat::infinity();
    for (const auto& x : v) {
        ExtRat w = x.valuation_lower_bound();
        if (w < best) best = w;
    }
    return best;
}

Vec sub_vec(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec scale_vec(const Vec& a, const Series& s) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

void trim_poly(SeriesPoly& f) {
    while (!f.empty() && f.back().is_exact_zero()) f.pop_back();
}

Series eval_poly(const SeriesPoly& f, const Series& x, const Rat& cap) {
    Series acc = Series::zero(x.field());
    for (std::size_t k = f.size(); k-- > 0;) acc = cut(acc * x + f[k], cap);
    return acc;
}

SeriesPoly derivative_poly(const SeriesPoly& f) {
    SeriesPoly d;
    for (std::size_t k = 1; k < f.size(); ++k)
        d.push_back(f[k].scaled(Scalar::from_int(f[k].field(), static_cast<long>(k))));
    return d;
}

// f(alpha + X), exactly.
SeriesPoly taylor_shift(const SeriesPoly& f, const Series& alpha) {
    const Field& F = alpha.field();
    SeriesPoly g;
    for (std::size_t k = f.size(); k-- > 0;) {
        SeriesPoly next(g.size() + 1, Series::zero(F));
        for (std::size_t i = 0; i < g.size(); ++i) {
            next[i] += alpha * g[i];
            next[i + 1] += g[i];
        }
        next[0] += f[k];
        g = std::move(next);
    }
    trim_poly(g);
    return g;
}

SeriesPoly map_poly(const SeriesPoly& f, const Embedding& e) {
    SeriesPoly g;
    for (const auto& c : f) g.push_back(c.map(e));
    return g;
}

struct NeedExtension {
    Embedding embed;
};

// Normalized Newton iteration for a simple root T^s z of f with z of
// valuation 0, run to relative precision P - s.
Series lift_root(const SeriesPoly& f, const Rat& s, Series z, const Rat& P) {
    const Field& F = z.field();
    std::optional<Rat> m0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (f[k].is_exact_zero()) continue;
        Rat w = f[k].valuation().get() + Rat(static_cast<long>(k)) * s;
        if (!m0 || w < *m0) m0 = w;
    }
    SeriesPoly h(f.size(), Series::zero(F));
    for (std::size_t k = 0; k < f.size(); ++k) h[k] = f[k].shifted(Rat(static_cast<long>(k)) * s - *m0);
    const SeriesPoly dh = derivative_poly(h);
    const Rat cap = P - s;
    if (cap <= 0) return cut(z.shifted(s), P);
    for (int it = 0; it < 200; ++it) {
        Series hz = eval_poly(h, z, cap);
        if (hz.is_exact_zero()) return cut(z.shifted(s), P);
        Series d = eval_poly(dh, z, cap);
        if (d.is_exact_zero() || d.valuation().get() != 0)
            fail(ErrorCode::IterationDiverged, "derivative is not a unit at the approximate root");
        z = cut(z - hz * d.invert(cap), cap);
    }
    fail(ErrorCode::IterationDiverged, "Newton iteration did not stabilize");
}

struct RootSearch {
    int budget;
    Rat P;

    // Roots of f whose valuation exceeds `bound` (all roots when bound is
    // empty). Throws NeedExtension when a leading equation does not split
    // over the current field.
    std::vector<Series> roots(SeriesPoly f, const std::optional<Rat>& bound, int depth) {
        if (depth > 64) fail(ErrorCode::RepeatedEigenvalue, "roots could not be separated");
        trim_poly(f);
        const Field& F = f.back().field();
        std::vector<Series> out;
        int zero_roots = 0;
        while (f.size() > 1 && f[0].is_exact_zero()) {
            f.erase(f.begin());
            ++zero_roots;
        }
        if (zero_roots > 1) fail(ErrorCode::RepeatedEigenvalue, "repeated root");
        if (zero_roots == 1) out.push_back(Series::zero(F));
        if (f.size() <= 1) return out;

        std::vector<std::pair<long, Rat>> pts;
        for (std::size_t k = 0; k < f.size(); ++k)
            if (!f[k].is_exact_zero()) pts.push_back({static_cast<long>(k), f[k].valuation().get()});
        // Lower convex hull.
        std::vector<std::pair<long, Rat>> hull;
        for (const auto& pt : pts) {
            while (hull.size() >= 2) {
                const auto& a = hull[hull.size() - 2];
                const auto& b = hull.back();
                Rat cross = Rat(b.first - a.first) * (pt.second - a.second) -
                            (b.second - a.second) * Rat(pt.first - a.first);
                if (cross <= 0) hull.pop_back();
                else break;
            }
            hull.push_back(pt);
        }
        for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
            const long k1 = hull[h].first, k2 = hull[h + 1].first;
            const Rat s = (hull[h].second - hull[h + 1].second) / Rat(k2 - k1);
            if (bound && s <= *bound) continue;
            const Rat line = hull[h].second + Rat(k1) * s;
            SPoly L(static_cast<std::size_t>(k2 - k1 + 1), Scalar::zero(F));
            for (long k = k1; k <= k2; ++k) {
                const Series& c = f[static_cast<std::size_t>(k)];
                if (c.is_exact_zero()) continue;
                if (c.valuation().get() + Rat(k) * s == line) L[static_cast<std::size_t>(k - k1)] = c.leading_coefficient();
            }
            Splitting sp = split_polynomial(F, L, budget);
            if (sp.embed.to != F) throw NeedExtension{sp.embed};
            for (const Scalar& c : sp.roots) {
                int mult = 0;
                SPoly rest = L;
                SPoly lin{-c, Scalar::one(F)};
                while (spoly::degree(rest) >= 1) {
                    SPoly q, r;
                    spoly::divmod(rest, lin, q, r);
                    spoly::trim(r);
                    if (!r.empty()) break;
                    rest = q;
                    ++mult;
                }
                if (mult == 1) {
                    out.push_back(lift_root(f, s, Series::constant(c), P));
                    continue;
                }
                Series alpha = Series::monomial(c, s);
                auto sub = roots(taylor_shift(f, alpha), s, depth + 1);
                if (static_cast<int>(sub.size()) != mult)
                    fail(ErrorCode::RepeatedEigenvalue, "cluster of roots could not be resolved");
                for (const auto& r : sub) out.push_back(cut(alpha + r, P));
            }
        }
        return out;
    }
};

// Determinant by dynamic programming over column subsets.
Series subset_determinant(const Mat& a, const Field& F) {
    const std::size_t n = a.size();
    if (n == 0) return Series::one(F);
    std::vector<Series> dp(std::size_t{1} << n, Series::zero(F));
    dp[0] = Series::one(F);
    for (std::size_t mask = 0; mask < dp.size(); ++mask) {
        if (dp[mask].is_exact_zero()) continue;
        const std::size_t row = static_cast<std::size_t>(__builtin_popcountll(mask));
        if (row == n) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (mask & (std::size_t{1} << j)) continue;
            if (a[row][j].is_exact_zero()) continue;
            const int above = __builtin_popcountll(mask >> (j + 1));
            Series term = dp[mask] * a[row][j];
            if (above % 2) term = -term;
            dp[mask | (std::size_t{1} << j)] += term;
        }
    }
    return dp.back();
}

Rat rational_determinant(std::vector<std::vector<Rat>> m) {
    const std::size_t n = m.size();
    Rat det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && m[p][c] == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            std::swap(m[p], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            if (m[r][c] == 0) continue;
            Rat f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

Rat field_norm(const Scalar& x) {
    const Field& F = x.field();
    if (F->kind == FieldKind::Rational) return x.as_rat();
    const std::size_t d = static_cast<std::size_t>(F->degree);
    std::vector<std::vector<Rat>> m(d, std::vector<Rat>(d, Rat(0)));
    Scalar g = Scalar::one(F);
    const Scalar gen = Scalar::generator(F);
    for (std::size_t k = 0; k < d; ++k) {
        Scalar col = x * g;
        for (std::size_t r = 0; r < d; ++r) m[r][k] = col.q_coords()[r];
        g *= gen;
    }
    return rational_determinant(std::move(m));
}

void add_prime_factors(Int n, std::vector<std::int64_t>& out) {
    if (n < 0) n = -n;
    for (long q = 2; q < 1000000 && n > 1; ++q) {
        if (Int(q) * q > n) break;
        if (n % q == 0) {
            out.push_back(q);
            while (n % q == 0) n /= q;
        }
    }
    if (n > 1 && n.fits_slong_p()) out.push_back(n.get_si());
}

struct BuiltSplit {
    std::vector<Vec> idempotents;
    std::vector<Rat> levels;
};

std::optional<BuiltSplit> build_split(const Algebra& A, const Vec& a, const std::vector<Series>& lambda,
                                      const Rat& Z, const Rat& P) {
    const Field& F = A.field;
    const std::size_t m = lambda.size();
    const Mat M = mult_operator(A, a);
    BuiltSplit out;
    for (std::size_t l = 0; l < m; ++l) {
        Vec eps = A.unit;
        Series mu = Series::one(F);
        for (std::size_t k = 0; k < m; ++k) {
            if (k == l) continue;
            eps = sub_vec(mat::apply(M, eps), scale_vec(eps, lambda[k]));
            mu *= lambda[l] - lambda[k];
        }
        if (mu.is_exact_zero()) return std::nullopt;
        Series inv = mu.invert(P - 2 * mu.valuation().get());
        Vec e(eps.size());
        for (std::size_t i = 0; i < eps.size(); ++i) e[i] = cut(eps[i] * inv, P);
        out.idempotents.push_back(std::move(e));
    }
    IdempotentSplit probe;
    probe.field = F;
    probe.embed = Embedding::identity(F);
    probe.idempotents = out.idempotents;
    probe.eigenvalues = lambda;
    SplitResiduals r = split_residuals(A, a, probe);
    const ExtRat want = ExtRat::of(Z);
    if (r.idempotent < want || r.orthogonal < want || r.unit_sum < want || r.eigen < want) return std::nullopt;
    for (const auto& e : out.idempotents) out.levels.push_back(element_level(e));
    return out;
}

Rat max_gap_valuation(const std::vector<Series>& lambda) {
    Rat g = 0;
    for (std::size_t i = 0; i < lambda.size(); ++i)
        for (std::size_t j = i + 1; j < lambda.size(); ++j) {
            Series d = lambda[i] - lambda[j];
            if (!d.is_zero_to_precision()) g = std::max(g, d.valuation().get());
        }
    return g;
}

bool is_prime(std::int64_t p) { return p >= 2 && mpz_probab_prime_p(Int(static_cast<long>(p)).get_mpz_t(), 30) > 0; }

}  // namespace

// ---- algebras ----------------------------------------------------------------

Vec multiply(const Algebra& A, const Vec& x, const Vec& y) {
    const std::size_t m = A.dim();
    Vec out(m, Series::zero(A.field));
    for (std::size_t i = 0; i < m; ++i) {
        if (x[i].is_exact_zero()) continue;
        for (std::size_t j = 0; j < m; ++j) {
            if (y[j].is_exact_zero()) continue;
            Series c = x[i] * y[j];
            for (std::size_t k = 0; k < m; ++k)
                if (!A.product[i][j][k].is_exact_zero()) out[k] += c * A.product[i][j][k];
        }
    }
    return out;
}

Mat mult_operator(const Algebra& A, const Vec& a) {
    const std::size_t m = A.dim();
    Mat M = mat::zeros(A.field, m, m);
    for (std::size_t j = 0; j < m; ++j) {
        Vec col = multiply(A, a, basis_vector(A.field, m, j));
        for (std::size_t k = 0; k < m; ++k) M[k][j] = col[k];
    }
    return M;
}

AlgebraCheck check_algebra(const Algebra& A, bool commutative) {
    const std::size_t m = A.dim();
    auto same = [](const Vec& x, const Vec& y) {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!x[i].agrees_with(y[i])) return false;
        return true;
    };
    if (A.product.size() != m || A.unit.size() != m) return {false, "shape"};
    for (std::size_t i = 0; i < m; ++i) {
        Vec ei = basis_vector(A.field, m, i);
        if (!same(multiply(A, A.unit, ei), ei) || !same(multiply(A, ei, A.unit), ei))
            return {false, "unit fails on " + A.labels[i]};
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (commutative && !same(A.product[i][j], A.product[j][i]))
                return {false, "not commutative on " + A.labels[i] + ", " + A.labels[j]};
            for (std::size_t k = 0; k < m; ++k) {
                Vec ek = basis_vector(A.field, m, k);
                Vec ei = basis_vector(A.field, m, i);
                Vec left = multiply(A, A.product[i][j], ek);
                Vec right = multiply(A, ei, A.product[j][k]);
                if (!same(left, right))
                    return {false, "not associative on " + A.labels[i] + ", " + A.labels[j] + ", " + A.labels[k]};
            }
        }
    return {};
}

Algebra map_algebra(const Algebra& A, const Embedding& e) {
    Algebra B;
    B.field = e.to;
    B.labels = A.labels;
    B.product = A.product;
    for (auto& row : B.product)
        for (auto& v : row)
            for (auto& c : v) c = c.map(e);
    for (const auto& c : A.unit) B.unit.push_back(c.map(e));
    return B;
}

Vec reduce_vector(const Vec& v, std::int64_t p) {
    Vec r;
    for (const auto& c : v) r.push_back(c.reduce_mod_p(p));
    return r;
}

Algebra reduce_algebra(const Algebra& A, std::int64_t p) {
    Algebra B;
    B.field = reduction_target(A.field, p);
    B.labels = A.labels;
    for (const auto& row : A.product) {
        std::vector<Vec> r;
        for (const auto& v : row) r.push_back(reduce_vector(v, p));
        B.product.push_back(std::move(r));
    }
    B.unit = reduce_vector(A.unit, p);
    return B;
}

Rat element_level(const Vec& x) {
    std::optional<Rat> best;
    for (const auto& c : x) {
        if (c.is_zero_to_precision()) continue;
        Rat w = -c.valuation().get();
        if (!best || w > *best) best = w;
    }
    if (!best) fail(ErrorCode::InvalidArgument, "level of the zero element");
    return *best;
}

Algebra diagonal_algebra(const Field& f, std::size_t m) {
    Algebra A;
    A.field = f;
    for (std::size_t i = 0; i < m; ++i) A.labels.push_back("e" + std::to_string(i + 1));
    A.product.assign(m, std::vector<Vec>(m, Vec(m, Series::zero(f))));
    for (std::size_t i = 0; i < m; ++i) A.product[i][i][i] = Series::one(f);
    A.unit.assign(m, Series::one(f));
    return A;
}

Algebra quotient_algebra(const Vec& relation) {
    const std::size_t m = relation.size();
    if (m == 0) fail(ErrorCode::InvalidArgument, "empty relation");
    const Field& F = relation[0].field();
    std::vector<Vec> pw;
    for (std::size_t i = 0; i < m; ++i) pw.push_back(basis_vector(F, m, i));
    while (pw.size() < 2 * m - 1) {
        const Vec& prev = pw.back();
        Vec next(m, Series::zero(F));
        for (std::size_t i = 0; i + 1 < m; ++i) next[i + 1] = prev[i];
        for (std::size_t i = 0; i < m; ++i) next[i] += prev[m - 1] * relation[i];
        pw.push_back(std::move(next));
    }
    Algebra A;
    A.field = F;
    for (std::size_t i = 0; i < m; ++i)
        A.labels.push_back(i == 0 ? "1" : i == 1 ? "x" : "x^" + std::to_string(i));
    A.product.assign(m, std::vector<Vec>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) A.product[i][j] = pw[i + j];
    A.unit = basis_vector(F, m, 0);
    return A;
}

Algebra projective_model(int n) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "dimension must be positive");
    const Field F = rationals();
    Vec relation(static_cast<std::size_t>(n + 1), Series::zero(F));
    relation[0] = Series::monomial(Scalar::one(F), Rat(1));
    return quotient_algebra(relation);
}

Vec projective_chern_class(int n) {
    const Field F = rationals();
    Vec a(static_cast<std::size_t>(n + 1), Series::zero(F));
    a[1] = Series::constant(Scalar::from_int(F, n + 1));
    return a;
}

// ---- eigenvalues -------------------------------------------------------------

std::vector<Series> characteristic_polynomial(const Mat& M) {
    const std::size_t n = M.size();
    if (n == 0) fail(ErrorCode::InvalidArgument, "empty matrix");
    const Field& F = M[0][0].field();
    // Berkowitz: c holds coefficients from the leading one down.
    std::vector<Series> c{Series::one(F)};
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<Series> t{Series::one(F), -M[r][r]};
        Vec v(r);
        for (std::size_t i = 0; i < r; ++i) v[i] = M[i][r];
        for (std::size_t k = 2; k <= r + 1; ++k) {
            Series s = Series::zero(F);
            for (std::size_t i = 0; i < r; ++i) s += M[r][i] * v[i];
            t.push_back(-s);
            Vec w(r, Series::zero(F));
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j) w[i] += M[i][j] * v[j];
            v = std::move(w);
        }
        std::vector<Series> next(r + 2, Series::zero(F));
        for (std::size_t i = 0; i < r + 2; ++i)
            for (std::size_t j = 0; j <= std::min(i, r); ++j)
                if (i - j < t.size()) next[i] += t[i - j] * c[j];
        c = std::move(next);
    }
    std::reverse(c.begin(), c.end());
    return c;
}

RootSet puiseux_roots(const std::vector<Series>& f, const Rat& P, int field_budget) {
    if (f.empty()) fail(ErrorCode::InvalidArgument, "zero polynomial");
    for (const auto& c : f)
        if (!c.is_exact()) fail(ErrorCode::InvalidArgument, "root finding needs exact coefficients");
    RootSet out;
    out.embed = Embedding::identity(f.back().field());
    SeriesPoly g = f;
    for (;;) {
        try {
            RootSearch search{field_budget, P};
            out.roots = search.roots(g, std::nullopt, 0);
            return out;
        } catch (const NeedExtension& ext) {
            out.embed = out.embed.then(ext.embed);
            g = map_poly(g, ext.embed);
        }
    }
}

SplitResiduals split_residuals(const Algebra& A, const Vec& a, const IdempotentSplit& S) {
    const Algebra B = S.field == A.field ? A : map_algebra(A, S.embed);
    Vec aa;
    for (const auto& c : a) aa.push_back(S.field == A.field ? c : c.map(S.embed));
    SplitResiduals r{ExtRat::infinity(), ExtRat::infinity(), ExtRat::infinity(), ExtRat::infinity()};
    auto lower = [](ExtRat& slot, const ExtRat& v) {
        if (v < slot) slot = v;
    };
    const auto& E = S.idempotents;
    Vec sum(B.dim(), Series::zero(B.field));
    for (std::size_t l = 0; l < E.size(); ++l) {
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += E[l][i];
        lower(r.idempotent, min_valuation(sub_vec(multiply(B, E[l], E[l]), E[l])));
        for (std::size_t k = l + 1; k < E.size(); ++k) lower(r.orthogonal, min_valuation(multiply(B, E[l], E[k])));
        lower(r.eigen, min_valuation(sub_vec(multiply(B, aa, E[l]), scale_vec(E[l], S.eigenvalues[l]))));
    }
    r.unit_sum = min_valuation(sub_vec(sum, B.unit));
    return r;
}

IdempotentSplit certify_semisimple(const Algebra& A, const Vec& a, const Rat& Z, int field_budget) {
    const std::vector<Series> f = characteristic_polynomial(mult_operator(A, a));
    if (f[0].is_exact_zero()) fail(ErrorCode::ZeroEigenvalue, "the element is a zero divisor");
    if (A.dim() <= 8 && characteristic(A.field) == 0) {
        try {
            discriminant_valuation(A, a);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::DiscriminantZeroToPrecision)
                fail(ErrorCode::RepeatedEigenvalue, "characteristic polynomial has a repeated root");
            throw;
        }
    }
    Rat margin = 4;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const Rat P = Z + margin;
        RootSet R = puiseux_roots(f, P, field_budget);
        if (R.roots.size() != A.dim()) fail(ErrorCode::RepeatedEigenvalue, "fewer distinct eigenvalues than the dimension");
        const Algebra B = map_algebra(A, R.embed);
        Vec aa;
        for (const auto& c : a) aa.push_back(c.map(R.embed));
        if (auto built = build_split(B, aa, R.roots, Z, P)) {
            IdempotentSplit S;
            S.field = B.field;
            S.embed = R.embed;
            S.idempotents = std::move(built->idempotents);
            S.eigenvalues = R.roots;
            S.levels = std::move(built->levels);
            S.precision = Z;
            S.working_precision = P;
            return S;
        }
        margin = std::max(Rat(margin * 2), Rat(4 * (max_gap_valuation(R.roots) + 1)));
    }
    fail(ErrorCode::PrecisionInsufficient, "idempotent identities not certified at precision " + to_string(Z));
}

DiscriminantReport discriminant_valuation(const Algebra& A, const Vec& a) {
    const std::vector<Series> f = characteristic_polynomial(mult_operator(A, a));
    const std::size_t m = f.size() - 1;
    const Field& F = A.field;
    DiscriminantReport rep;
    if (m == 1) {
        rep.discriminant = Series::one(F);
    } else {
        const SeriesPoly df = derivative_poly(f);
        const std::size_t N = 2 * m - 1;
        Mat S = mat::zeros(F, N, N);
        for (std::size_t r = 0; r + 1 < m; ++r)
            for (std::size_t k = 0; k <= m; ++k) S[r][r + k] = f[m - k];
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t k = 0; k < m; ++k) S[m - 1 + r][r + k] = df[m - 1 - k];
        Series res = subset_determinant(S, F);
        if ((m * (m - 1) / 2) % 2) res = -res;
        rep.discriminant = res;
    }
    if (rep.discriminant.is_zero_to_precision())
        fail(ErrorCode::DiscriminantZeroToPrecision, "discriminant vanishes");
    rep.valuation = rep.discriminant.valuation().get();
    if (characteristic(F) == 0) {
        Rat norm = field_norm(rep.discriminant.leading_coefficient());
        add_prime_factors(norm.get_num(), rep.small_primes);
        add_prime_factors(norm.get_den(), rep.small_primes);
        auto add_denominators = [&](const Series& s) {
            for (const auto& t : s.terms()) add_prime_factors(t.second.denominator(), rep.small_primes);
        };
        for (const auto& row : A.product)
            for (const auto& v : row)
                for (const auto& c : v) add_denominators(c);
        for (const auto& c : a) add_denominators(c);
        std::sort(rep.small_primes.begin(), rep.small_primes.end());
        rep.small_primes.erase(std::unique(rep.small_primes.begin(), rep.small_primes.end()), rep.small_primes.end());
    }
    return rep;
}

TransferReport mod_p_transfer(const Algebra& A, const Vec& a, std::int64_t p, const Rat& Z, int field_budget) {
    if (characteristic(A.field) != 0) fail(ErrorCode::InvalidArgument, "transfer starts in characteristic 0");
    if (p == 2) fail(ErrorCode::PrimeTooSmall, "p = 2 is excluded");
    if (!is_prime(p)) fail(ErrorCode::InvalidArgument, std::to_string(p) + " is not prime");
    const DiscriminantReport D = discriminant_valuation(A, a);
    if (std::binary_search(D.small_primes.begin(), D.small_primes.end(), p))
        fail(ErrorCode::PrimeTooSmall, std::to_string(p) + " divides the discriminant or a denominator");

    TransferReport rep;
    rep.p = p;
    rep.characteristic_zero = certify_semisimple(A, a, Z, field_budget);
    const IdempotentSplit& S0 = rep.characteristic_zero;
    const Algebra A0 = map_algebra(A, S0.embed);
    Vec a0;
    for (const auto& c : a) a0.push_back(c.map(S0.embed));

    Algebra Ap;
    Vec ap, lam_start;
    std::vector<Vec> e_trunc;
    try {
        Ap = reduce_algebra(A0, p);
        ap = reduce_vector(a0, p);
        for (const auto& l : S0.eigenvalues) lam_start.push_back(cut(l, Z).reduce_mod_p(p));
        for (const auto& e : S0.idempotents) e_trunc.push_back(reduce_vector(mat::truncate(e, Z), p));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::DenominatorDivisibleByP)
            fail(ErrorCode::PrimeTooSmall, std::string("denominator obstruction: ") + e.what());
        throw;
    }
    const std::vector<Series> fp = characteristic_polynomial(mult_operator(Ap, ap));

    Rat margin = 4;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const Rat P = Z + margin;
        std::vector<Series> lam;
        for (std::size_t l = 0; l < lam_start.size(); ++l) {
            const Rat s = S0.eigenvalues[l].valuation().get();
            if (lam_start[l].is_zero_to_precision() || lam_start[l].valuation().get() != s)
                fail(ErrorCode::PrimeTooSmall, "an eigenvalue's leading coefficient vanishes mod p");
            lam.push_back(lift_root(fp, s, lam_start[l].shifted(-s), P));
        }
        if (auto built = build_split(Ap, ap, lam, Z, P)) {
            IdempotentSplit& R = rep.reduced;
            R.field = Ap.field;
            R.embed = Embedding::identity(Ap.field);
            R.idempotents = std::move(built->idempotents);
            R.eigenvalues = lam;
            R.levels = std::move(built->levels);
            R.precision = Z;
            R.working_precision = P;
            rep.levels_match = R.levels == S0.levels;
            for (std::size_t l = 0; l < lam.size(); ++l) {
                ExtRat gap = min_valuation(sub_vec(R.idempotents[l], e_trunc[l]));
                rep.defect.push_back(gap.is_infinite() || gap.get() >= Z ? Rat(0) : Z - gap.get());
            }
            return rep;
        }
        margin *= 2;
    }
    fail(ErrorCode::IterationDiverged, "characteristic-p splitting not certified at precision " + to_string(Z));
}

// ---- Clifford algebras -------------------------------------------------------

namespace {

struct CliffordReducer {
    const Mat& H;
    Field F;
    std::map<std::vector<int>, std::map<unsigned, Series>> memo;

    std::map<unsigned, Series> reduce(const std::vector<int>& w) {
        if (auto it = memo.find(w); it != memo.end()) return it->second;
        std::map<unsigned, Series> out;
        std::size_t i = 0;
        while (i + 1 < w.size() && w[i] < w[i + 1]) ++i;
        if (i + 1 >= w.size()) {
            unsigned mask = 0;
            for (int g : w) mask |= 1u << g;
            out[mask] = Series::one(F);
        } else {
            std::vector<int> without(w.begin(), w.begin() + static_cast<long>(i));
            without.insert(without.end(), w.begin() + static_cast<long>(i) + 2, w.end());
            const int x = w[i], y = w[i + 1];
            if (x == y) {
                Series half = H[x][x].scaled(Scalar::from_rat(F, make_rat(1, 2)));
                for (const auto& [mk, c] : reduce(without)) {
                    auto [it, fresh] = out.try_emplace(mk, Series::zero(F));
                    it->second += c * half;
                }
            } else {
                std::vector<int> swapped = w;
                std::swap(swapped[i], swapped[i + 1]);
                for (const auto& [mk, c] : reduce(swapped)) {
                    auto [it, fresh] = out.try_emplace(mk, Series::zero(F));
                    it->second -= c;
                }
                for (const auto& [mk, c] : reduce(without)) {
                    auto [it, fresh] = out.try_emplace(mk, Series::zero(F));
                    it->second += c * H[x][y];
                }
            }
        }
        memo[w] = out;
        return out;
    }
};

}  // namespace

Algebra clifford_from_hessian(const Mat& H) {
    const std::size_t n = H.size();
    if (n == 0 || n > 6) fail(ErrorCode::InvalidArgument, "Hessian size must be between 1 and 6");
    const Field F = H[0][0].field();
    for (std::size_t i = 0; i < n; ++i) {
        if (H[i].size() != n) fail(ErrorCode::InvalidArgument, "Hessian must be square");
        for (std::size_t j = 0; j < i; ++j)
            if (!(H[i][j] == H[j][i])) fail(ErrorCode::InvalidArgument, "Hessian must be symmetric");
    }
    if (characteristic(F) == 2) fail(ErrorCode::InvalidArgument, "characteristic 2 is not supported");
    if (mat::determinant(H).is_zero_to_precision()) fail(ErrorCode::DegenerateForm, "det H has no resolved leading term");

    const std::size_t m = std::size_t{1} << n;
    Algebra A;
    A.field = F;
    auto word = [&](unsigned mask) {
        std::vector<int> w;
        for (int g = 0; g < static_cast<int>(n); ++g)
            if (mask & (1u << g)) w.push_back(g);
        return w;
    };
    for (unsigned mask = 0; mask < m; ++mask) {
        std::string label;
        for (int g : word(mask)) label += "x" + std::to_string(g + 1);
        A.labels.push_back(label.empty() ? "1" : label);
    }
    CliffordReducer red{H, F, {}};
    A.product.assign(m, std::vector<Vec>(m, Vec(m, Series::zero(F))));
    for (unsigned s = 0; s < m; ++s)
        for (unsigned t = 0; t < m; ++t) {
            std::vector<int> w = word(s);
            for (int g : word(t)) w.push_back(g);
            for (const auto& [mk, c] : red.reduce(w)) A.product[s][t][mk] = c;
        }
    A.unit = basis_vector(F, m, 0);
    return A;
}

}  // namespace nov
