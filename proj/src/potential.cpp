#include "nov/potential.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "nov/errors.hpp"
#include "nov/random.hpp"

namespace nov {

namespace {

Series cut(const Series& s, const Rat& cap) {
    std::vector<Series::Term> kept;
    for (const auto& t : s.terms())
        if (t.first < cap) kept.push_back(t);
    return Series::from_terms(s.field(), std::move(kept));
}

Rat dot(const Exponent& v, const std::vector<Rat>& w) {
    Rat s = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i]) s += w[i] * v[i];
    return s;
}

bool is_monomial(const Series& s) { return s.is_exact() && s.terms().size() == 1; }

// ---- small exact linear algebra over ℚ ------------------------------------------

std::size_t rat_rank(std::vector<std::vector<Rat>> m) {
    std::size_t rank = 0;
    const std::size_t cols = m.empty() ? 0 : m[0].size();
    for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
        std::size_t p = rank;
        while (p < m.size() && m[p][c] == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[rank]);
        for (std::size_t i = rank + 1; i < m.size(); ++i) {
            if (m[i][c] == 0) continue;
            Rat f = m[i][c] / m[rank][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[rank][j];
        }
        ++rank;
    }
    return rank;
}

// Solves the nonsingular square system m x = b.
std::vector<Rat> rat_solve(std::vector<std::vector<Rat>> m, std::vector<Rat> b) {
    const std::size_t n = m.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (m[p][c] == 0) ++p;
        std::swap(m[p], m[c]);
        std::swap(b[p], b[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || m[i][c] == 0) continue;
            Rat f = m[i][c] / m[c][c];
            for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
            b[i] -= f * b[c];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= m[i][i];
    return b;
}

struct Monomial {
    Exponent v;
    Series coeff;
    Rat val;
    Scalar lead;
};

std::vector<Monomial> monomials_of(const LaurentPoly& W) {
    std::vector<Monomial> out;
    for (const auto& [e, c] : W.terms) {
        if (!c.is_exact()) fail(ErrorCode::InvalidArgument, "potential coefficients must be exact");
        out.push_back({e, c, c.valuation().get(), c.leading_coefficient()});
    }
    return out;
}

SPoly binomial_poly(const Field& f, long h, const Scalar& r) {
    SPoly p(static_cast<std::size_t>(h) + 1, Scalar::zero(f));
    p[0] = -r;
    p[static_cast<std::size_t>(h)] = Scalar::one(f);
    return p;
}

// Growing common coefficient field, starting at the field of W.
struct FieldState {
    Embedding embed;  // from the field of W to the current field
    int budget;
    Field current() const { return embed.to; }
};

// Roots of f over the current field, extending it if needed. Every scalar
// registered through `remap` is carried into the new field.
std::vector<Scalar> roots_extending(FieldState& st, const SPoly& f, const std::function<void(const Embedding&)>& remap) {
    Splitting s = split_polynomial(st.current(), f, st.budget);
    if (s.embed.to != st.current()) {
        remap(s.embed);
        st.embed = st.embed.then(s.embed);
    }
    return s.roots;
}

}  // namespace

// ---- Laurent polynomials -------------------------------------------------------

void LaurentPoly::add_term(const Exponent& e, const Series& c) {
    if (static_cast<int>(e.size()) != n) fail(ErrorCode::InvalidArgument, "exponent has the wrong length");
    if (c.is_exact_zero()) return;
    auto it = terms.find(e);
    if (it == terms.end()) {
        terms.emplace(e, c);
        return;
    }
    it->second += c;
    if (it->second.is_exact_zero()) terms.erase(it);
}

LaurentPoly LaurentPoly::map(const Embedding& e) const {
    LaurentPoly out;
    out.field = e.to;
    out.n = n;
    for (const auto& [k, c] : terms) out.terms.emplace(k, c.map(e));
    return out;
}

std::string LaurentPoly::to_string() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.to_string() << ")";
        for (int i = 0; i < n; ++i) {
            if (e[i] == 0) continue;
            os << "*y" << (i + 1);
            if (e[i] != 1) os << "^" << e[i];
        }
    }
    return os.str();
}

// ---- bulk deformations -----------------------------------------------------------

BulkDeformation BulkDeformation::trivial(std::size_t facets) {
    BulkDeformation b;
    b.c.assign(facets, GaussianRat(Rat(1)));
    return b;
}

bool BulkDeformation::is_real() const {
    return std::all_of(c.begin(), c.end(), [](const GaussianRat& x) { return x.im == 0; });
}

std::string BulkDeformation::to_string() const {
    std::string out;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (j) out += ",";
        out += c[j].to_string();
    }
    return out;
}

BulkDeformation parse_bulk(const std::string& text) {
    BulkDeformation b;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        GaussianRat g = parse_gaussian(item);
        if (g.re.get_den() != 1 || g.im.get_den() != 1) fail(ErrorCode::ParseError, "bulk entry " + item + " is not a Gaussian integer");
        if (g.is_zero()) fail(ErrorCode::ParseError, "bulk entries must be nonzero");
        b.c.push_back(g);
    }
    if (b.c.empty()) fail(ErrorCode::ParseError, "empty bulk deformation");
    return b;
}

Field bulk_field(const BulkDeformation& b) { return b.is_real() ? rationals() : gaussian_rationals(); }

Scalar bulk_scalar(const Field& f, const GaussianRat& c) {
    if (f->kind == FieldKind::Rational) {
        if (c.im != 0) fail(ErrorCode::FieldMismatch, "imaginary bulk coefficient over ℚ");
        return Scalar::from_rat(f, c.re);
    }
    if (f != gaussian_rationals()) fail(ErrorCode::FieldMismatch, "bulk coefficients live in ℚ(i)");
    return c.to_scalar();
}

// ---- potentials ------------------------------------------------------------------

namespace {

void check_bulk(const Polytope& P, const BulkDeformation& b) {
    if (b.c.size() != P.facets.size())
        fail(ErrorCode::InvalidArgument, "bulk has " + std::to_string(b.c.size()) + " entries for " +
                                             std::to_string(P.facets.size()) + " facets");
}

LaurentPoly ghv_with_levels(const Polytope& P, const BulkDeformation& b, const std::vector<Rat>& level) {
    check_bulk(P, b);
    LaurentPoly W;
    W.field = bulk_field(b);
    W.n = P.n;
    for (std::size_t j = 0; j < P.facets.size(); ++j)
        W.add_term(P.facets[j].v, Series::monomial(bulk_scalar(W.field, b.c[j]), level[j]));
    return W;
}

}  // namespace

LaurentPoly build_ghv(const Polytope& P, const BulkDeformation& b) {
    std::vector<Rat> level;
    for (const auto& f : P.facets) level.push_back(-f.lambda);
    return ghv_with_levels(P, b, level);
}

LaurentPoly build_fiber_potential(const Polytope& P, const BulkDeformation& b, const std::vector<Rat>& u) {
    if (static_cast<int>(u.size()) != P.n) fail(ErrorCode::InvalidArgument, "fiber point has the wrong dimension");
    if (!is_interior(P, u)) fail(ErrorCode::NotInterior, "the point is not in the interior of the polytope");
    return ghv_with_levels(P, b, support_values(P, u));
}

std::vector<LaurentPoly> log_derivatives(const LaurentPoly& W) {
    std::vector<LaurentPoly> out;
    for (int i = 0; i < W.n; ++i) {
        LaurentPoly D;
        D.field = W.field;
        D.n = W.n;
        for (const auto& [e, c] : W.terms)
            if (e[i] != 0) D.add_term(e, c.scaled(Scalar::from_int(W.field, e[i])));
        out.push_back(D);
    }
    return out;
}

Series power_product(const Vec& y, const std::vector<Rat>& vals, const Exponent& v, const Rat& target) {
    const Field& f = y.front().field();
    bool monomial = true;
    for (std::size_t k = 0; k < v.size(); ++k)
        if (v[k] && !is_monomial(y[k])) monomial = false;
    if (monomial) {
        Scalar c = Scalar::one(f);
        for (std::size_t k = 0; k < v.size(); ++k)
            if (v[k]) c *= y[k].leading_coefficient().pow(v[k]);
        return Series::monomial(c, dot(v, vals));
    }
    const Rat V = dot(v, vals);
    Series acc = Series::one(f);
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!v[k]) continue;
        const Rat own = vals[k] * v[k];
        acc = acc * y[k].pow(v[k], target - V + own);
    }
    return acc.with_precision(target);
}

namespace {

std::vector<Rat> valuations_of(const Vec& y) {
    std::vector<Rat> vals;
    for (const auto& c : y) {
        if (c.is_zero_to_precision()) fail(ErrorCode::InvalidArgument, "coordinates must be units");
        vals.push_back(c.valuation().get());
    }
    return vals;
}

Series term_value(const Series& coeff, const Exponent& e, const Vec& y, const std::vector<Rat>& vals, const Rat& target) {
    const Rat cv = coeff.valuation().get();
    Series t = coeff * power_product(y, vals, e, target - cv);
    return t.is_exact() ? t : t.with_precision(target);
}

}  // namespace

Series evaluate(const LaurentPoly& W, const Vec& y, const Rat& target) {
    const auto vals = valuations_of(y);
    Series acc = Series::zero(W.field);
    for (const auto& [e, c] : W.terms) acc += term_value(c, e, y, vals, target);
    return acc;
}

ExtRat exact_valuation_at(const LaurentPoly& W, const Vec& y) {
    const auto vals = valuations_of(y);
    Exponent shift(W.n, 0);
    for (const auto& [e, c] : W.terms)
        for (int i = 0; i < W.n; ++i) shift[i] = std::max(shift[i], -e[i]);
    Series acc = Series::zero(W.field);
    for (const auto& [e, c] : W.terms) {
        Series t = c;
        for (int i = 0; i < W.n; ++i)
            for (long k = 0; k < e[i] + shift[i]; ++k) t = t * y[i];
        acc += t;
    }
    if (!acc.is_exact()) fail(ErrorCode::InvalidArgument, "exact evaluation needs exact coordinates");
    if (acc.is_exact_zero()) return ExtRat::infinity();
    return ExtRat::of(acc.valuation().get() - dot(shift, vals));
}

// ---- critical points -------------------------------------------------------------

namespace {

struct Branch {
    std::vector<Rat> w;
    std::vector<std::vector<std::size_t>> J;  // minimising monomials per equation
};

// Valuation vectors where every equation y_i d_i W attains its minimum twice,
// found by intersecting pairwise balancing hyperplanes.
std::vector<Branch> tropical_branches(const std::vector<Monomial>& mons, int n) {
    std::vector<std::vector<std::size_t>> S(n);
    for (int i = 0; i < n; ++i)
        for (std::size_t j = 0; j < mons.size(); ++j)
            if (mons[j].v[i] != 0) S[i].push_back(j);
    std::set<std::vector<Rat>> found;
    std::vector<std::vector<Rat>> rows;
    std::vector<Rat> rhs;
    std::function<void(int)> choose = [&](int i) {
        if (i == n) {
            found.insert(rat_solve(rows, rhs));
            return;
        }
        for (std::size_t x = 0; x < S[i].size(); ++x)
            for (std::size_t y = x + 1; y < S[i].size(); ++y) {
                const auto& a = mons[S[i][x]];
                const auto& b = mons[S[i][y]];
                std::vector<Rat> row(n);
                for (int k = 0; k < n; ++k) row[k] = Rat(a.v[k] - b.v[k]);
                rows.push_back(row);
                if (rat_rank(rows) == rows.size()) {
                    rhs.push_back(b.val - a.val);
                    choose(i + 1);
                    rhs.pop_back();
                }
                rows.pop_back();
            }
    };
    choose(0);
    std::vector<Branch> out;
    for (const auto& w : found) {
        Branch br{w, {}};
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            std::optional<Rat> m;
            for (std::size_t j : S[i]) {
                Rat t = mons[j].val + dot(mons[j].v, w);
                if (!m || t < *m) m = t;
            }
            std::vector<std::size_t> J;
            for (std::size_t j : S[i])
                if (mons[j].val + dot(mons[j].v, w) == *m) J.push_back(j);
            if (J.size() < 2) ok = false;
            br.J.push_back(J);
        }
        if (ok) out.push_back(br);
    }
    return out;
}

// Unimodular column operations M with A M lower triangular, positive diagonal.
void column_hermite(std::vector<std::vector<long>>& A, std::vector<std::vector<long>>& M) {
    const std::size_t n = A.size();
    M.assign(n, std::vector<long>(n, 0));
    for (std::size_t i = 0; i < n; ++i) M[i][i] = 1;
    auto colop = [&](std::size_t dst, std::size_t src, long q) {  // col dst -= q col src
        for (std::size_t r = 0; r < n; ++r) {
            A[r][dst] -= q * A[r][src];
            M[r][dst] -= q * M[r][src];
        }
    };
    auto colswap = [&](std::size_t a, std::size_t b) {
        for (std::size_t r = 0; r < n; ++r) {
            std::swap(A[r][a], A[r][b]);
            std::swap(M[r][a], M[r][b]);
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j)
            while (A[i][j] != 0) {
                colop(i, j, A[i][i] / A[i][j]);
                colswap(i, j);
            }
        if (A[i][i] < 0)
            for (std::size_t r = 0; r < n; ++r) {
                A[r][i] = -A[r][i];
                M[r][i] = -M[r][i];
            }
    }
}

struct Seed {
    std::vector<Rat> w;
    std::vector<Scalar> z;
    std::size_t branch;
};

void solve_binomial(const Branch& br, const std::vector<Monomial>& mons, int n, FieldState& st, std::vector<Seed>& seeds,
                    std::size_t branch_index) {
    std::vector<std::vector<long>> A(n, std::vector<long>(n)), M;
    std::vector<Scalar> rho;
    for (int i = 0; i < n; ++i) {
        const auto& a = mons[br.J[i][0]];
        const auto& b = mons[br.J[i][1]];
        for (int k = 0; k < n; ++k) A[i][k] = a.v[k] - b.v[k];
        const Field F = st.current();
        const Scalar ca = st.embed.apply(a.lead) * Scalar::from_int(F, a.v[i]);
        const Scalar cb = st.embed.apply(b.lead) * Scalar::from_int(F, b.v[i]);
        rho.push_back(-cb / ca);
    }
    column_hermite(A, M);
    std::vector<std::vector<Scalar>> partial{{}};
    for (int l = 0; l < n; ++l) {
        std::vector<std::vector<Scalar>> next;
        for (std::size_t t = 0; t < partial.size(); ++t) {
            Scalar r = rho[l];
            for (int m = 0; m < l; ++m) r *= partial[t][m].pow(-A[l][m]);
            auto roots = roots_extending(st, binomial_poly(st.current(), A[l][l], r), [&](const Embedding& e) {
                for (auto& s : rho) s = e.apply(s);
                for (auto& p : partial)
                    for (auto& s : p) s = e.apply(s);
                for (auto& p : next)
                    for (auto& s : p) s = e.apply(s);
                for (auto& sd : seeds)
                    for (auto& s : sd.z) s = e.apply(s);
            });
            for (const auto& root : roots) {
                auto p = partial[t];
                p.push_back(root);
                next.push_back(p);
            }
        }
        partial = std::move(next);
    }
    for (const auto& x : partial) {
        std::vector<Scalar> z;
        for (int k = 0; k < n; ++k) {
            Scalar zk = Scalar::one(st.current());
            for (int l = 0; l < n; ++l) zk *= x[l].pow(M[k][l]);
            z.push_back(zk);
        }
        seeds.push_back({br.w, z, branch_index});
    }
}

void solve_univariate(const Branch& br, const std::vector<Monomial>& mons, FieldState& st, std::vector<Seed>& seeds,
                      std::size_t branch_index) {
    long lo = 0, hi = 0;
    bool first = true;
    for (std::size_t j : br.J[0]) {
        const long e = mons[j].v[0];
        lo = first ? e : std::min(lo, e);
        hi = first ? e : std::max(hi, e);
        first = false;
    }
    const Field F = st.current();
    SPoly p(static_cast<std::size_t>(hi - lo) + 1, Scalar::zero(F));
    for (std::size_t j : br.J[0])
        p[static_cast<std::size_t>(mons[j].v[0] - lo)] += st.embed.apply(mons[j].lead) * Scalar::from_int(F, mons[j].v[0]);
    auto roots = roots_extending(st, p, [&](const Embedding& e) {
        for (auto& s : p) s = e.apply(s);
        for (auto& sd : seeds)
            for (auto& s : sd.z) s = e.apply(s);
    });
    const SPoly dp = spoly::derivative(p);
    for (const auto& r : roots) {
        if (spoly::eval(dp, r).is_zero())
            fail(ErrorCode::JacobianDegenerateAtLeadingOrder,
                 "repeated root of the leading equation at valuation " + to_string(br.w[0]));
        seeds.push_back({br.w, {r}, branch_index});
    }
}

// Normalised equations T^{-m_i} (y_i d_i W)(T^w z) and their log-Jacobian.
struct Normalised {
    std::vector<Rat> m;
    std::vector<std::vector<std::pair<Exponent, Series>>> eq;
    std::vector<std::vector<std::vector<std::pair<Exponent, Series>>>> jac;
};

Normalised normalise(const std::vector<Monomial>& mons, const std::vector<Series>& coeffs, const std::vector<Rat>& w,
                     int n) {
    Normalised N;
    N.eq.resize(n);
    N.jac.assign(n, std::vector<std::vector<std::pair<Exponent, Series>>>(n));
    for (int i = 0; i < n; ++i) {
        std::optional<Rat> m;
        for (const auto& mo : mons)
            if (mo.v[i] != 0) {
                Rat t = mo.val + dot(mo.v, w);
                if (!m || t < *m) m = t;
            }
        N.m.push_back(*m);
        for (std::size_t j = 0; j < mons.size(); ++j) {
            const auto& mo = mons[j];
            if (mo.v[i] == 0) continue;
            const Series base = coeffs[j].shifted(dot(mo.v, w) - *m);
            const Field& F = base.field();
            N.eq[i].push_back({mo.v, base.scaled(Scalar::from_int(F, mo.v[i]))});
            for (int k = 0; k < n; ++k)
                if (mo.v[k] != 0) N.jac[i][k].push_back({mo.v, base.scaled(Scalar::from_int(F, mo.v[i] * mo.v[k]))});
        }
    }
    return N;
}

struct CappedPowers {
    const Vec& z;
    Vec inv;
    Rat cap;
    std::map<Exponent, Series> cache;

    CappedPowers(const Vec& zz, const Rat& c) : z(zz), cap(c) {
        for (const auto& x : z) inv.push_back(cut(x.invert(cap), cap));
    }
    const Series& get(const Exponent& v) {
        auto it = cache.find(v);
        if (it != cache.end()) return it->second;
        Series acc = Series::one(z.front().field());
        for (std::size_t k = 0; k < v.size(); ++k) {
            const Series& b = v[k] > 0 ? z[k] : inv[k];
            for (long t = 0; t < std::abs(v[k]); ++t) acc = cut(acc * b, cap);
        }
        return cache.emplace(v, acc).first->second;
    }
};

Series capped_sum(const std::vector<std::pair<Exponent, Series>>& terms, CappedPowers& pw) {
    Series acc = Series::zero(pw.z.front().field());
    for (const auto& [v, c] : terms) acc += cut(c * pw.get(v), pw.cap);
    return acc;
}

}  // namespace

CriticalSet critical_points(const LaurentPoly& W, const Rat& Z, int field_budget) {
    if (Z <= 0) fail(ErrorCode::InvalidArgument, "precision must be positive");
    const int n = W.n;
    if (n < 1) fail(ErrorCode::InvalidArgument, "potential has no variables");
    const auto mons = monomials_of(W);
    CriticalSet S;
    S.precision = Z;
    const auto branches = tropical_branches(mons, n);

    FieldState st{Embedding::identity(W.field), field_budget};
    std::vector<Seed> seeds;
    for (std::size_t b = 0; b < branches.size(); ++b) {
        const Branch& br = branches[b];
        const bool binomial = std::all_of(br.J.begin(), br.J.end(), [](const auto& J) { return J.size() == 2; });
        if (n == 1) solve_univariate(br, mons, st, seeds, b);
        else if (binomial) solve_binomial(br, mons, n, st, seeds, b);
        else {
            std::string w;
            for (const auto& x : br.w) w += (w.empty() ? "" : ",") + to_string(x);
            S.unresolved.push_back("leading system at valuation (" + w + ") is not binomial");
        }
    }
    S.field = st.current();
    S.embed = st.embed;
    S.W = W.map(st.embed);
    const auto derivs = log_derivatives(S.W);
    std::vector<Series> coeffs;
    for (const auto& mo : mons) coeffs.push_back(mo.coeff.map(st.embed));
    Rat mmin;
    bool have = false;

    for (const auto& sd : seeds) {
        const Normalised N = normalise(mons, coeffs, sd.w, n);
        mmin = Rat(0);
        have = false;
        for (const auto& mo : mons) {
            Rat t = mo.val + dot(mo.v, sd.w);
            if (!have || t < mmin) mmin = t;
            have = true;
        }
        Rat cap = Z - *std::min_element(N.m.begin(), N.m.end()) + 1;
        bool certified = false;
        Vec eta;
        std::vector<ExtRat> residual;
        for (int attempt = 0; attempt < 5 && !certified; ++attempt, cap *= 2) {
            Vec z;
            for (const auto& c : sd.z) z.push_back(Series::constant(c));
            for (int iter = 0; iter < 200; ++iter) {
                CappedPowers pw(z, cap);
                Vec E;
                for (int i = 0; i < n; ++i) E.push_back(capped_sum(N.eq[i], pw));
                if (std::all_of(E.begin(), E.end(), [](const Series& s) { return s.is_exact_zero(); })) break;
                Mat L(n, Vec(n));
                for (int i = 0; i < n; ++i)
                    for (int k = 0; k < n; ++k) L[i][k] = capped_sum(N.jac[i][k], pw);
                for (auto& e : E) e = -e;
                Vec delta;
                try {
                    delta = mat::solve_capped(L, E, cap);
                } catch (const Error& e) {
                    if (e.code() == ErrorCode::NotInvertible)
                        fail(ErrorCode::JacobianDegenerateAtLeadingOrder, "log-Jacobian is singular at leading order");
                    throw;
                }
                for (int k = 0; k < n; ++k) z[k] = cut(z[k] + z[k] * delta[k], cap);
            }
            eta.clear();
            for (int k = 0; k < n; ++k) eta.push_back(z[k].shifted(sd.w[k]));
            residual.clear();
            certified = true;
            for (int i = 0; i < n; ++i) {
                residual.push_back(exact_valuation_at(derivs[i], eta));
                if (!residual.back().is_infinite() && (residual.back().get() < Z || residual.back().get() <= N.m[i]))
                    certified = false;
            }
        }
        if (!certified) fail(ErrorCode::PrecisionInsufficient, "Newton lifting did not reach the requested residual");

        CriticalPoint cp;
        cp.eta = eta;
        cp.val_vector = sd.w;
        cp.residual = ExtRat::infinity();
        std::optional<Rat> radius;  // lower bound for the distance to the true critical point
        for (int i = 0; i < n; ++i) {
            if (residual[i] < cp.residual) cp.residual = residual[i];
            if (!residual[i].is_infinite()) {
                Rat r = residual[i].get() - N.m[i];
                if (!radius || r < *radius) radius = r;
            }
        }
        Rat pv = 2 * Z, ph = 2 * Z;
        if (radius) {
            pv = std::min(pv, Rat(Z + *radius));
            pv = std::min(pv, Rat(mmin + 2 * *radius));
            ph = std::min(ph, Rat(mmin + *radius));
        }
        cp.value_precision = pv;
        cp.value = evaluate(S.W, eta, pv);
        if (!cp.value.is_exact() && cp.value.precision() && *cp.value.precision() > pv) cp.value = cp.value.with_precision(pv);
        if (cp.value.precision()) cp.value_precision = std::min(pv, *cp.value.precision());
        try {
            cp.hessian_val = hessian_certificate(S.W, eta, ph).det_val;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PrecisionInsufficient) throw;
        }
        S.points.push_back(cp);
    }
    return S;
}

HessianCertificate hessian_certificate(const LaurentPoly& W, const Vec& eta, const Rat& target) {
    const int n = W.n;
    const auto vals = valuations_of(eta);
    HessianCertificate H;
    H.hessian = mat::zeros(W.field, n, n);
    for (const auto& [e, c] : W.terms) {
        Series t = term_value(c, e, eta, vals, target);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                if (e[i] && e[k]) H.hessian[i][k] += t.scaled(Scalar::from_int(W.field, e[i] * e[k]));
    }
    H.det = mat::determinant(H.hessian);
    if (H.det.is_zero_to_precision())
        fail(ErrorCode::PrecisionInsufficient, H.det.is_exact() ? "log-Hessian determinant vanishes"
                                                                 : "log-Hessian determinant vanishes to precision " + to_string(*H.det.precision()));
    H.det_val = H.det.valuation().get();
    return H;
}

std::optional<ConvenienceCertificate> certify_set(const CriticalSet& S) {
    ConvenienceCertificate c;
    c.precision_used = S.precision;
    c.morse = true;
    for (const auto& p : S.points)
        if (!p.hessian_val) return std::nullopt;
    c.distinct_values = true;
    for (std::size_t a = 0; a < S.points.size(); ++a)
        for (std::size_t b = a + 1; b < S.points.size(); ++b) {
            Series d = S.points[a].value - S.points[b].value;
            if (d.is_exact_zero()) c.distinct_values = false;
            else if (d.is_zero_to_precision()) return std::nullopt;
        }
    return c;
}

ConvenienceCertificate certify_convenient(const LaurentPoly& W, const Rat& Z, const Rat& cap, int field_budget,
                                          CriticalSet* out) {
    for (Rat z = Z;; z *= 2) {
        CriticalSet S = critical_points(W, z, field_budget);
        auto c = certify_set(S);
        if (c) {
            if (out) *out = std::move(S);
            return *c;
        }
        if (2 * z > cap) fail(ErrorCode::PrecisionInsufficient, "critical values are not separated at precision " + to_string(z));
    }
}

Classification classify_inside(CriticalSet& S, const Polytope& P) {
    Classification cl;
    for (std::size_t k = 0; k < S.points.size(); ++k) {
        auto sv = support_values(P, S.points[k].val_vector);
        bool inside = true;
        for (std::size_t j = 0; j < sv.size(); ++j) {
            if (sv[j] == 0) fail(ErrorCode::BoundaryCase, "critical point " + std::to_string(k) + " lies on facet " + std::to_string(j));
            if (sv[j] < 0) inside = false;
        }
        S.points[k].inside = inside;
        (inside ? cl.inside : cl.outside).push_back(k);
    }
    return cl;
}

BulkSearchResult search_convenient_bulk(const Polytope& P, const BulkSearchOptions& opts) {
    Rng root(opts.seed);
    for (std::size_t t = 0; t < opts.trials; ++t) {
        BulkDeformation b = BulkDeformation::trivial(P.facets.size());
        if (t > 0) {
            Rng rng = root.derive(t);
            for (auto& c : b.c) {
                long re = 0, im = 0;
                while (re == 0 && im == 0) {
                    re = rng.uniform(-opts.norm_bound, opts.norm_bound);
                    im = rng.uniform(-opts.norm_bound, opts.norm_bound);
                }
                c = GaussianRat(Rat(re), Rat(im));
            }
        }
        BulkSearchResult r;
        r.bulk = b;
        r.trial = t;
        try {
            r.certificate = certify_convenient(build_ghv(P, b), opts.precision, 8 * opts.precision, opts.field_budget, &r.critical);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::FieldBudgetExceeded || e.code() == ErrorCode::PrecisionInsufficient ||
                e.code() == ErrorCode::JacobianDegenerateAtLeadingOrder)
                continue;
            throw;
        }
        if (r.certificate.morse && r.certificate.distinct_values && r.critical.unresolved.empty()) return r;
    }
    fail(ErrorCode::SearchExhausted, "no convenient bulk among " + std::to_string(opts.trials) + " trials");
}

// ---- Kodaira–Spencer ---------------------------------------------------------------

namespace {

Series weight_product(const Polytope& P, const BulkDeformation& b, const std::vector<long>& I, const std::vector<Rat>& level,
                      const Vec& y, const Rat& target, const Embedding& embed) {
    check_bulk(P, b);
    if (I.size() != P.facets.size()) fail(ErrorCode::InvalidArgument, "multi-index length differs from the facet count");
    const Field& F = embed.to;
    const Field B = bulk_field(b);
    Scalar c = Scalar::one(F);
    Rat e = 0;
    Exponent total(P.n, 0);
    for (std::size_t j = 0; j < I.size(); ++j) {
        if (I[j] < 0) fail(ErrorCode::InvalidArgument, "multi-index entries must be nonnegative");
        if (!I[j]) continue;
        c *= embed.apply(bulk_scalar(B, b.c[j])).pow(I[j]);
        e += level[j] * I[j];
        for (int i = 0; i < P.n; ++i) total[i] += I[j] * P.facets[j].v[i];
    }
    const Series coeff = Series::monomial(c, e);
    if (std::all_of(I.begin(), I.end(), [](long x) { return x == 0; })) return coeff;
    return term_value(coeff, total, y, valuations_of(y), target);
}

}  // namespace

DiskWeight disk_weight(const Polytope& P, const BulkDeformation& b, const std::vector<long>& I,
                       const std::vector<Rat>& u, const Vec& y, const Rat& target) {
    if (!is_interior(P, u)) fail(ErrorCode::NotInterior, "disk weights need an interior point");
    const Field B = bulk_field(b);
    if (y.empty() || y.front().field() != B)
        fail(ErrorCode::FieldMismatch, "holonomy variables must live over " + describe(B));
    DiskWeight d;
    d.weight = weight_product(P, b, I, support_values(P, u), y, target, Embedding::identity(B));
    for (long x : I) d.maslov += 2 * x;
    return d;
}

Vec ks_evaluate(const std::vector<long>& I, const Polytope& P, const BulkDeformation& b, const CriticalSet& S,
                const std::vector<std::size_t>& points, const Rat& target) {
    std::vector<Rat> level;
    for (const auto& f : P.facets) level.push_back(-f.lambda);
    Vec out;
    for (std::size_t k : points) out.push_back(weight_product(P, b, I, level, S.points.at(k).eta, target, S.embed));
    return out;
}

KsRank ks_surjectivity_check(const std::vector<std::vector<long>>& monomials, const Polytope& P,
                             const BulkDeformation& b, const CriticalSet& S, const std::vector<std::size_t>& points,
                             const Rat& target) {
    KsRank r;
    if (monomials.empty() || points.empty()) return r;
    Mat M;
    for (const auto& I : monomials) M.push_back(ks_evaluate(I, P, b, S, points, target));
    auto res = mat::valuation_rank(M, target);
    r.rank = res.rank;
    r.resolved = res.resolved;
    return r;
}

std::vector<std::vector<long>> multiindices_up_to(std::size_t facets, long degree) {
    std::vector<std::vector<long>> out;
    std::vector<long> cur(facets, 0);
    for (long d = 0; d <= degree; ++d) {
        std::function<void(std::size_t, long)> fill = [&](std::size_t j, long left) {
            if (j + 1 == facets) {
                cur[j] = left;
                out.push_back(cur);
                return;
            }
            for (long x = left; x >= 0; --x) {
                cur[j] = x;
                fill(j + 1, left - x);
            }
        };
        if (facets == 0) {
            if (d == 0) out.push_back({});
            continue;
        }
        fill(0, d);
    }
    return out;
}

}  // namespace nov
