#include "nov/filtered.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "nov/errors.hpp"

namespace nov {

namespace {

int parity(int d) { return ((d % 2) + 2) % 2; }

std::string label_of(const FilteredComplex& C, std::size_t i) {
    return C.gens[i].label.empty() ? "#" + std::to_string(i) : C.gens[i].label;
}

// Row elimination over the valuation ring, always pivoting on an entry of
// least valuation among the first `dcols` columns. Row operations only
// combine non-pivot rows, so they are unimodular; the extra column rides
// along and records the transformed vector.
struct LatticeReduction {
    Mat a;
    std::size_t dcols = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pivots;
    std::vector<bool> row_pivot;
};

LatticeReduction reduce_lattice(const Mat& d, const Vec* extra, const Rat& P) {
    LatticeReduction R;
    const std::size_t n = d.size();
    R.dcols = n ? d.front().size() : 0;
    R.a.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& x : d[i]) R.a[i].push_back(x.with_precision(P));
        if (extra) R.a[i].push_back((*extra)[i].with_precision(P));
    }
    R.row_pivot.assign(n, false);
    std::vector<bool> col_pivot(R.dcols, false);
    for (;;) {
        std::size_t pi = n, pj = 0;
        Rat best;
        for (std::size_t i = 0; i < n; ++i) {
            if (R.row_pivot[i]) continue;
            for (std::size_t j = 0; j < R.dcols; ++j) {
                if (col_pivot[j] || R.a[i][j].terms().empty()) continue;
                const Rat& v = R.a[i][j].terms().front().first;
                if (pi == n || v < best) {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if (pi == n) break;
        R.row_pivot[pi] = true;
        col_pivot[pj] = true;
        R.pivots.emplace_back(pi, pj);
        const Series inv = R.a[pi][pj].invert(P - 2 * best);
        for (std::size_t i = 0; i < n; ++i) {
            if (R.row_pivot[i] || R.a[i][pj].terms().empty()) continue;
            const Series factor = R.a[i][pj] * inv;
            for (std::size_t k = 0; k < R.a[i].size(); ++k) {
                if (k == pj || R.a[pi][k].terms().empty()) continue;
                R.a[i][k] = (R.a[i][k] - factor * R.a[pi][k]).with_precision(P);
            }
            R.a[i][pj] = Series::big_o(R.a[i][pj].field(), P);
        }
    }
    return R;
}

void check_shape(const Mat& m, std::size_t rows, std::size_t cols, const std::string& what) {
    if (m.size() != rows || (rows && m.front().size() != cols))
        fail(ErrorCode::InvalidArgument, what + " has the wrong shape");
}

}  // namespace

// ---- validation ----------------------------------------------------------------

ValidationReport validate(const FilteredComplex& C) {
    ValidationReport rep;
    auto violate = [&](const std::string& cond, const std::string& wit) {
        rep.ok = false;
        rep.condition = cond;
        rep.witness = wit;
        return rep;
    };
    const std::size_t n = C.size();
    if (C.d.size() != n) return violate("shape", "differential has " + std::to_string(C.d.size()) + " rows");
    for (const auto& row : C.d)
        if (row.size() != n) return violate("shape", "differential is not square");
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < n; ++p) {
            const Series& e = C.d[q][p];
            if (e.field() != C.field) return violate("field", "entry " + label_of(C, q) + "<-" + label_of(C, p));
            if (!e.is_exact()) return violate("exact entries", "entry " + label_of(C, q) + "<-" + label_of(C, p) + " carries a precision horizon");
            if (e.is_exact_zero()) continue;
            if (parity(C.gens[q].degree) != parity(C.gens[p].degree - 1))
                return violate("grading", "d(" + label_of(C, p) + ") has a component on " + label_of(C, q) + " of the same degree");
            const Rat level = C.gens[q].action - e.valuation().get();
            const bool ok = C.mode == FiltrationMode::Strict ? level < C.gens[p].action : level <= C.gens[p].action;
            if (!ok)
                return violate(C.mode == FiltrationMode::Strict ? "strict action decrease" : "action non-increase",
                               "d(" + label_of(C, p) + ") reaches level " + to_string(level) + " at " + label_of(C, q) +
                                   " but l(" + label_of(C, p) + ") = " + to_string(C.gens[p].action));
        }
    Mat sq = mat::mul(C.d, C.d);
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < n; ++p)
            if (!sq[q][p].is_exact_zero())
                return violate("d^2 = 0", "coefficient of " + label_of(C, q) + " in d^2(" + label_of(C, p) + ") is " + sq[q][p].to_string());
    return rep;
}

void require_valid(const FilteredComplex& C) {
    ValidationReport rep = validate(C);
    if (!rep.ok) fail(ErrorCode::InvalidComplex, rep.condition + ": " + rep.witness);
}

std::optional<Rat> chain_level(const FilteredComplex& C, const Vec& chain) {
    std::optional<Rat> level;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (chain[i].is_exact_zero()) continue;
        Rat l = C.gens[i].action - chain[i].valuation().get();
        if (!level || *level < l) level = l;
    }
    return level;
}

// ---- barcodes ------------------------------------------------------------------

Mat normalized_differential(const FilteredComplex& C) {
    const std::size_t n = C.size();
    Mat out = C.d;
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < n; ++p)
            if (!out[q][p].is_exact_zero()) out[q][p] = out[q][p].shifted(C.gens[p].action - C.gens[q].action);
    return out;
}

Rat smith_precision_bound(const Mat& a) {
    const std::size_t r = a.size(), c = r ? a.front().size() : 0;
    std::vector<Rat> row_max(r, Rat(0)), col_max(c, Rat(0));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            if (a[i][j].terms().empty()) continue;
            const Rat& top = a[i][j].terms().back().first;
            if (top > row_max[i]) row_max[i] = top;
            if (top > col_max[j]) col_max[j] = top;
        }
    Rat rs = std::accumulate(row_max.begin(), row_max.end(), Rat(0));
    Rat cs = std::accumulate(col_max.begin(), col_max.end(), Rat(0));
    return std::min(rs, cs) + 1;
}

std::vector<Rat> smith_valuations(const Mat& a) {
    for (const auto& row : a)
        for (const auto& x : row)
            if (!x.is_exact_zero() && x.valuation().get() < 0)
                fail(ErrorCode::InvalidArgument, "matrix is not over the valuation ring");
    const Rat P = smith_precision_bound(a);
    LatticeReduction R = reduce_lattice(a, nullptr, P);
    std::vector<Rat> out;
    for (const auto& [i, j] : R.pivots) out.push_back(R.a[i][j].terms().front().first);
    return out;
}

Barcode barcode(const FilteredComplex& C) {
    require_valid(C);
    Barcode B;
    B.finite = smith_valuations(normalized_differential(C));
    std::sort(B.finite.begin(), B.finite.end(), [](const Rat& x, const Rat& y) { return x > y; });
    B.infinite = C.size() - 2 * B.finite.size();
    return B;
}

Rat boundary_depth(const FilteredComplex& C) {
    Barcode B = barcode(C);
    return B.finite.empty() ? Rat(0) : B.finite.front();
}

Rat total_bar_length(const FilteredComplex& C) {
    Barcode B = barcode(C);
    return std::accumulate(B.finite.begin(), B.finite.end(), Rat(0));
}

// ---- spectral invariants -------------------------------------------------------

SpectralValue spectral_invariant(const FilteredComplex& C, const Vec& cycle) {
    require_valid(C);
    const std::size_t n = C.size();
    if (cycle.size() != n) fail(ErrorCode::InvalidArgument, "chain has the wrong length");
    for (const auto& x : cycle)
        if (!x.is_exact()) fail(ErrorCode::InvalidArgument, "chain coefficients must be exact");
    Vec boundary = mat::apply(C.d, cycle);
    for (std::size_t q = 0; q < n; ++q)
        if (!boundary[q].is_exact_zero()) fail(ErrorCode::NotClosed, "boundary has a component on " + label_of(C, q));

    SpectralValue out;
    if (std::all_of(cycle.begin(), cycle.end(), [](const Series& s) { return s.is_exact_zero(); })) {
        out.minus_infinity = true;
        return out;
    }
    // Normalised coordinates a_i T^{-l(x_i)}, shifted into the valuation ring.
    Vec coords(n);
    Rat low;
    bool have_low = false;
    for (std::size_t i = 0; i < n; ++i) {
        coords[i] = cycle[i].shifted(-C.gens[i].action);
        if (!coords[i].is_exact_zero()) {
            Rat v = coords[i].valuation().get();
            if (!have_low || v < low) low = v;
            have_low = true;
        }
    }
    const Rat s = low < 0 ? Rat(-low) : Rat(0);
    for (auto& x : coords) x = x.shifted(s);
    const Mat dn = normalized_differential(C);
    Mat aug = dn;
    for (std::size_t i = 0; i < n; ++i) aug[i].push_back(coords[i]);
    const Rat P0 = smith_precision_bound(aug);

    for (Rat P = P0;; P = 2 * P + 1) {
        LatticeReduction R = reduce_lattice(dn, &coords, P);
        const std::size_t ec = R.dcols;
        bool any = false;
        Rat m;
        for (std::size_t i = 0; i < n; ++i) {
            if (R.row_pivot[i] || R.a[i][ec].terms().empty()) continue;
            const Rat v = R.a[i][ec].terms().front().first;
            if (!any || v < m) m = v;
            any = true;
        }
        if (!any) {
            // Below the rigorous bound every non-pivot coordinate vanishes: the class is zero.
            out.minus_infinity = true;
            return out;
        }
        out.value = s - m;
        // Back-substitution for b with the pivot coordinates of E(coords - dn b) zero.
        std::vector<Series> c(n);
        for (std::size_t i = 0; i < n; ++i) c[i] = R.a[i][ec];
        Vec beta(n, Series::zero(C.field));
        for (std::size_t k = R.pivots.size(); k-- > 0;) {
            const auto [qk, pk] = R.pivots[k];
            const Series& piv = R.a[qk][pk];
            const Rat g = piv.terms().front().first;
            Series bk = c[qk].is_zero_to_precision() ? Series::zero(C.field) : c[qk] * piv.invert(P - 2 * g);
            std::vector<Series::Term> kept(bk.terms().begin(), bk.terms().end());
            bk = Series::from_terms(C.field, kept);
            for (std::size_t j = 0; j < k; ++j) {
                const std::size_t qj = R.pivots[j].first;
                if (!R.a[qj][pk].terms().empty()) c[qj] = c[qj] - bk * R.a[qj][pk];
            }
            // beta coefficient on x_{p_k}: b_k T^{l(p_k) - s}.
            beta[pk] = bk.shifted(C.gens[pk].action - s);
        }
        Vec db = mat::apply(C.d, beta);
        Vec rep(n);
        for (std::size_t i = 0; i < n; ++i) rep[i] = cycle[i] - db[i];
        auto level = chain_level(C, rep);
        if (level && *level == out.value) {
            out.representative = rep;
            return out;
        }
        if (P > 64 * (P0 + 1)) fail(ErrorCode::PrecisionInsufficient, "could not certify an attaining representative");
    }
}

// ---- persistence -----------------------------------------------------------------

bool is_generator_filtered(const FilteredComplex& C) {
    for (const auto& row : C.d)
        for (const auto& e : row) {
            if (e.is_exact_zero()) continue;
            if (e.terms().size() != 1 || e.terms().front().first != 0) return false;
        }
    return true;
}

std::vector<Interval> persistence_intervals(const FilteredComplex& C) {
    require_valid(C);
    if (!is_generator_filtered(C))
        fail(ErrorCode::NotGeneratorFiltered, "persistence intervals need a differential with constant entries");
    const std::size_t n = C.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return C.gens[a].action < C.gens[b].action; });
    // Columns of the reordered boundary matrix, as sparse maps row -> scalar.
    std::vector<std::vector<Scalar>> col(n, std::vector<Scalar>(n, Scalar::zero(C.field)));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const Series& e = C.d[order[i]][order[j]];
            if (!e.is_exact_zero()) col[j][i] = e.terms().front().second;
        }
    auto low = [&](std::size_t j) -> long {
        for (std::size_t i = n; i-- > 0;)
            if (!col[j][i].is_zero()) return static_cast<long>(i);
        return -1;
    };
    std::vector<long> owner(n, -1);  // row index -> column whose low it is
    std::vector<bool> paired(n, false);
    std::vector<Interval> out;
    for (std::size_t j = 0; j < n; ++j) {
        long l = low(j);
        while (l >= 0 && owner[l] >= 0) {
            const std::size_t k = static_cast<std::size_t>(owner[l]);
            const Scalar f = col[j][l] / col[k][l];
            for (std::size_t i = 0; i < n; ++i)
                if (!col[k][i].is_zero()) col[j][i] -= f * col[k][i];
            l = low(j);
        }
        if (l >= 0) {
            owner[l] = static_cast<long>(j);
            paired[l] = paired[j] = true;
            const Rat birth = C.gens[order[l]].action, death = C.gens[order[j]].action;
            if (birth != death) out.push_back({birth, death, parity(C.gens[order[l]].degree)});
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!paired[i]) out.push_back({C.gens[order[i]].action, std::nullopt, parity(C.gens[order[i]].degree)});
    return out;
}

std::size_t persistence_rank(const FilteredComplex& C, const Rat& s) {
    std::size_t count = 0;
    for (const auto& iv : persistence_intervals(C))
        if (iv.birth <= s && (!iv.death || s < *iv.death)) ++count;
    return count;
}

// ---- bottleneck distance -------------------------------------------------------

bool bottleneck_feasible(const std::vector<Rat>& a, const std::vector<Rat>& b, const Rat& delta,
                         BottleneckConvention conv) {
    const Rat match_bound = conv == BottleneckConvention::LengthDifference ? delta : 2 * delta;
    const Rat short_bound = 2 * delta;
    const std::size_t na = a.size(), nb = b.size(), N = na + nb;
    // Left: bars of a, then diagonal copies of b. Right: bars of b, then diagonal copies of a.
    std::vector<std::vector<std::size_t>> adj(N);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            Rat diff = a[i] - b[j];
            if (diff < 0) diff = -diff;
            if (diff <= match_bound) adj[i].push_back(j);
        }
        if (a[i] <= short_bound) adj[i].push_back(nb + i);
    }
    for (std::size_t j = 0; j < nb; ++j) {
        if (b[j] <= short_bound) adj[na + j].push_back(j);
        for (std::size_t i = 0; i < na; ++i) adj[na + j].push_back(nb + i);
    }
    std::vector<long> match_right(N, -1);
    std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t u, std::vector<bool>& seen) {
        for (std::size_t v : adj[u]) {
            if (seen[v]) continue;
            seen[v] = true;
            if (match_right[v] < 0 || augment(static_cast<std::size_t>(match_right[v]), seen)) {
                match_right[v] = static_cast<long>(u);
                return true;
            }
        }
        return false;
    };
    for (std::size_t u = 0; u < N; ++u) {
        std::vector<bool> seen(N, false);
        if (!augment(u, seen)) return false;
    }
    return true;
}

ExtRat bottleneck_distance(const Barcode& A, const Barcode& B, BottleneckConvention conv) {
    if (A.infinite != B.infinite) return ExtRat::infinity();
    const Rat c = conv == BottleneckConvention::LengthDifference ? Rat(1) : Rat(2);
    std::vector<Rat> cand{Rat(0)};
    for (const auto& x : A.finite) cand.push_back(x / 2);
    for (const auto& y : B.finite) cand.push_back(y / 2);
    for (const auto& x : A.finite)
        for (const auto& y : B.finite) {
            Rat d = x - y;
            if (d < 0) d = -d;
            cand.push_back(d / c);
        }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    std::size_t lo = 0, hi = cand.size() - 1;  // the largest candidate is always feasible
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (bottleneck_feasible(A.finite, B.finite, cand[mid], conv)) hi = mid;
        else lo = mid + 1;
    }
    return ExtRat::of(cand[lo]);
}

// ---- quasiequivalences -----------------------------------------------------------

QuasiReport check_quasiequivalence(const FilteredComplex& C1, const FilteredComplex& C2, const Mat& Phi,
                                   const Mat& Psi, const Mat& K1, const Mat& K2, const Rat& delta) {
    QuasiReport rep;
    auto fail_with = [&](const std::string& why) {
        rep.ok = false;
        rep.failure = why;
        return rep;
    };
    const std::size_t n1 = C1.size(), n2 = C2.size();
    check_shape(Phi, n2, n1, "Phi");
    check_shape(Psi, n1, n2, "Psi");
    check_shape(K1, n1, n1, "K1");
    check_shape(K2, n2, n2, "K2");
    if (delta < 0) return fail_with("delta must be nonnegative");

    auto degree_ok = [](const Mat& M, const FilteredComplex& from, const FilteredComplex& to, int shift) {
        for (std::size_t q = 0; q < M.size(); ++q)
            for (std::size_t p = 0; p < M[q].size(); ++p)
                if (!M[q][p].is_exact_zero() && parity(to.gens[q].degree) != parity(from.gens[p].degree + shift))
                    return false;
        return true;
    };
    if (!degree_ok(Phi, C1, C2, 0)) return fail_with("Phi does not preserve degree");
    if (!degree_ok(Psi, C2, C1, 0)) return fail_with("Psi does not preserve degree");
    if (!degree_ok(K1, C1, C1, 1)) return fail_with("K1 does not raise degree by one");
    if (!degree_ok(K2, C2, C2, 1)) return fail_with("K2 does not raise degree by one");

    auto equal = [](const Mat& a, const Mat& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < a[i].size(); ++j)
                if (!(a[i][j] - b[i][j]).is_exact_zero()) return false;
        return true;
    };
    if (!equal(mat::mul(Phi, C1.d), mat::mul(C2.d, Phi))) return fail_with("Phi is not a chain map");
    if (!equal(mat::mul(Psi, C2.d), mat::mul(C1.d, Psi))) return fail_with("Psi is not a chain map");
    if (!equal(mat::sub(mat::mul(Psi, Phi), mat::identity(C1.field, n1)),
               mat::add(mat::mul(C1.d, K1), mat::mul(K1, C1.d))))
        return fail_with("Psi Phi - Id differs from d K1 + K1 d");
    if (!equal(mat::sub(mat::mul(Phi, Psi), mat::identity(C2.field, n2)),
               mat::add(mat::mul(C2.d, K2), mat::mul(K2, C2.d))))
        return fail_with("Phi Psi - Id differs from d K2 + K2 d");

    auto shift_ok = [](const Mat& M, const FilteredComplex& from, const FilteredComplex& to, const Rat& bound,
                       std::string& witness) {
        for (std::size_t q = 0; q < M.size(); ++q)
            for (std::size_t p = 0; p < M[q].size(); ++p) {
                if (M[q][p].is_exact_zero()) continue;
                const Rat raise = to.gens[q].action - M[q][p].valuation().get() - from.gens[p].action;
                if (raise > bound) {
                    witness = "entry (" + std::to_string(q) + "," + std::to_string(p) + ") raises the level by " + to_string(raise);
                    return false;
                }
            }
        return true;
    };
    std::string w;
    if (!shift_ok(Phi, C1, C2, delta, w)) return fail_with("Phi shift exceeds delta: " + w);
    if (!shift_ok(Psi, C2, C1, delta, w)) return fail_with("Psi shift exceeds delta: " + w);
    if (!shift_ok(K1, C1, C1, 2 * delta, w)) return fail_with("K1 shift exceeds 2 delta: " + w);
    if (!shift_ok(K2, C2, C2, 2 * delta, w)) return fail_with("K2 shift exceeds 2 delta: " + w);
    return rep;
}

FilteredComplex dual_complex(const FilteredComplex& C) {
    FilteredComplex D = C;
    for (auto& g : D.gens) g.action = -g.action;
    D.d = mat::transpose(C.d);
    return D;
}

}  // namespace nov
