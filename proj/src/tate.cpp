#include "nov/tate.hpp"

#include <algorithm>
#include <functional>

#include "nov/errors.hpp"

namespace nov {

namespace {

Series cut(const Series& s, const Rat& cap) {
    std::vector<Series::Term> kept;
    for (const auto& t : s.terms())
        if (t.first < cap) kept.push_back(t);
    return Series::from_terms(s.field(), std::move(kept));
}

std::size_t ipow(std::size_t n, std::int64_t p) {
    std::size_t r = 1;
    for (std::int64_t i = 0; i < p; ++i) r *= n;
    return r;
}

void require_odd_prime(std::int64_t p) {
    if (p < 3 || mpz_probab_prime_p(Int(static_cast<long>(p)).get_mpz_t(), 30) == 0)
        fail(ErrorCode::InvalidArgument, "p must be an odd prime, got " + std::to_string(p));
}

// Positive exponents as a multiset plus the free rank of one window.
struct WindowStats {
    std::map<Rat, long> torsion;
    long free = 0;
};

WindowStats window_stats(const FilteredComplex& C, std::int64_t p, int M) {
    TateComplex T = tate_differential(C, p, M);
    // The bound only needs the largest exponent per row and column.
    Rat row_sum = 0, col_sum = 0;
    std::vector<Rat> row_max(T.d.rows, Rat(0));
    for (std::size_t c = 0; c < T.d.cols; ++c) {
        Rat cm = 0;
        for (const auto& [r, v] : T.d.col[c]) {
            Rat e = *v.max_exponent().value;
            cm = std::max(cm, e);
            row_max[r] = std::max(row_max[r], e);
        }
        col_sum += cm;
    }
    for (const auto& r : row_max) row_sum += r;
    const Rat P = std::min(row_sum, col_sum) + 1;
    std::vector<Rat> sv = sparse_smith_valuations(T.d, P);
    WindowStats s;
    for (const auto& v : sv)
        if (v > 0) ++s.torsion[v];
    s.free = static_cast<long>(T.d.cols) - 2 * static_cast<long>(sv.size());
    return s;
}

std::map<Rat, long> difference(const std::map<Rat, long>& a, const std::map<Rat, long>& b) {
    std::map<Rat, long> d = a;
    for (const auto& [k, c] : b) d[k] -= c;
    for (auto it = d.begin(); it != d.end();) it = it->second == 0 ? d.erase(it) : std::next(it);
    return d;
}

std::string describe_multiset(const std::map<Rat, long>& m) {
    std::string out = "{";
    for (const auto& [k, c] : m) {
        if (out.size() > 1) out += ", ";
        out += to_string(k) + " x" + std::to_string(c);
    }
    return out + "}";
}

}  // namespace

// ---- sparse matrices ---------------------------------------------------------

void SparseMatrix::add(std::size_t r, std::size_t c, const Series& v) {
    if (v.is_exact_zero()) return;
    auto [it, fresh] = col[c].try_emplace(r, v);
    if (!fresh) {
        it->second += v;
        if (it->second.is_exact_zero()) col[c].erase(it);
    }
}

std::size_t SparseMatrix::nonzeros() const {
    std::size_t n = 0;
    for (const auto& c : col) n += c.size();
    return n;
}

Mat SparseMatrix::dense(const Field& f) const {
    Mat m = mat::zeros(f, rows, cols);
    for (std::size_t c = 0; c < cols; ++c)
        for (const auto& [r, v] : col[c]) m[r][c] = v;
    return m;
}

SparseMatrix sparse_mul(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols != b.rows) fail(ErrorCode::InvalidArgument, "shape mismatch in sparse product");
    SparseMatrix out(a.rows, b.cols);
    for (std::size_t c = 0; c < b.cols; ++c)
        for (const auto& [k, bv] : b.col[c])
            for (const auto& [r, av] : a.col[k]) out.add(r, c, av * bv);
    return out;
}

bool is_zero(const SparseMatrix& a) { return a.nonzeros() == 0; }

std::vector<Rat> sparse_smith_valuations(const SparseMatrix& a, const Rat& P) {
    // Row-major working copy, entries cut at P.
    std::vector<std::map<std::size_t, Series>> rows(a.rows);
    std::vector<std::map<std::size_t, bool>> in_col(a.cols);
    for (std::size_t c = 0; c < a.cols; ++c)
        for (const auto& [r, v] : a.col[c]) {
            Series s = cut(v, P);
            if (s.is_exact_zero()) continue;
            rows[r][c] = s;
            in_col[c][r] = true;
        }
    std::vector<Rat> out;
    Rat floor = 0;
    for (;;) {
        std::optional<std::pair<std::size_t, std::size_t>> pivot;
        std::optional<Rat> best;
        for (std::size_t r = 0; r < rows.size() && !(best && *best == floor); ++r)
            for (const auto& [c, v] : rows[r]) {
                Rat w = v.valuation().get();
                if (!best || w < *best) {
                    best = w;
                    pivot = {r, c};
                    if (w == floor) break;
                }
            }
        if (!pivot) break;
        floor = *best;
        const auto [pr, pc] = *pivot;
        out.push_back(*best);
        const Series inv = rows[pr][pc].invert(P);
        std::vector<std::size_t> targets;
        for (const auto& [r, flag] : in_col[pc])
            if (r != pr) targets.push_back(r);
        for (std::size_t r : targets) {
            const Series f = cut(rows[r][pc] * inv, P);
            for (const auto& [c, v] : rows[pr]) {
                if (c == pc) continue;
                Series nv = cut((rows[r].count(c) ? rows[r][c] : Series::zero(v.field())) - f * v, P);
                if (nv.is_exact_zero()) {
                    rows[r].erase(c);
                    in_col[c].erase(r);
                } else {
                    rows[r][c] = nv;
                    in_col[c][r] = true;
                }
            }
            rows[r].erase(pc);
        }
        for (const auto& [c, v] : rows[pr]) in_col[c].erase(pr);
        rows[pr].clear();
        in_col[pc].clear();
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---- Borel model -------------------------------------------------------------

BorelMorseComplex borel_morse_complex(std::int64_t p, int l_max, const Field& coefficients) {
    require_odd_prime(p);
    if (l_max < 1) fail(ErrorCode::InvalidArgument, "l_max must be at least 1");
    BorelMorseComplex B;
    B.p = p;
    B.l_max = l_max;
    B.field = coefficients ? coefficients : prime_field(p);
    const int top = 2 * l_max + 1;
    auto idx = [&](int k, std::int64_t m) { return static_cast<std::size_t>(k * p + ((m % p) + p) % p); };
    for (int k = 0; k <= top; ++k)
        for (std::int64_t m = 0; m < p; ++m) {
            B.labels.push_back("Z_" + std::to_string(k) + "^" + std::to_string(m));
            B.degree.push_back(k);
        }
    const std::size_t n = B.labels.size();
    B.d = mat::zeros(B.field, n, n);
    const Series one = Series::one(B.field);
    for (int k = 0; k < top; ++k)
        for (std::int64_t m = 0; m < p; ++m) {
            const std::size_t src = idx(k, m);
            if (k % 2 == 0) {
                B.d[idx(k + 1, m)][src] += one;
                B.d[idx(k + 1, m + 1)][src] -= one;
            } else {
                for (std::int64_t j = 0; j < p; ++j) B.d[idx(k + 1, j)][src] += one;
            }
        }
    return B;
}

namespace {

// Ranks of a cochain complex with one block of size `width` per degree.
std::vector<std::size_t> degree_ranks(const BorelMorseComplex& B, std::size_t width,
                                      const std::function<Series(int, std::size_t, std::size_t)>& entry) {
    auto block_rank = [&](int k) -> std::size_t {
        if (k < 0 || k >= 2 * B.l_max + 1) return 0;
        Mat blk = mat::zeros(B.field, width, width);
        for (std::size_t i = 0; i < width; ++i)
            for (std::size_t j = 0; j < width; ++j) blk[i][j] = entry(k, i, j);
        return mat::valuation_rank(blk, Rat(1)).rank;
    };
    std::vector<std::size_t> ranks;
    for (int k = 0; k <= 2 * B.l_max; ++k) ranks.push_back(width - block_rank(k) - block_rank(k - 1));
    return ranks;
}

}  // namespace

std::vector<std::size_t> borel_cohomology_ranks(const BorelMorseComplex& B) {
    const std::size_t p = static_cast<std::size_t>(B.p);
    // Orbit complex: the image of the orbit of Z_k^0 summed over the target orbit.
    return degree_ranks(B, 1, [&](int k, std::size_t, std::size_t) {
        Series s = Series::zero(B.field);
        for (std::size_t i = 0; i < p; ++i) s += B.d[(k + 1) * p + i][k * p];
        return s;
    });
}

std::vector<std::size_t> sphere_cohomology_ranks(const BorelMorseComplex& B) {
    const std::size_t p = static_cast<std::size_t>(B.p);
    return degree_ranks(B, p, [&](int k, std::size_t i, std::size_t j) { return B.d[(k + 1) * p + i][k * p + j]; });
}

bool is_equivariant(const BorelMorseComplex& B) {
    const std::size_t p = static_cast<std::size_t>(B.p);
    const std::size_t n = B.labels.size();
    auto shift = [&](std::size_t x) { return (x / p) * p + (x % p + 1) % p; };
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (!(B.d[r][c] == B.d[shift(r)][shift(c)])) return false;
    return true;
}

// ---- tensor powers -----------------------------------------------------------

std::vector<std::size_t> tensor_index_digits(std::size_t index, std::size_t n, std::int64_t p) {
    std::vector<std::size_t> d(static_cast<std::size_t>(p));
    for (std::size_t i = d.size(); i-- > 0;) {
        d[i] = index % n;
        index /= n;
    }
    return d;
}

TensorPower tensor_power_with_zeta(const Mat& d, const std::vector<int>& degree, std::int64_t p) {
    const std::size_t n = degree.size();
    if (n == 0 || d.size() != n) fail(ErrorCode::InvalidArgument, "base differential must be square");
    const Field& F = d[0][0].field();
    TensorPower T;
    T.p = p;
    T.base_dim = n;
    const std::size_t N = ipow(n, p);
    T.d = SparseMatrix(N, N);
    T.zeta = SparseMatrix(N, N);
    auto encode = [&](const std::vector<std::size_t>& digits) {
        std::size_t r = 0;
        for (std::size_t v : digits) r = r * n + v;
        return r;
    };
    for (std::size_t c = 0; c < N; ++c) {
        const auto x = tensor_index_digits(c, n, p);
        int total = 0;
        for (std::size_t v : x) total += degree[v];
        T.degree.push_back(((total % 2) + 2) % 2);
        int before = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (std::size_t q = 0; q < n; ++q) {
                if (d[q][x[i]].is_exact_zero()) continue;
                auto y = x;
                y[i] = q;
                T.d.add(encode(y), c, before % 2 ? -d[q][x[i]] : d[q][x[i]]);
            }
            before += degree[x[i]];
        }
        int head = 0;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) head += degree[x[i]];
        const bool negative = (degree[x.back()] * head) % 2 != 0;
        std::vector<std::size_t> y(x.size());
        y[0] = x.back();
        for (std::size_t i = 1; i < x.size(); ++i) y[i] = x[i - 1];
        T.zeta.add(encode(y), c, negative ? -Series::one(F) : Series::one(F));
    }
    return T;
}

// ---- Tate complex ------------------------------------------------------------

std::size_t TateComplex::index(int level, int theta, std::size_t x) const {
    return (static_cast<std::size_t>(level + window) * 2 + static_cast<std::size_t>(theta)) * block + x;
}

TateComplex tate_differential(const FilteredComplex& C, std::int64_t p, int M) {
    require_odd_prime(p);
    if (M < 0) fail(ErrorCode::WindowTooSmall, "window must be nonnegative");
    Mat A = normalized_differential(C);
    if (characteristic(C.field) == 0) A = mat::reduce_mod_p(A, p);
    else if (characteristic(C.field) != p)
        fail(ErrorCode::FieldMismatch, "base complex has characteristic " + std::to_string(characteristic(C.field)));
    for (const auto& row : A)
        for (const auto& e : row)
            if (!e.is_exact()) fail(ErrorCode::InvalidComplex, "Tate construction needs exact entries");
    std::vector<int> degree;
    for (const auto& g : C.gens) degree.push_back(((g.degree % 2) + 2) % 2);
    const TensorPower TP = tensor_power_with_zeta(A, degree, p);
    const Field F = A[0][0].field();

    // Norm element id + zeta + ... + zeta^{p-1} and id - zeta.
    SparseMatrix id(TP.d.rows, TP.d.cols);
    for (std::size_t i = 0; i < id.cols; ++i) id.add(i, i, Series::one(F));
    SparseMatrix norm = id, power = id;
    for (std::int64_t k = 1; k < p; ++k) {
        power = sparse_mul(TP.zeta, power);
        for (std::size_t c = 0; c < power.cols; ++c)
            for (const auto& [r, v] : power.col[c]) norm.add(r, c, v);
    }

    TateComplex T;
    T.p = p;
    T.window = M;
    T.block = TP.d.rows;
    T.field = F;
    const std::size_t dim = static_cast<std::size_t>(2 * M + 1) * 2 * T.block;
    T.d = SparseMatrix(dim, dim);
    const Series one = Series::one(F);
    for (int j = -M; j <= M; ++j)
        for (std::size_t x = 0; x < T.block; ++x) {
            const std::size_t e = T.index(j, 0, x), f = T.index(j, 1, x);
            for (const auto& [y, v] : TP.d.col[x]) {
                T.d.add(T.index(j, 0, y), e, v);
                T.d.add(T.index(j, 1, y), f, -v);
            }
            T.d.add(T.index(j, 1, x), e, one);
            for (const auto& [y, v] : TP.zeta.col[x]) T.d.add(T.index(j, 1, y), e, -v);
            if (j < M)
                for (const auto& [y, v] : norm.col[x]) T.d.add(T.index(j + 1, 0, y), f, v);
        }
    return T;
}

TateTorsion tate_torsion_exponents(const FilteredComplex& C, std::int64_t p, int M) {
    if (M < 2) fail(ErrorCode::WindowTooSmall, "window must be at least 2");
    const WindowStats s0 = window_stats(C, p, M - 2), s1 = window_stats(C, p, M - 1), s2 = window_stats(C, p, M);
    const auto d1 = difference(s1.torsion, s0.torsion), d2 = difference(s2.torsion, s1.torsion);
    if (d1 != d2 || s1.free - s0.free != s2.free - s1.free)
        fail(ErrorCode::WindowTooSmall, "increments differ between windows " + std::to_string(M - 1) + " and " +
                                            std::to_string(M) + ": " + describe_multiset(d1) + " vs " +
                                            describe_multiset(d2));
    // Two levels are added per step and each level carries a theta pair.
    TateTorsion out;
    out.window = M;
    out.total = 0;
    for (const auto& [e, c] : d2) {
        if (c < 0 || c % 4 != 0)
            fail(ErrorCode::WindowTooSmall, "increment " + describe_multiset(d2) + " does not split over levels");
        for (long i = 0; i < c / 4; ++i) {
            out.exponents.push_back(e);
            out.total += e;
        }
    }
    const long df = s2.free - s1.free;
    if (df < 0 || df % 4 != 0) fail(ErrorCode::WindowTooSmall, "free increment does not split over levels");
    out.free_rank = static_cast<std::size_t>(df / 4);
    std::sort(out.exponents.begin(), out.exponents.end(), [](const Rat& a, const Rat& b) { return a > b; });
    return out;
}

QuasiFrobeniusReport quasi_frobenius_check(const FilteredComplex& C, std::int64_t p, int M) {
    QuasiFrobeniusReport rep;
    FilteredComplex base = C;
    if (characteristic(C.field) == 0) {
        base.d = mat::reduce_mod_p(C.d, p);
        base.field = reduction_target(C.field, p);
    }
    const Barcode bc = barcode(base);
    rep.base_exponents = bc.finite;
    rep.base_free = bc.infinite;
    for (const auto& g : rep.base_exponents) rep.expected.push_back(Rat(p) * g);
    const TateTorsion tt = tate_torsion_exponents(C, p, M);
    rep.tate_exponents = tt.exponents;
    rep.tate_free = tt.free_rank;
    rep.ok = rep.tate_exponents == rep.expected && rep.tate_free == rep.base_free;
    if (rep.tate_free != rep.base_free)
        rep.witness = "free rank " + std::to_string(rep.tate_free) + " vs " + std::to_string(rep.base_free);
    else if (!rep.ok)
        rep.witness = "torsion exponents differ from p times the base exponents";
    return rep;
}

SmithDemo smith_demo(const Rat& base_tau, const Rat& depth_bound, long bars, std::int64_t p, int k_max) {
    if (depth_bound <= 0) fail(ErrorCode::InvalidArgument, "depth bound must be positive");
    if (p < 2) fail(ErrorCode::InvalidArgument, "p must be at least 2");
    SmithDemo out;
    out.rhs = Rat(bars) * depth_bound;
    if (base_tau <= 0) {
        out.vacuous = true;
        out.lhs = 0;
        return out;
    }
    Rat growth = base_tau;
    for (int k = 0; k <= k_max; ++k) {
        if (growth > out.rhs) {
            out.k = k;
            out.lhs = growth;
            return out;
        }
        growth *= Rat(p);
    }
    out.lhs = growth;
    return out;
}

}  // namespace nov
