#include "nov/poly.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>

#include "nov/errors.hpp"

namespace nov {

namespace qpoly {

void trim(QPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

int degree(const QPoly& f) {
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i)
        if (f[i] != 0) return i;
    return -1;
}

QPoly add(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    trim(r);
    return r;
}

QPoly sub(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

QPoly mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

QPoly scale(const QPoly& a, const Rat& c) {
    QPoly r(a);
    for (auto& x : r) x *= c;
    trim(r);
    return r;
}

void divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r) {
    const int db = degree(b);
    if (db < 0) fail(ErrorCode::NotInvertible, "polynomial division by zero");
    r = a;
    trim(r);
    q.assign(std::max(0, degree(r) - db + 1), Rat(0));
    const Rat lead = b[db];
    for (int d = degree(r); d >= db; d = degree(r)) {
        Rat c = r[d] / lead;
        q[d - db] = c;
        for (int i = 0; i <= db; ++i) r[d - db + i] -= c * b[i];
        trim(r);
    }
    trim(q);
}

QPoly rem(const QPoly& a, const QPoly& b) {
    QPoly q, r;
    divmod(a, b, q, r);
    return r;
}

QPoly quo(const QPoly& a, const QPoly& b) {
    QPoly q, r;
    divmod(a, b, q, r);
    return q;
}

QPoly monic(const QPoly& a) {
    const int d = degree(a);
    if (d < 0) return {};
    return scale(a, 1 / a[d]);
}

QPoly gcd(const QPoly& a, const QPoly& b) {
    QPoly x = a, y = b;
    trim(x);
    trim(y);
    while (!y.empty()) {
        QPoly r = rem(x, y);
        x = std::move(y);
        y = std::move(r);
    }
    return monic(x);
}

QPoly derivative(const QPoly& a) {
    if (a.size() <= 1) return {};
    QPoly r(a.size() - 1);
    for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * static_cast<long>(i);
    trim(r);
    return r;
}

Rat eval(const QPoly& a, const Rat& x) {
    Rat acc = 0;
    for (size_t i = a.size(); i-- > 0;) acc = acc * x + a[i];
    return acc;
}

bool is_squarefree(const QPoly& a) { return degree(gcd(a, derivative(a))) == 0; }

std::string to_string(const QPoly& a, const std::string& var) {
    if (degree(a) < 0) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(a); i >= 0; --i) {
        if (a[i] == 0) continue;
        Rat c = a[i];
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        Rat ac = abs(c);
        if (i == 0 || ac != 1) os << nov::to_string(ac);
        if (i > 0) {
            if (ac != 1) os << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    return os.str();
}

ZPoly primitive_integer(const QPoly& a) {
    QPoly t = a;
    trim(t);
    if (t.empty()) return {};
    Int den = 1;
    for (const auto& c : t) den = lcm(den, Int(c.get_den()));
    ZPoly z(t.size());
    Int g = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        Rat v = t[i] * den;
        z[i] = v.get_num();
        g = gcd(g, z[i]);
    }
    if (z.back() < 0) g = -g;
    for (auto& c : z) c /= g;
    return z;
}

QPoly from_integer(const ZPoly& a) {
    QPoly r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = Rat(a[i]);
    trim(r);
    return r;
}

QPoly interpolate(const std::vector<Rat>& xs, const std::vector<Rat>& ys) {
    // Newton divided differences.
    const size_t n = xs.size();
    std::vector<Rat> coef(ys);
    for (size_t j = 1; j < n; ++j)
        for (size_t i = n - 1; i >= j; --i) {
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j]);
            if (i == j) break;
        }
    QPoly result{coef[n - 1]};
    for (size_t k = n - 1; k-- > 0;) {
        result = mul(result, QPoly{-xs[k], Rat(1)});
        result = add(result, QPoly{coef[k]});
    }
    trim(result);
    return result;
}

}  // namespace qpoly

namespace {

// ---- arithmetic over the prime field 𝔽_p with small p --------------------

using FpPoly = std::vector<std::int64_t>;

std::int64_t mod_p(std::int64_t a, std::int64_t p) {
    a %= p;
    return a < 0 ? a + p : a;
}

std::int64_t inv_mod(std::int64_t a, std::int64_t p) {
    std::int64_t t = 0, nt = 1, r = p, nr = mod_p(a, p);
    while (nr != 0) {
        std::int64_t q = r / nr;
        std::tie(t, nt) = std::make_pair(nt, t - q * nt);
        std::tie(r, nr) = std::make_pair(nr, r - q * nr);
    }
    return mod_p(t, p);
}

void fp_trim(FpPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

int fp_deg(const FpPoly& f) { return static_cast<int>(f.size()) - 1; }

FpPoly fp_mul(const FpPoly& a, const FpPoly& b, std::int64_t p) {
    if (a.empty() || b.empty()) return {};
    FpPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    fp_trim(r);
    return r;
}

FpPoly fp_sub(const FpPoly& a, const FpPoly& b, std::int64_t p) {
    FpPoly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = mod_p(r[i] - b[i], p);
    fp_trim(r);
    return r;
}

FpPoly fp_add(const FpPoly& a, const FpPoly& b, std::int64_t p) {
    FpPoly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = (r[i] + b[i]) % p;
    fp_trim(r);
    return r;
}

void fp_divmod(const FpPoly& a, const FpPoly& b, std::int64_t p, FpPoly& q, FpPoly& r) {
    r = a;
    fp_trim(r);
    const int db = fp_deg(b);
    q.assign(std::max(0, fp_deg(r) - db + 1), 0);
    const std::int64_t li = inv_mod(b[db], p);
    while (fp_deg(r) >= db) {
        const int d = fp_deg(r);
        std::int64_t c = r[d] * li % p;
        q[d - db] = c;
        for (int i = 0; i <= db; ++i) r[d - db + i] = mod_p(r[d - db + i] - c * b[i], p);
        fp_trim(r);
    }
    fp_trim(q);
}

FpPoly fp_rem(const FpPoly& a, const FpPoly& b, std::int64_t p) {
    FpPoly q, r;
    fp_divmod(a, b, p, q, r);
    return r;
}

FpPoly fp_monic(const FpPoly& a, std::int64_t p) {
    if (a.empty()) return a;
    std::int64_t li = inv_mod(a.back(), p);
    FpPoly r(a);
    for (auto& c : r) c = c * li % p;
    return r;
}

FpPoly fp_gcd(FpPoly a, FpPoly b, std::int64_t p) {
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
        FpPoly r = fp_rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return fp_monic(a, p);
}

FpPoly fp_derivative(const FpPoly& a, std::int64_t p) {
    if (a.size() <= 1) return {};
    FpPoly r(a.size() - 1);
    for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * static_cast<std::int64_t>(i % p) % p;
    fp_trim(r);
    return r;
}

FpPoly fp_powmod(FpPoly base, Int e, const FpPoly& m, std::int64_t p) {
    FpPoly result{1};
    base = fp_rem(base, m, p);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) result = fp_rem(fp_mul(result, base, p), m, p);
        e >>= 1;
        if (e > 0) base = fp_rem(fp_mul(base, base, p), m, p);
    }
    return result;
}

// Extended gcd: s*a + t*b = 1 for coprime a, b.
void fp_xgcd(const FpPoly& a, const FpPoly& b, std::int64_t p, FpPoly& s, FpPoly& t) {
    FpPoly r0 = a, r1 = b, s0{1}, s1{}, t0{}, t1{1};
    while (!r1.empty()) {
        FpPoly q, r;
        fp_divmod(r0, r1, p, q, r);
        FpPoly s2 = fp_sub(s0, fp_mul(q, s1, p), p);
        FpPoly t2 = fp_sub(t0, fp_mul(q, t1, p), p);
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    std::int64_t li = inv_mod(r0.at(0), p);
    for (auto& c : s0) c = c * li % p;
    for (auto& c : t0) c = c * li % p;
    s = s0;
    t = t0;
}

// Distinct-degree then equal-degree factorization of a monic squarefree
// polynomial over 𝔽_p, p odd.
std::vector<FpPoly> fp_factor_squarefree(const FpPoly& f, std::int64_t p) {
    std::vector<FpPoly> out;
    FpPoly rest = f;
    FpPoly h{0, 1};
    const FpPoly x{0, 1};
    std::vector<std::pair<FpPoly, int>> dd;
    for (int i = 1; 2 * i <= fp_deg(rest); ++i) {
        h = fp_powmod(h, Int(p), rest, p);
        FpPoly g = fp_gcd(rest, fp_sub(h, x, p), p);
        if (fp_deg(g) > 0) {
            dd.push_back({g, i});
            FpPoly q, r;
            fp_divmod(rest, g, p, q, r);
            rest = q;
            h = fp_rem(h, rest, p);
        }
    }
    if (fp_deg(rest) > 0) dd.push_back({rest, fp_deg(rest)});

    std::uint64_t state = 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(p);
    auto next_rand = [&state]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    };
    std::function<void(const FpPoly&, int)> split = [&](const FpPoly& g, int d) {
        if (fp_deg(g) == d) {
            out.push_back(g);
            return;
        }
        Int q = 1;
        for (int k = 0; k < d; ++k) q *= p;
        Int e = (q - 1) / 2;
        while (true) {
            FpPoly a(fp_deg(g));
            for (auto& c : a) c = static_cast<std::int64_t>(next_rand() % static_cast<std::uint64_t>(p));
            fp_trim(a);
            if (fp_deg(a) < 1) continue;
            FpPoly b = fp_sub(fp_powmod(a, e, g, p), FpPoly{1}, p);
            FpPoly c = fp_gcd(g, b, p);
            if (fp_deg(c) > 0 && fp_deg(c) < fp_deg(g)) {
                FpPoly qq, rr;
                fp_divmod(g, c, p, qq, rr);
                split(c, d);
                split(fp_monic(qq, p), d);
                return;
            }
        }
    };
    for (auto& [g, d] : dd) split(g, d);
    return out;
}

// ---- integer polynomial helpers -------------------------------------------

void z_trim(ZPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

ZPoly z_mul(const ZPoly& a, const ZPoly& b) {
    if (a.empty() || b.empty()) return {};
    ZPoly r(a.size() + b.size() - 1, Int(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    z_trim(r);
    return r;
}

ZPoly z_mod(const ZPoly& a, const Int& m) {
    ZPoly r(a);
    for (auto& c : r) {
        c %= m;
        if (c < 0) c += m;
    }
    z_trim(r);
    return r;
}

ZPoly z_symmetric(const ZPoly& a, const Int& m) {
    ZPoly r = z_mod(a, m);
    Int half = m / 2;
    for (auto& c : r)
        if (c > half) c -= m;
    z_trim(r);
    return r;
}

FpPoly to_fp(const ZPoly& a, std::int64_t p) {
    FpPoly r(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        Int c = a[i] % p;
        if (c < 0) c += p;
        r[i] = c.get_si();
    }
    fp_trim(r);
    return r;
}

ZPoly from_fp(const FpPoly& a) {
    ZPoly r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = Int(static_cast<long>(a[i]));
    return r;
}

// Lift g ≡ a*b (mod p), a monic, to modulus p^k.
void hensel_pair(const ZPoly& g, ZPoly& a, ZPoly& b, std::int64_t p, int k) {
    const FpPoly a0 = to_fp(a, p), b0 = to_fp(b, p);
    FpPoly s, t;
    fp_xgcd(a0, b0, p, s, t);
    Int pj = p;
    for (int j = 1; j < k; ++j) {
        ZPoly ab = z_mul(a, b);
        ZPoly diff(std::max(g.size(), ab.size()), Int(0));
        for (size_t i = 0; i < g.size(); ++i) diff[i] += g[i];
        for (size_t i = 0; i < ab.size(); ++i) diff[i] -= ab[i];
        for (auto& c : diff) c /= pj;
        FpPoly e = to_fp(diff, p);
        FpPoly et = fp_mul(e, t, p);
        FpPoly q, r;
        fp_divmod(et, a0, p, q, r);
        FpPoly db = fp_add(fp_mul(e, s, p), fp_mul(q, b0, p), p);
        ZPoly da = from_fp(r), dbz = from_fp(db);
        a.resize(std::max(a.size(), da.size()), Int(0));
        b.resize(std::max(b.size(), dbz.size()), Int(0));
        for (size_t i = 0; i < da.size(); ++i) a[i] += pj * da[i];
        for (size_t i = 0; i < dbz.size(); ++i) b[i] += pj * dbz[i];
        pj *= p;
        a = z_mod(a, pj);
        b = z_mod(b, pj);
    }
}

bool is_small_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Zassenhaus on a primitive squarefree integer polynomial of degree ≥ 2.
std::vector<QPoly> zassenhaus(ZPoly g) {
    const int n = static_cast<int>(g.size()) - 1;
    std::int64_t p = 3;
    for (;; p += 2) {
        if (!is_small_prime(p)) continue;
        if (g.back() % p == 0) continue;
        FpPoly gp = to_fp(g, p);
        if (fp_deg(fp_gcd(gp, fp_derivative(gp, p), p)) == 0) break;
    }
    std::vector<FpPoly> modp = fp_factor_squarefree(fp_monic(to_fp(g, p), p), p);
    if (modp.size() == 1) return {qpoly::monic(qpoly::from_integer(g))};

    // Mignotte-type bound on factor coefficients.
    Int norm2 = 0;
    for (const auto& c : g) norm2 += c * c;
    Int norm = sqrt(norm2) + 1;
    Int bound = 2 * abs(g.back()) * norm;
    for (int i = 0; i < n; ++i) bound *= 2;
    int k = 1;
    Int P = p;
    while (P <= bound) {
        P *= p;
        ++k;
    }

    // Multifactor lift by peeling one factor at a time.
    std::vector<ZPoly> lifted;
    ZPoly rest = g;
    for (size_t i = 0; i + 1 < modp.size(); ++i) {
        ZPoly a = from_fp(modp[i]);
        FpPoly others{static_cast<std::int64_t>(mod_p(Int(g.back() % p).get_si(), p))};
        for (size_t j = i + 1; j < modp.size(); ++j) others = fp_mul(others, modp[j], p);
        ZPoly b = from_fp(others);
        hensel_pair(rest, a, b, p, k);
        lifted.push_back(a);
        rest = b;
    }
    // The last factor is monic times the leading coefficient; normalise it.
    {
        Int lc_inv;
        Int lc = rest.back() % P;
        if (lc < 0) lc += P;
        mpz_invert(lc_inv.get_mpz_t(), lc.get_mpz_t(), P.get_mpz_t());
        for (auto& c : rest) c = c * lc_inv;
        lifted.push_back(z_mod(rest, P));
    }

    std::vector<QPoly> found;
    std::vector<ZPoly> pool = lifted;
    ZPoly current = g;
    for (size_t size = 1; 2 * size <= pool.size(); ++size) {
        bool restart = true;
        while (restart) {
            restart = false;
            std::vector<size_t> idx(size);
            std::iota(idx.begin(), idx.end(), 0);
            while (true) {
                ZPoly cand{current.back()};
                for (size_t i : idx) cand = z_mod(z_mul(cand, pool[i]), P);
                cand = z_symmetric(cand, P);
                QPoly cq = qpoly::from_integer(cand);
                QPoly q, r;
                qpoly::divmod(qpoly::from_integer(current), cq, q, r);
                if (r.empty() && qpoly::degree(cq) > 0) {
                    found.push_back(qpoly::monic(cq));
                    current = qpoly::primitive_integer(q);
                    std::vector<ZPoly> next;
                    for (size_t i = 0; i < pool.size(); ++i)
                        if (std::find(idx.begin(), idx.end(), i) == idx.end()) next.push_back(pool[i]);
                    pool = std::move(next);
                    restart = 2 * size <= pool.size();
                    break;
                }
                // next combination
                int pos = static_cast<int>(size) - 1;
                while (pos >= 0 && idx[pos] == pool.size() - size + pos) --pos;
                if (pos < 0) break;
                ++idx[pos];
                for (size_t j = pos + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
    }
    if (current.size() > 1) found.push_back(qpoly::monic(qpoly::from_integer(current)));
    return found;
}

bool qpoly_less(const QPoly& a, const QPoly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = a.size(); i-- > 0;)
        if (a[i] != b[i]) return a[i] < b[i];
    return false;
}

}  // namespace

std::vector<QPoly> factor_rational(const QPoly& f) {
    QPoly t = f;
    qpoly::trim(t);
    if (qpoly::degree(t) < 1) return {};
    std::vector<QPoly> out;
    // Square-free parts: peel gcd(f, f') repeatedly.
    std::vector<QPoly> parts;
    QPoly cur = qpoly::monic(t);
    while (qpoly::degree(cur) > 0) {
        QPoly g = qpoly::gcd(cur, qpoly::derivative(cur));
        parts.push_back(qpoly::quo(cur, g));
        cur = g;
    }
    for (const auto& part : parts) {
        if (qpoly::degree(part) < 1) continue;
        std::vector<QPoly> facs;
        if (qpoly::degree(part) == 1) facs = {qpoly::monic(part)};
        else {
            // Strip rational roots at zero first to keep the prime search simple.
            QPoly work = part;
            if (work[0] == 0) {
                facs.push_back(QPoly{Rat(0), Rat(1)});
                work.erase(work.begin());
            }
            if (qpoly::degree(work) == 1) facs.push_back(qpoly::monic(work));
            else if (qpoly::degree(work) > 1) {
                auto z = zassenhaus(qpoly::primitive_integer(work));
                facs.insert(facs.end(), z.begin(), z.end());
            }
        }
        for (auto& fac : facs) {
            bool seen = false;
            for (const auto& o : out)
                if (o == fac) seen = true;
            if (!seen) out.push_back(fac);
        }
    }
    std::sort(out.begin(), out.end(), qpoly_less);
    return out;
}

bool is_irreducible_rational(const QPoly& f) {
    if (qpoly::degree(f) < 1) return false;
    if (!qpoly::is_squarefree(f)) return false;
    auto facs = factor_rational(f);
    return facs.size() == 1 && qpoly::degree(facs[0]) == qpoly::degree(f);
}

}  // namespace nov
