#include "nov/coeff.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>

#include "nov/errors.hpp"

namespace nov {

namespace {

std::mutex registry_mutex;
std::map<std::string, Field>& registry() {
    static std::map<std::string, Field> r;
    return r;
}

std::string qkey(const QPoly& m) {
    std::string k = "Q:";
    for (const auto& c : m) k += to_string(c) + ",";
    return k;
}

std::int64_t modp(std::int64_t a, std::int64_t p) {
    a %= p;
    return a < 0 ? a + p : a;
}

std::int64_t inv_modp(std::int64_t a, std::int64_t p) {
    std::int64_t t = 0, nt = 1, r = p, nr = modp(a, p);
    while (nr != 0) {
        std::int64_t q = r / nr;
        std::int64_t tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) fail(ErrorCode::NotInvertible, "residue not invertible");
    return modp(t, p);
}

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Residue of a rational modulo p.
std::int64_t rat_mod_p(const Rat& r, std::int64_t p) {
    Int den = r.get_den();
    if (den % p == 0) fail(ErrorCode::DenominatorDivisibleByP, "p = " + std::to_string(p) + " divides denominator of " + to_string(r));
    Int n = r.get_num() % p;
    Int d = den % p;
    std::int64_t nn = modp(n.get_si(), p), dd = modp(d.get_si(), p);
    return nn * inv_modp(dd, p) % p;
}

// Extended Euclid over ℚ: s with s*a ≡ 1 (mod m).
QPoly q_inverse_mod(const QPoly& a, const QPoly& m) {
    QPoly r0 = m, r1 = a, t0{}, t1{Rat(1)};
    qpoly::trim(r1);
    while (qpoly::degree(r1) > 0) {
        QPoly q, r;
        qpoly::divmod(r0, r1, q, r);
        QPoly t2 = qpoly::sub(t0, qpoly::mul(q, t1));
        r0 = std::move(r1);
        r1 = std::move(r);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (qpoly::degree(r1) < 0) fail(ErrorCode::NotInvertible, "element not invertible in number field");
    return qpoly::scale(t1, 1 / r1[0]);
}

using IPoly = std::vector<std::int64_t>;

void i_trim(IPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

IPoly i_rem(IPoly a, const IPoly& b, std::int64_t p) {
    i_trim(a);
    const int db = static_cast<int>(b.size()) - 1;
    std::int64_t li = inv_modp(b[db], p);
    while (static_cast<int>(a.size()) - 1 >= db) {
        int d = static_cast<int>(a.size()) - 1;
        std::int64_t c = a[d] * li % p;
        for (int i = 0; i <= db; ++i) a[d - db + i] = modp(a[d - db + i] - c * b[i], p);
        i_trim(a);
    }
    return a;
}

IPoly i_inverse_mod(const IPoly& a, const IPoly& m, std::int64_t p) {
    IPoly r0 = m, r1 = a, t0{}, t1{1};
    i_trim(r1);
    auto mul = [p](const IPoly& x, const IPoly& y) {
        if (x.empty() || y.empty()) return IPoly{};
        IPoly r(x.size() + y.size() - 1, 0);
        for (size_t i = 0; i < x.size(); ++i)
            for (size_t j = 0; j < y.size(); ++j) r[i + j] = (r[i + j] + x[i] * y[j]) % p;
        i_trim(r);
        return r;
    };
    while (r1.size() > 1) {
        // q, r = divmod(r0, r1)
        IPoly r = r0;
        i_trim(r);
        const int db = static_cast<int>(r1.size()) - 1;
        IPoly q(std::max<int>(0, static_cast<int>(r.size()) - db), 0);
        std::int64_t li = inv_modp(r1.back(), p);
        while (static_cast<int>(r.size()) - 1 >= db) {
            int d = static_cast<int>(r.size()) - 1;
            std::int64_t c = r[d] * li % p;
            q[d - db] = c;
            for (int i = 0; i <= db; ++i) r[d - db + i] = modp(r[d - db + i] - c * r1[i], p);
            i_trim(r);
        }
        IPoly qt = mul(q, t1);
        IPoly t2(std::max(t0.size(), qt.size()), 0);
        for (size_t i = 0; i < t0.size(); ++i) t2[i] = t0[i];
        for (size_t i = 0; i < qt.size(); ++i) t2[i] = modp(t2[i] - qt[i], p);
        i_trim(t2);
        r0 = std::move(r1);
        r1 = std::move(r);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r1.empty()) fail(ErrorCode::NotInvertible, "element not invertible in finite field");
    std::int64_t li = inv_modp(r1[0], p);
    for (auto& c : t1) c = c * li % p;
    return t1;
}

}  // namespace

// ---- fields -------------------------------------------------------------------

Field rationals() {
    static Field f = [] {
        auto d = std::make_shared<FieldData>();
        d->kind = FieldKind::Rational;
        d->degree = 1;
        d->minpoly = {Rat(0), Rat(1)};
        d->gen = "1";
        return Field(d);
    }();
    return f;
}

Field gaussian_rationals() {
    static Field f = [] {
        auto d = std::make_shared<FieldData>();
        d->kind = FieldKind::NumberField;
        d->degree = 2;
        d->minpoly = {Rat(1), Rat(0), Rat(1)};
        d->gen = "i";
        Field fld(d);
        std::lock_guard<std::mutex> lock(registry_mutex);
        registry()[qkey(d->minpoly)] = fld;
        return fld;
    }();
    return f;
}

Field number_field(const QPoly& minpoly, const std::string& gen) {
    QPoly m = minpoly;
    qpoly::trim(m);
    if (qpoly::degree(m) < 1) fail(ErrorCode::InvalidArgument, "minimal polynomial must have positive degree");
    m = qpoly::monic(m);
    if (qpoly::degree(m) == 1) return rationals();
    if (m == QPoly{Rat(1), Rat(0), Rat(1)}) return gaussian_rationals();
    const std::string key = qkey(m);
    {
        std::lock_guard<std::mutex> lock(registry_mutex);
        auto it = registry().find(key);
        if (it != registry().end()) return it->second;
    }
    if (!is_irreducible_rational(m)) fail(ErrorCode::ReduciblePolynomial, qpoly::to_string(m) + " is reducible over Q");
    auto d = std::make_shared<FieldData>();
    d->kind = FieldKind::NumberField;
    d->degree = qpoly::degree(m);
    d->minpoly = m;
    d->gen = gen;
    Field fld(d);
    std::lock_guard<std::mutex> lock(registry_mutex);
    auto [it, inserted] = registry().emplace(key, fld);
    return it->second;
}

Field prime_field(std::int64_t p) { return extend_field(p, {0, 1}); }

Field extend_field(std::int64_t p, const std::vector<std::int64_t>& f_in) {
    if (!is_prime(p)) fail(ErrorCode::InvalidArgument, std::to_string(p) + " is not prime");
    IPoly f(f_in.size());
    for (size_t i = 0; i < f.size(); ++i) f[i] = modp(f_in[i], p);
    i_trim(f);
    if (f.size() < 2 || f.back() != 1) fail(ErrorCode::InvalidArgument, "modulus must be monic of positive degree");
    const int deg = static_cast<int>(f.size()) - 1;
    if (deg == 1) f = {0, 1};  // every linear modulus yields the prime field
    std::string key = "F" + std::to_string(p) + ":";
    for (auto c : f) key += std::to_string(c) + ",";
    {
        std::lock_guard<std::mutex> lock(registry_mutex);
        auto it = registry().find(key);
        if (it != registry().end()) return it->second;
    }
    auto d = std::make_shared<FieldData>();
    d->kind = FieldKind::FiniteField;
    d->degree = deg;
    d->p = p;
    d->modulus = f;
    d->gen = deg == 1 ? "1" : "x";
    Field fld(d);
    if (deg > 1) {
        // Irreducible iff gcd(f, x^{p^i} - x) = 1 for all i ≤ deg/2.
        Field base = prime_field(p);
        SPoly fs;
        for (auto c : f) fs.push_back(Scalar::from_int(base, static_cast<long>(c)));
        SPoly h{Scalar::zero(base), Scalar::one(base)};
        const SPoly x = h;
        for (int i = 1; 2 * i <= deg; ++i) {
            h = spoly::powmod(h, Int(static_cast<long>(p)), fs);
            SPoly g = spoly::gcd(fs, spoly::sub(h, x));
            if (spoly::degree(g) > 0) {
                std::ostringstream os;
                os << spoly::to_string(fs, "x") << " is reducible over F_" << p;
                fail(ErrorCode::ReduciblePolynomial, os.str());
            }
        }
    }
    std::lock_guard<std::mutex> lock(registry_mutex);
    auto [it, inserted] = registry().emplace(key, fld);
    return it->second;
}

std::string describe(const Field& f) {
    switch (f->kind) {
        case FieldKind::Rational: return "Q";
        case FieldKind::NumberField: return "Q[" + f->gen + "]/(" + qpoly::to_string(f->minpoly, f->gen) + ")";
        case FieldKind::FiniteField: {
            if (f->degree == 1) return "F_" + std::to_string(f->p);
            SPoly m;
            Field base = prime_field(f->p);
            for (auto c : f->modulus) m.push_back(Scalar::from_int(base, static_cast<long>(c)));
            return "F_" + std::to_string(f->p) + "[x]/(" + spoly::to_string(m, "x") + ")";
        }
    }
    return "?";
}

std::int64_t characteristic(const Field& f) { return f->kind == FieldKind::FiniteField ? f->p : 0; }

Int field_order(const Field& f) {
    if (f->kind != FieldKind::FiniteField) return 0;
    Int q = 1;
    for (int i = 0; i < f->degree; ++i) q *= static_cast<long>(f->p);
    return q;
}

// ---- scalars ------------------------------------------------------------------

Scalar Scalar::zero(const Field& f) {
    Scalar s;
    s.field_ = f;
    if (f->kind == FieldKind::FiniteField) s.m_.assign(f->degree, 0);
    else s.q_.assign(f->degree, Rat(0));
    return s;
}

Scalar Scalar::one(const Field& f) { return from_rat(f, Rat(1)); }

Scalar Scalar::from_rat(const Field& f, const Rat& r) {
    Scalar s = zero(f);
    if (f->kind == FieldKind::FiniteField) s.m_[0] = rat_mod_p(r, f->p);
    else s.q_[0] = r;
    return s;
}

Scalar Scalar::generator(const Field& f) {
    if (f->degree == 1) return one(f);
    Scalar s = zero(f);
    if (f->kind == FieldKind::FiniteField) s.m_[1] = 1;
    else s.q_[1] = 1;
    return s;
}

Scalar Scalar::from_coords(const Field& f, const std::vector<Rat>& coords) {
    if (f->kind == FieldKind::FiniteField) {
        std::vector<std::int64_t> m;
        for (const auto& c : coords) m.push_back(rat_mod_p(c, f->p));
        return from_residues(f, m);
    }
    // Reduce an arbitrary-length coordinate vector modulo the minimal polynomial.
    QPoly poly(coords);
    qpoly::trim(poly);
    if (qpoly::degree(poly) >= f->degree) poly = qpoly::rem(poly, f->minpoly);
    Scalar s = zero(f);
    for (size_t i = 0; i < poly.size(); ++i) s.q_[i] = poly[i];
    return s;
}

Scalar Scalar::from_residues(const Field& f, const std::vector<std::int64_t>& coords) {
    if (f->kind != FieldKind::FiniteField) fail(ErrorCode::FieldMismatch, "residues given for a characteristic-zero field");
    IPoly poly;
    for (auto c : coords) poly.push_back(modp(c, f->p));
    i_trim(poly);
    if (static_cast<int>(poly.size()) > f->degree) poly = i_rem(poly, f->modulus, f->p);
    Scalar s = zero(f);
    for (size_t i = 0; i < poly.size(); ++i) s.m_[i] = poly[i];
    return s;
}

bool Scalar::is_zero() const {
    if (field_->kind == FieldKind::FiniteField) {
        for (auto c : m_)
            if (c) return false;
        return true;
    }
    for (const auto& c : q_)
        if (c != 0) return false;
    return true;
}

bool Scalar::is_one() const { return *this == one(field_); }

bool Scalar::is_prime_field_element() const {
    if (field_->kind == FieldKind::FiniteField) {
        for (size_t i = 1; i < m_.size(); ++i)
            if (m_[i]) return false;
        return true;
    }
    for (size_t i = 1; i < q_.size(); ++i)
        if (q_[i] != 0) return false;
    return true;
}

Rat Scalar::as_rat() const {
    if (!is_prime_field_element()) fail(ErrorCode::InvalidArgument, "element is not in the prime field");
    if (field_->kind == FieldKind::FiniteField) return Rat(static_cast<long>(m_[0]));
    return q_[0];
}

void require_same_field(const Scalar& a, const Scalar& b) {
    if (a.field() != b.field())
        fail(ErrorCode::FieldMismatch, "operands live in " + describe(a.field()) + " and " + describe(b.field()));
}

Scalar Scalar::operator+(const Scalar& o) const {
    require_same_field(*this, o);
    Scalar r = *this;
    if (field_->kind == FieldKind::FiniteField) {
        for (size_t i = 0; i < m_.size(); ++i) r.m_[i] = (m_[i] + o.m_[i]) % field_->p;
    } else {
        for (size_t i = 0; i < q_.size(); ++i) r.q_[i] += o.q_[i];
    }
    return r;
}

Scalar Scalar::operator-(const Scalar& o) const {
    require_same_field(*this, o);
    Scalar r = *this;
    if (field_->kind == FieldKind::FiniteField) {
        for (size_t i = 0; i < m_.size(); ++i) r.m_[i] = modp(m_[i] - o.m_[i], field_->p);
    } else {
        for (size_t i = 0; i < q_.size(); ++i) r.q_[i] -= o.q_[i];
    }
    return r;
}

Scalar Scalar::operator-() const {
    Scalar r = *this;
    if (field_->kind == FieldKind::FiniteField) {
        for (auto& c : r.m_) c = modp(-c, field_->p);
    } else {
        for (auto& c : r.q_) c = -c;
    }
    return r;
}

Scalar Scalar::operator*(const Scalar& o) const {
    require_same_field(*this, o);
    const int d = field_->degree;
    Scalar r = zero(field_);
    if (field_->kind == FieldKind::FiniteField) {
        const std::int64_t p = field_->p;
        if (d == 1) {
            r.m_[0] = m_[0] * o.m_[0] % p;
            return r;
        }
        IPoly prod(2 * d - 1, 0);
        for (int i = 0; i < d; ++i) {
            if (!m_[i]) continue;
            for (int j = 0; j < d; ++j) prod[i + j] = (prod[i + j] + m_[i] * o.m_[j]) % p;
        }
        const auto& f = field_->modulus;
        for (int k = 2 * d - 2; k >= d; --k) {
            std::int64_t c = prod[k];
            if (!c) continue;
            for (int j = 0; j <= d; ++j) prod[k - d + j] = modp(prod[k - d + j] - c * f[j], p);
        }
        for (int i = 0; i < d; ++i) r.m_[i] = prod[i];
        return r;
    }
    if (d == 1) {
        r.q_[0] = q_[0] * o.q_[0];
        return r;
    }
    std::vector<Rat> prod(2 * d - 1, Rat(0));
    for (int i = 0; i < d; ++i) {
        if (q_[i] == 0) continue;
        for (int j = 0; j < d; ++j)
            if (o.q_[j] != 0) prod[i + j] += q_[i] * o.q_[j];
    }
    const auto& m = field_->minpoly;
    for (int k = 2 * d - 2; k >= d; --k) {
        if (prod[k] == 0) continue;
        Rat c = prod[k];
        for (int j = 0; j <= d; ++j) prod[k - d + j] -= c * m[j];
    }
    for (int i = 0; i < d; ++i) r.q_[i] = prod[i];
    return r;
}

Scalar Scalar::inverse() const {
    if (is_zero()) fail(ErrorCode::NotInvertible, "inverse of zero");
    Scalar r = zero(field_);
    if (field_->kind == FieldKind::FiniteField) {
        if (field_->degree == 1) {
            r.m_[0] = inv_modp(m_[0], field_->p);
            return r;
        }
        IPoly inv = i_inverse_mod(m_, field_->modulus, field_->p);
        for (size_t i = 0; i < inv.size(); ++i) r.m_[i] = inv[i];
        return r;
    }
    if (field_->degree == 1) {
        r.q_[0] = 1 / q_[0];
        return r;
    }
    QPoly inv = q_inverse_mod(QPoly(q_.begin(), q_.end()), field_->minpoly);
    for (size_t i = 0; i < inv.size(); ++i) r.q_[i] = inv[i];
    return r;
}

Scalar Scalar::operator/(const Scalar& o) const { return *this * o.inverse(); }

Scalar Scalar::pow(long e) const { return pow(Int(e)); }

Scalar Scalar::pow(const Int& e_in) const {
    Scalar base = e_in < 0 ? inverse() : *this;
    Int e = abs(e_in);
    Scalar result = one(field_);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) result = result * base;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return result;
}

bool Scalar::operator==(const Scalar& o) const {
    if (field_ != o.field_) return false;
    return q_ == o.q_ && m_ == o.m_;
}

int Scalar::compare(const Scalar& o) const {
    require_same_field(*this, o);
    if (field_->kind == FieldKind::FiniteField) {
        for (size_t i = m_.size(); i-- > 0;)
            if (m_[i] != o.m_[i]) return m_[i] < o.m_[i] ? -1 : 1;
        return 0;
    }
    for (size_t i = q_.size(); i-- > 0;)
        if (q_[i] != o.q_[i]) return q_[i] < o.q_[i] ? -1 : 1;
    return 0;
}

std::string Scalar::to_string() const {
    if (field_->kind == FieldKind::FiniteField) {
        if (field_->degree == 1) return std::to_string(m_[0]);
        std::ostringstream os;
        bool first = true;
        for (int i = field_->degree - 1; i >= 0; --i) {
            if (!m_[i]) continue;
            if (!first) os << " + ";
            if (i == 0 || m_[i] != 1) os << m_[i];
            if (i > 0) {
                if (m_[i] != 1) os << "*";
                os << field_->gen;
                if (i > 1) os << "^" << i;
            }
            first = false;
        }
        return first ? "0" : os.str();
    }
    if (field_->degree == 1) return nov::to_string(q_[0]);
    return qpoly::to_string(QPoly(q_.begin(), q_.end()), field_->gen);
}

Int Scalar::denominator() const {
    Int d = 1;
    for (const auto& c : q_) d = lcm(d, Int(c.get_den()));
    return d;
}

GaussianRat GaussianRat::operator/(const GaussianRat& o) const {
    Rat n = o.norm();
    if (n == 0) fail(ErrorCode::NotInvertible, "division by zero Gaussian rational");
    GaussianRat conj{o.re, -o.im};
    GaussianRat t = *this * conj;
    return {t.re / n, t.im / n};
}

Scalar GaussianRat::to_scalar() const { return Scalar::from_coords(gaussian_rationals(), {re, im}); }

std::string GaussianRat::to_string() const { return to_scalar().to_string(); }

GaussianRat parse_gaussian(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) fail(ErrorCode::ParseError, "empty Gaussian rational");
    // Split into signed terms; each term is a rational optionally followed by *i or i.
    GaussianRat acc;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t next = pos + 1;
        while (next < s.size() && s[next] != '+' && s[next] != '-') ++next;
        std::string term = s.substr(pos, next - pos);
        bool imag = !term.empty() && term.back() == 'i';
        if (imag) {
            term.pop_back();
            if (!term.empty() && term.back() == '*') term.pop_back();
            if (term.empty() || term == "+") term += "1";
            else if (term == "-") term = "-1";
        }
        Rat v = parse_rat(term);
        if (imag) acc.im += v;
        else acc.re += v;
        pos = next;
    }
    return acc;
}

// ---- polynomials over a field ---------------------------------------------------

namespace spoly {

void trim(SPoly& f) {
    while (!f.empty() && f.back().is_zero()) f.pop_back();
}

int degree(const SPoly& f) {
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i)
        if (!f[i].is_zero()) return i;
    return -1;
}

SPoly from_q(const Field& f, const QPoly& q) {
    SPoly r;
    for (const auto& c : q) r.push_back(Scalar::from_rat(f, c));
    trim(r);
    return r;
}

SPoly add(const SPoly& a, const SPoly& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    const Field& f = a[0].field();
    SPoly r(std::max(a.size(), b.size()), Scalar::zero(f));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    trim(r);
    return r;
}

SPoly sub(const SPoly& a, const SPoly& b) {
    SPoly nb;
    for (const auto& c : b) nb.push_back(-c);
    return add(a, nb);
}

SPoly mul(const SPoly& a, const SPoly& b) {
    if (a.empty() || b.empty()) return {};
    const Field& f = a[0].field();
    SPoly r(a.size() + b.size() - 1, Scalar::zero(f));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j)
            if (!b[j].is_zero()) r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

SPoly scale(const SPoly& a, const Scalar& c) {
    SPoly r;
    for (const auto& x : a) r.push_back(x * c);
    trim(r);
    return r;
}

void divmod(const SPoly& a, const SPoly& b, SPoly& q, SPoly& r) {
    const int db = degree(b);
    if (db < 0) fail(ErrorCode::NotInvertible, "polynomial division by zero");
    r = a;
    trim(r);
    const Field& f = b[db].field();
    q.assign(std::max(0, degree(r) - db + 1), Scalar::zero(f));
    const Scalar li = b[db].inverse();
    for (int d = degree(r); d >= db; d = degree(r)) {
        Scalar c = r[d] * li;
        q[d - db] = c;
        for (int i = 0; i <= db; ++i) r[d - db + i] -= c * b[i];
        trim(r);
    }
    trim(q);
}

SPoly rem(const SPoly& a, const SPoly& b) {
    SPoly q, r;
    divmod(a, b, q, r);
    return r;
}

SPoly quo(const SPoly& a, const SPoly& b) {
    SPoly q, r;
    divmod(a, b, q, r);
    return q;
}

SPoly monic(const SPoly& a) {
    int d = degree(a);
    if (d < 0) return {};
    return scale(a, a[d].inverse());
}

SPoly gcd(const SPoly& a, const SPoly& b) {
    SPoly x = a, y = b;
    trim(x);
    trim(y);
    while (!y.empty()) {
        SPoly r = rem(x, y);
        x = std::move(y);
        y = std::move(r);
    }
    return monic(x);
}

SPoly derivative(const SPoly& a) {
    if (a.size() <= 1) return {};
    SPoly r;
    for (size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * Scalar::from_int(a[i].field(), static_cast<long>(i)));
    trim(r);
    return r;
}

SPoly powmod(const SPoly& base_in, const Int& e_in, const SPoly& m) {
    const Field& f = m.back().field();
    SPoly result{Scalar::one(f)};
    SPoly base = rem(base_in, m);
    Int e = e_in;
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) result = rem(mul(result, base), m);
        e >>= 1;
        if (e > 0) base = rem(mul(base, base), m);
    }
    return result;
}

Scalar eval(const SPoly& a, const Scalar& x) {
    Scalar acc = Scalar::zero(x.field());
    for (size_t i = a.size(); i-- > 0;) acc = acc * x + a[i];
    return acc;
}

SPoly shift(const SPoly& a, const Scalar& c) {
    // Horner in the polynomial ring: result = (((a_n)(y+c) + a_{n-1})(y+c) + ...)
    if (a.empty()) return {};
    SPoly lin{c, Scalar::one(c.field())};
    SPoly result{a.back()};
    for (size_t i = a.size() - 1; i-- > 0;) result = add(mul(result, lin), SPoly{a[i]});
    trim(result);
    return result;
}

std::string to_string(const SPoly& a, const std::string& var) {
    if (degree(a) < 0) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(a); i >= 0; --i) {
        if (a[i].is_zero()) continue;
        if (!first) os << " + ";
        std::string c = a[i].to_string();
        bool simple = c.find_first_of(" +") == std::string::npos;
        if (i == 0) os << c;
        else {
            if (c != "1") os << (simple ? c : "(" + c + ")") << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    return os.str();
}

}  // namespace spoly

// ---- factorization -----------------------------------------------------------------

namespace {

bool spoly_less(const SPoly& a, const SPoly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = a.size(); i-- > 0;) {
        int c = a[i].compare(b[i]);
        if (c != 0) return c < 0;
    }
    return false;
}

void add_unique(std::vector<SPoly>& out, const SPoly& f) {
    for (const auto& o : out)
        if (o.size() == f.size() && std::equal(o.begin(), o.end(), f.begin())) return;
    out.push_back(f);
}

// Determinant over ℚ by fraction Gaussian elimination.
Rat det_rational(std::vector<std::vector<Rat>> a) {
    const size_t n = a.size();
    Rat det = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (size_t r = c + 1; r < n; ++r) {
            if (a[r][c] == 0) continue;
            Rat f = a[r][c] / a[c][c];
            for (size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

// Norm from a number field to ℚ.
Rat field_norm(const Scalar& x) {
    const Field& K = x.field();
    const int d = K->degree;
    if (d == 1) return x.as_rat();
    std::vector<std::vector<Rat>> m(d, std::vector<Rat>(d));
    Scalar basis = Scalar::one(K);
    const Scalar g = Scalar::generator(K);
    for (int j = 0; j < d; ++j) {
        Scalar col = x * basis;
        for (int i = 0; i < d; ++i) m[i][j] = col.q_coords()[i];
        basis = basis * g;
    }
    return det_rational(m);
}

// Norm of a polynomial over a number field, by evaluation and interpolation.
QPoly poly_norm(const SPoly& F) {
    const Field& K = F.back().field();
    const int D = K->degree * spoly::degree(F);
    std::vector<Rat> xs, ys;
    for (int k = 0; k <= D; ++k) {
        Rat y0(k);
        xs.push_back(y0);
        ys.push_back(field_norm(spoly::eval(F, Scalar::from_rat(K, y0))));
    }
    return qpoly::interpolate(xs, ys);
}

// Irreducible factors of a monic squarefree polynomial over a finite field of odd order.
std::vector<SPoly> finite_factor_squarefree(const Field& F, const SPoly& f) {
    const Int q = field_order(F);
    std::vector<std::pair<SPoly, int>> dd;
    SPoly rest = f;
    SPoly h{Scalar::zero(F), Scalar::one(F)};
    const SPoly x = h;
    for (int i = 1; 2 * i <= spoly::degree(rest); ++i) {
        h = spoly::powmod(h, q, rest);
        SPoly g = spoly::gcd(rest, spoly::sub(h, x));
        if (spoly::degree(g) > 0) {
            dd.push_back({g, i});
            rest = spoly::quo(rest, g);
            h = spoly::rem(h, rest);
        }
    }
    if (spoly::degree(rest) > 0) dd.push_back({rest, spoly::degree(rest)});
    if (F->p == 2) {
        for (auto& [g, d] : dd)
            if (spoly::degree(g) != d) fail(ErrorCode::InvalidArgument, "equal-degree splitting in characteristic 2 is not supported");
    }
    std::uint64_t state = 0x2545F4914F6CDD1DULL;
    auto next_rand = [&state]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    };
    std::vector<SPoly> out;
    std::function<void(const SPoly&, int)> split = [&](const SPoly& g, int d) {
        if (spoly::degree(g) == d) {
            out.push_back(spoly::monic(g));
            return;
        }
        Int qd = 1;
        for (int k = 0; k < d; ++k) qd *= q;
        const Int e = (qd - 1) / 2;
        while (true) {
            SPoly a;
            for (int k = 0; k < spoly::degree(g); ++k) {
                std::vector<std::int64_t> res(F->degree);
                for (auto& c : res) c = static_cast<std::int64_t>(next_rand() % static_cast<std::uint64_t>(F->p));
                a.push_back(Scalar::from_residues(F, res));
            }
            spoly::trim(a);
            if (spoly::degree(a) < 1) continue;
            SPoly b = spoly::sub(spoly::powmod(a, e, g), SPoly{Scalar::one(F)});
            SPoly c = spoly::gcd(g, b);
            if (spoly::degree(c) > 0 && spoly::degree(c) < spoly::degree(g)) {
                split(c, d);
                split(spoly::monic(spoly::quo(g, c)), d);
                return;
            }
        }
    };
    for (auto& [g, d] : dd) split(g, d);
    return out;
}

void finite_factor_all(const Field& F, const SPoly& f, std::vector<SPoly>& out) {
    if (spoly::degree(f) < 1) return;
    SPoly fm = spoly::monic(f);
    SPoly df = spoly::derivative(fm);
    if (df.empty()) {
        // f = g(x)^p: take p-th roots of coefficients via the inverse Frobenius.
        const std::int64_t p = F->p;
        Int qp = field_order(F) / p;
        SPoly g;
        for (size_t i = 0; i < fm.size(); i += static_cast<size_t>(p)) g.push_back(fm[i].pow(qp));
        finite_factor_all(F, g, out);
        return;
    }
    SPoly g = spoly::gcd(fm, df);
    SPoly sqf = spoly::quo(fm, g);
    if (spoly::degree(sqf) > 0)
        for (auto& fac : finite_factor_squarefree(F, spoly::monic(sqf))) add_unique(out, fac);
    finite_factor_all(F, g, out);
}

std::vector<SPoly> number_field_factor(const Field& K, const SPoly& f_in) {
    SPoly f = spoly::monic(f_in);
    SPoly g = spoly::gcd(f, spoly::derivative(f));
    if (spoly::degree(g) > 0) f = spoly::monic(spoly::quo(f, g));
    if (spoly::degree(f) == 1) return {f};
    const Scalar alpha = Scalar::generator(K);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const long s = (attempt % 2 == 0) ? attempt / 2 : -(attempt + 1) / 2;
        Scalar shift_by = alpha * Scalar::from_int(K, -s);
        SPoly F = spoly::shift(f, shift_by);  // f(y - s·α)
        QPoly N = poly_norm(F);
        if (!qpoly::is_squarefree(N)) continue;
        std::vector<SPoly> out;
        for (const auto& h : factor_rational(N)) {
            SPoly gk = spoly::gcd(F, spoly::from_q(K, h));
            if (spoly::degree(gk) < 1) continue;
            add_unique(out, spoly::monic(spoly::shift(gk, -shift_by)));
        }
        return out;
    }
    fail(ErrorCode::InvalidArgument, "no squarefree norm found while factoring over " + describe(K));
}

}  // namespace

std::vector<SPoly> factor_over(const Field& field, const SPoly& f_in) {
    SPoly f = f_in;
    spoly::trim(f);
    std::vector<SPoly> out;
    if (spoly::degree(f) < 1) return out;
    for (const auto& c : f)
        if (c.field() != field) fail(ErrorCode::FieldMismatch, "polynomial coefficients not in " + describe(field));
    switch (field->kind) {
        case FieldKind::Rational: {
            QPoly q;
            for (const auto& c : f) q.push_back(c.as_rat());
            for (const auto& h : factor_rational(q)) out.push_back(spoly::from_q(field, h));
            break;
        }
        case FieldKind::NumberField: out = number_field_factor(field, f); break;
        case FieldKind::FiniteField: finite_factor_all(field, f, out); break;
    }
    std::sort(out.begin(), out.end(), spoly_less);
    return out;
}

std::vector<Scalar> roots_in_field(const Field& K, const SPoly& f) {
    std::vector<Scalar> roots;
    for (const auto& fac : factor_over(K, f))
        if (spoly::degree(fac) == 1) roots.push_back(-fac[0]);
    std::sort(roots.begin(), roots.end(), [](const Scalar& a, const Scalar& b) { return a.compare(b) < 0; });
    return roots;
}

// ---- embeddings and extensions ---------------------------------------------------------

Embedding Embedding::identity(const Field& f) { return Embedding{f, f, Scalar::generator(f)}; }

Scalar Embedding::apply(const Scalar& x) const {
    if (x.field() != from) fail(ErrorCode::FieldMismatch, "embedding applied to element of " + describe(x.field()));
    if (from == to) return x;
    if (from->kind == FieldKind::FiniteField) fail(ErrorCode::InvalidArgument, "finite-field embeddings are not supported");
    if (from->degree == 1) return Scalar::from_rat(to, x.as_rat());
    Scalar acc = Scalar::zero(to);
    const auto& c = x.q_coords();
    for (size_t i = c.size(); i-- > 0;) acc = acc * image_of_gen + Scalar::from_rat(to, c[i]);
    return acc;
}

Embedding Embedding::then(const Embedding& next) const {
    if (next.from != to) fail(ErrorCode::FieldMismatch, "embedding composition mismatch");
    return Embedding{from, next.to, next.apply(image_of_gen)};
}

Extension adjoin_root(const Field& K, const SPoly& g_in, int budget) {
    SPoly g = spoly::monic(g_in);
    const int dg = spoly::degree(g);
    if (dg < 1) fail(ErrorCode::InvalidArgument, "cannot adjoin a root of a constant");
    if (K->kind == FieldKind::FiniteField) fail(ErrorCode::InvalidArgument, "adjoin_root expects a characteristic-zero field");
    if (dg == 1) return Extension{K, Embedding::identity(K), -g[0]};
    if (K->degree * dg > budget)
        fail(ErrorCode::FieldBudgetExceeded, "extension degree " + std::to_string(K->degree * dg) + " exceeds budget " + std::to_string(budget));
    if (K->kind == FieldKind::Rational) {
        QPoly q;
        for (const auto& c : g) q.push_back(c.as_rat());
        Field L = number_field(q, "a");
        return Extension{L, Embedding{K, L, Scalar::one(L)}, Scalar::generator(L)};
    }
    const Scalar alpha = Scalar::generator(K);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const long s = (attempt % 2 == 0) ? attempt / 2 : -(attempt + 1) / 2;
        SPoly F = spoly::shift(g, alpha * Scalar::from_int(K, -s));
        QPoly N = poly_norm(F);
        if (!qpoly::is_squarefree(N)) continue;
        Field L = number_field(N, "a");
        const Scalar z = Scalar::generator(L);
        // h(x) = Σ_k g_k(x) (z - s x)^k over L, with g_k the coordinate polynomials.
        SPoly lin{z, Scalar::from_int(L, -s)};
        SPoly h, power{Scalar::one(L)};
        for (int k = 0; k <= dg; ++k) {
            SPoly gk = spoly::from_q(L, QPoly(g[k].q_coords().begin(), g[k].q_coords().end()));
            h = spoly::add(h, spoly::mul(gk, power));
            power = spoly::mul(power, lin);
        }
        SPoly m = spoly::from_q(L, K->minpoly);
        SPoly common = spoly::gcd(m, h);
        if (spoly::degree(common) != 1) continue;
        Scalar alpha_L = -common[0];
        Scalar beta = z - Scalar::from_int(L, s) * alpha_L;
        return Extension{L, Embedding{K, L, alpha_L}, beta};
    }
    fail(ErrorCode::InvalidArgument, "primitive element search failed over " + describe(K));
}

Splitting split_polynomial(const Field& K, const SPoly& f, int budget) {
    Embedding total = Embedding::identity(K);
    while (true) {
        const Field& L = total.to;
        SPoly fl;
        for (const auto& c : f) fl.push_back(total.apply(c));
        auto facs = factor_over(L, fl);
        const SPoly* pending = nullptr;
        for (const auto& fac : facs)
            if (spoly::degree(fac) > 1) {
                pending = &fac;
                break;
            }
        if (!pending) {
            Splitting s{total, {}};
            for (const auto& fac : facs) s.roots.push_back(-fac[0]);
            std::sort(s.roots.begin(), s.roots.end(), [](const Scalar& a, const Scalar& b) { return a.compare(b) < 0; });
            return s;
        }
        if (L->kind == FieldKind::FiniteField) fail(ErrorCode::FieldBudgetExceeded, "finite field lacks the required roots");
        Extension ext = adjoin_root(L, *pending, budget);
        total = total.then(ext.embed);
    }
}

// ---- reduction modulo p -------------------------------------------------------------

Scalar Reduction::apply(const Scalar& x) const {
    if (x.field() != source) fail(ErrorCode::FieldMismatch, "reduction applied to element of " + describe(x.field()));
    if (source->kind == FieldKind::FiniteField) fail(ErrorCode::InvalidArgument, "reduction source must have characteristic zero");
    const auto& c = x.q_coords();
    for (const auto& v : c)
        if (v.get_den() % p == 0)
            fail(ErrorCode::DenominatorDivisibleByP, "p = " + std::to_string(p) + " divides a denominator of " + x.to_string());
    if (source->degree == 1) return Scalar::from_rat(target, c[0]);
    Scalar acc = Scalar::zero(target);
    for (size_t i = c.size(); i-- > 0;) acc = acc * image_of_gen + Scalar::from_rat(target, c[i]);
    return acc;
}

const Reduction& reduction_for(const Field& source, std::int64_t p) {
    static std::mutex mutex;
    static std::map<std::pair<const FieldData*, std::int64_t>, Reduction> cache;
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find({source.get(), p});
        if (it != cache.end()) return it->second;
    }
    if (!is_prime(p)) fail(ErrorCode::InvalidArgument, std::to_string(p) + " is not prime");
    if (source->kind == FieldKind::FiniteField) fail(ErrorCode::InvalidArgument, "reduction source must have characteristic zero");
    Reduction red;
    red.source = source;
    red.p = p;
    if (source->degree == 1) {
        red.target = prime_field(p);
        red.image_of_gen = Scalar::one(red.target);
    } else {
        for (const auto& c : source->minpoly)
            if (c.get_den() % p == 0) fail(ErrorCode::DenominatorDivisibleByP, "minimal polynomial not p-integral");
        Field base = prime_field(p);
        SPoly m = spoly::from_q(base, source->minpoly);
        auto facs = factor_over(base, m);
        int best_deg = 1 << 30;
        for (const auto& f : facs) best_deg = std::min(best_deg, spoly::degree(f));
        const SPoly* chosen = nullptr;
        if (best_deg == 1) {
            // Smallest root among linear factors.
            std::int64_t best_root = p;
            for (const auto& f : facs) {
                if (spoly::degree(f) != 1) continue;
                std::int64_t r = (-f[0]).m_coords()[0];
                if (r < best_root) {
                    best_root = r;
                    chosen = &f;
                }
            }
            red.target = base;
            red.image_of_gen = Scalar::from_int(base, static_cast<long>(best_root));
        } else {
            // Lexicographically smallest modulus, compared from the top coefficient down.
            for (const auto& f : facs) {
                if (spoly::degree(f) != best_deg) continue;
                if (!chosen || spoly_less(f, *chosen)) chosen = &f;
            }
            std::vector<std::int64_t> mod;
            for (const auto& c : *chosen) mod.push_back(c.m_coords()[0]);
            red.target = extend_field(p, mod);
            red.image_of_gen = Scalar::generator(red.target);
        }
    }
    std::lock_guard<std::mutex> lock(mutex);
    auto [it, inserted] = cache.emplace(std::make_pair(source.get(), p), red);
    return it->second;
}

Field reduction_target(const Field& source, std::int64_t p) { return reduction_for(source, p).target; }

Scalar reduce_mod_p(const Scalar& x, std::int64_t p) { return reduction_for(x.field(), p).apply(x); }

Scalar reduce_mod_p(const GaussianRat& x, std::int64_t p) { return reduce_mod_p(x.to_scalar(), p); }

}  // namespace nov
