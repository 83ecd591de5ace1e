#pragma once

// Coefficient fields: ℚ, number fields ℚ[x]/(m) (ℚ(i) among them), and
// finite fields 𝔽_p[x]/(f). Field handles are canonical shared pointers;
// two handles denote the same field iff the pointers are equal.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nov/poly.hpp"
#include "nov/rat.hpp"

namespace nov {

enum class FieldKind { Rational, NumberField, FiniteField };

struct FieldData {
    FieldKind kind = FieldKind::Rational;
    int degree = 1;                      // over the prime field
    QPoly minpoly;                       // number fields: monic, size degree+1
    std::int64_t p = 0;                  // finite fields
    std::vector<std::int64_t> modulus;   // finite fields: monic, size degree+1
    std::string gen;                     // printable generator name
};

using Field = std::shared_ptr<const FieldData>;

Field rationals();
Field gaussian_rationals();  // ℚ[x]/(x²+1), generator printed as i
Field number_field(const QPoly& minpoly, const std::string& gen = "a");
Field prime_field(std::int64_t p);
// Extension 𝔽_p[x]/(f) with f monic and irreducible over 𝔽_p.
Field extend_field(std::int64_t p, const std::vector<std::int64_t>& f);

std::string describe(const Field& f);
std::int64_t characteristic(const Field& f);
// Field order q for finite fields; 0 otherwise.
Int field_order(const Field& f);

class Scalar {
public:
    Scalar() = default;
    static Scalar zero(const Field& f);
    static Scalar one(const Field& f);
    static Scalar from_rat(const Field& f, const Rat& r);
    static Scalar from_int(const Field& f, long v) { return from_rat(f, Rat(v)); }
    static Scalar generator(const Field& f);
    // Coordinates in the power basis of the generator.
    static Scalar from_coords(const Field& f, const std::vector<Rat>& coords);
    static Scalar from_residues(const Field& f, const std::vector<std::int64_t>& coords);

    const Field& field() const { return field_; }
    bool valid() const { return field_ != nullptr; }
    bool is_zero() const;
    bool is_one() const;
    // True when the element lies in the prime field ℚ or 𝔽_p.
    bool is_prime_field_element() const;
    Rat as_rat() const;  // requires a rational element

    const std::vector<Rat>& q_coords() const { return q_; }
    const std::vector<std::int64_t>& m_coords() const { return m_; }

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator/(const Scalar& o) const;
    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
    Scalar inverse() const;
    Scalar pow(long e) const;
    Scalar pow(const Int& e) const;
    bool operator==(const Scalar& o) const;
    bool operator!=(const Scalar& o) const { return !(*this == o); }
    // Total order used only for canonical sorting.
    int compare(const Scalar& o) const;

    std::string to_string() const;
    // Least common denominator of the rational coordinates (1 for finite fields).
    Int denominator() const;

private:
    Field field_;
    std::vector<Rat> q_;
    std::vector<std::int64_t> m_;
};

void require_same_field(const Scalar& a, const Scalar& b);

struct GaussianRat {
    Rat re = 0, im = 0;
    GaussianRat() = default;
    GaussianRat(const Rat& r, const Rat& i = 0) : re(r), im(i) {}
    GaussianRat operator+(const GaussianRat& o) const { return {re + o.re, im + o.im}; }
    GaussianRat operator-(const GaussianRat& o) const { return {re - o.re, im - o.im}; }
    GaussianRat operator*(const GaussianRat& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    GaussianRat operator/(const GaussianRat& o) const;
    bool operator==(const GaussianRat& o) const { return re == o.re && im == o.im; }
    Rat norm() const { return re * re + im * im; }
    bool is_zero() const { return re == 0 && im == 0; }
    Scalar to_scalar() const;
    std::string to_string() const;
};

GaussianRat parse_gaussian(const std::string& text);

// ---- reduction modulo p ------------------------------------------------------

// The ring map from a characteristic-zero field to a finite field at p.
struct Reduction {
    Field source;
    Field target;
    Scalar image_of_gen;
    std::int64_t p = 0;
    Scalar apply(const Scalar& x) const;
};

const Reduction& reduction_for(const Field& source, std::int64_t p);
Scalar reduce_mod_p(const Scalar& x, std::int64_t p);
Scalar reduce_mod_p(const GaussianRat& x, std::int64_t p);
Field reduction_target(const Field& source, std::int64_t p);

// ---- polynomials with field coefficients -------------------------------------

using SPoly = std::vector<Scalar>;

namespace spoly {
void trim(SPoly& f);
int degree(const SPoly& f);
SPoly from_q(const Field& f, const QPoly& q);
SPoly add(const SPoly& a, const SPoly& b);
SPoly sub(const SPoly& a, const SPoly& b);
SPoly mul(const SPoly& a, const SPoly& b);
SPoly scale(const SPoly& a, const Scalar& c);
void divmod(const SPoly& a, const SPoly& b, SPoly& q, SPoly& r);
SPoly rem(const SPoly& a, const SPoly& b);
SPoly quo(const SPoly& a, const SPoly& b);
SPoly monic(const SPoly& a);
SPoly gcd(const SPoly& a, const SPoly& b);
SPoly derivative(const SPoly& a);
SPoly powmod(const SPoly& base, const Int& e, const SPoly& m);
Scalar eval(const SPoly& a, const Scalar& x);
SPoly shift(const SPoly& a, const Scalar& c);  // a(y + c)
std::string to_string(const SPoly& a, const std::string& var = "z");
}  // namespace spoly

// Monic irreducible factors of the squarefree part of f over its field.
std::vector<SPoly> factor_over(const Field& field, const SPoly& f);

// ---- field extensions --------------------------------------------------------

// Ring embedding K → L determined by the image of K's generator.
struct Embedding {
    Field from;
    Field to;
    Scalar image_of_gen;
    static Embedding identity(const Field& f);
    Scalar apply(const Scalar& x) const;
    Embedding then(const Embedding& next) const;
};

struct Extension {
    Field field;
    Embedding embed;
    Scalar root;  // a root of the adjoined polynomial, in the new field
};

constexpr int kDefaultFieldBudget = 8;

// Adjoin a root of an irreducible polynomial g over a characteristic-zero
// field. Throws FieldBudgetExceeded when the degree over ℚ would exceed budget.
Extension adjoin_root(const Field& K, const SPoly& g, int budget = kDefaultFieldBudget);

// Extend until f splits; returns all distinct roots in the final field.
struct Splitting {
    Embedding embed;
    std::vector<Scalar> roots;
};
Splitting split_polynomial(const Field& K, const SPoly& f, int budget = kDefaultFieldBudget);

// Roots of f lying in its coefficient field (no extension).
std::vector<Scalar> roots_in_field(const Field& K, const SPoly& f);

}  // namespace nov
