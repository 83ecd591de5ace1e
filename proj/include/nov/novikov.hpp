#pragma once

// Series Σ a_i T^{g_i} with exact rational exponents over a coefficient
// field, with an optional precision horizon P: every term with exponent
// below P is known exactly and the tail is O(T^P).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nov/coeff.hpp"
#include "nov/rat.hpp"

namespace nov {

class Series {
public:
    using Term = std::pair<Rat, Scalar>;

    Series() = default;
    explicit Series(const Field& f) : field_(f) {}

    static Series zero(const Field& f) { return Series(f); }
    static Series one(const Field& f) { return constant(Scalar::one(f)); }
    static Series constant(const Scalar& c);
    static Series monomial(const Scalar& c, const Rat& exponent);
    static Series from_terms(const Field& f, std::vector<Term> terms, std::optional<Rat> precision = std::nullopt);
    // O(T^P): no known terms, valuation at least P.
    static Series big_o(const Field& f, const Rat& precision);

    const Field& field() const { return field_; }
    const std::vector<Term>& terms() const { return terms_; }
    const std::optional<Rat>& precision() const { return precision_; }
    bool is_exact() const { return !precision_.has_value(); }
    // No stored terms: exactly zero, or zero up to the precision horizon.
    bool is_zero_to_precision() const { return terms_.empty(); }
    bool is_exact_zero() const { return terms_.empty() && is_exact(); }

    ExtRat valuation() const;  // throws IndeterminateValuation for O(T^P)
    // Valuation if known, else the precision bound; +∞ for exact zero.
    ExtRat valuation_lower_bound() const;
    const Scalar& leading_coefficient() const;
    ExtRat max_exponent() const;  // largest stored exponent (−∞ not needed: +∞ for empty)

    Series operator+(const Series& o) const;
    Series operator-(const Series& o) const;
    Series operator*(const Series& o) const;
    Series operator-() const;
    Series& operator+=(const Series& o) { return *this = *this + o; }
    Series& operator-=(const Series& o) { return *this = *this - o; }
    Series& operator*=(const Series& o) { return *this = *this * o; }
    Series scaled(const Scalar& c) const;
    Series shifted(const Rat& e) const;  // multiply by T^e
    Series pow(long e, const Rat& target_precision) const;

    // Inverse known to absolute precision min(target, P - 2·val) where P is
    // this series' own precision; exact for monomials.
    Series invert(const Rat& target_precision) const;

    // Terms with exponent ≤ Z. The result is exact when Z is below the
    // precision horizon.
    Series truncate(const Rat& Z) const;
    // Forget everything from exponent P on.
    Series with_precision(const Rat& P) const;
    Series rescale_p(long p) const;  // T ↦ T^{1/p}
    Series reduce_mod_p(std::int64_t p) const;
    Series map(const Embedding& e) const;

    // Equality of the known data: same terms below the smaller horizon.
    bool agrees_with(const Series& o) const;
    bool operator==(const Series& o) const;

    std::string to_string(const std::string& var = "T") const;

private:
    void normalize();
    Field field_;
    std::vector<Term> terms_;
    std::optional<Rat> precision_;
};

std::optional<Rat> min_precision(const std::optional<Rat>& a, const std::optional<Rat>& b);

}  // namespace nov
