#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace nov {

using Rat = mpq_class;
using Int = mpz_class;

Rat parse_rat(const std::string& text);
std::string to_string(const Rat& r);
std::string to_string(const Int& z);

Int rat_floor(const Rat& r);
Int rat_ceil(const Rat& r);

inline Rat make_rat(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// Extended value in Rat ∪ {+∞}.
struct ExtRat {
    std::optional<Rat> value;  // nullopt is +∞

    static ExtRat infinity() { return ExtRat{}; }
    static ExtRat of(const Rat& r) { return ExtRat{r}; }
    bool is_infinite() const { return !value.has_value(); }
    const Rat& get() const { return *value; }
};

bool operator<(const ExtRat& a, const ExtRat& b);
bool operator==(const ExtRat& a, const ExtRat& b);
std::string to_string(const ExtRat& r);

}  // namespace nov
