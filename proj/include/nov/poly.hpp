#pragma once

// Dense univariate polynomials over ℚ and ℤ, stored low degree first.

#include <vector>

#include "nov/rat.hpp"

namespace nov {

using QPoly = std::vector<Rat>;
using ZPoly = std::vector<Int>;

namespace qpoly {

void trim(QPoly& f);
int degree(const QPoly& f);  // -1 for the zero polynomial
QPoly add(const QPoly& a, const QPoly& b);
QPoly sub(const QPoly& a, const QPoly& b);
QPoly mul(const QPoly& a, const QPoly& b);
QPoly scale(const QPoly& a, const Rat& c);
void divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r);
QPoly rem(const QPoly& a, const QPoly& b);
QPoly quo(const QPoly& a, const QPoly& b);
QPoly monic(const QPoly& a);
QPoly gcd(const QPoly& a, const QPoly& b);  // monic, or zero
QPoly derivative(const QPoly& a);
Rat eval(const QPoly& a, const Rat& x);
bool is_squarefree(const QPoly& a);
std::string to_string(const QPoly& a, const std::string& var = "x");

// Integer primitive polynomial with positive leading coefficient, same roots.
ZPoly primitive_integer(const QPoly& a);
QPoly from_integer(const ZPoly& a);

// Interpolation through (xs[k], ys[k]) with distinct xs.
QPoly interpolate(const std::vector<Rat>& xs, const std::vector<Rat>& ys);

}  // namespace qpoly

// Monic irreducible factors over ℚ of the squarefree part of f, sorted
// by degree and then coefficients.
std::vector<QPoly> factor_rational(const QPoly& f);

bool is_irreducible_rational(const QPoly& f);

}  // namespace nov
