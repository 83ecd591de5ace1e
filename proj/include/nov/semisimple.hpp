#pragma once

// Finite-dimensional unital algebras over a Novikov field, idempotent
// splittings through a distinct-eigenvalue element, and their reduction to
// positive characteristic.

#include <cstdint>
#include <string>
#include <vector>

#include "nov/matrix.hpp"

namespace nov {

struct Algebra {
    Field field;
    std::vector<std::string> labels;
    // product[i][j] holds the coordinates of basis_i * basis_j.
    std::vector<std::vector<Vec>> product;
    Vec unit;
    std::size_t dim() const { return labels.size(); }
};

struct AlgebraCheck {
    bool ok = true;
    std::string failure;
};
// Unit axioms, associativity on basis triples and (optionally) commutativity,
// all compared exactly.
AlgebraCheck check_algebra(const Algebra& A, bool commutative = true);

Vec multiply(const Algebra& A, const Vec& x, const Vec& y);
Mat mult_operator(const Algebra& A, const Vec& a);
Algebra map_algebra(const Algebra& A, const Embedding& e);
// Throws DenominatorDivisibleByP through the coefficient reduction.
Algebra reduce_algebra(const Algebra& A, std::int64_t p);
Vec reduce_vector(const Vec& v, std::int64_t p);
// Largest -v(x_i) over the coordinates in the fixed basis.
Rat element_level(const Vec& x);

// Λ^m with coordinate idempotents.
Algebra diagonal_algebra(const Field& f, std::size_t m);
// Λ[x]/(x^m - sum_k r_k x^k) on the basis 1, x, ..., x^{m-1}.
Algebra quotient_algebra(const Vec& relation);
// Λ[x]/(x^{n+1} - T), the quantum cohomology of CP^n, and its first Chern
// class (n+1) x.
Algebra projective_model(int n);
Vec projective_chern_class(int n);

// Monic characteristic polynomial det(X - M), coefficients from degree 0 up.
std::vector<Series> characteristic_polynomial(const Mat& M);

struct RootSet {
    Embedding embed;  // from the polynomial's field to the field of the roots
    std::vector<Series> roots;
};
// Distinct roots of a polynomial with exact coefficients, each accurate to
// absolute precision P (truncated, exact series). Throws RepeatedEigenvalue
// when two roots cannot be separated.
RootSet puiseux_roots(const std::vector<Series>& f, const Rat& P, int field_budget = kDefaultFieldBudget);

struct IdempotentSplit {
    Field field;
    Embedding embed;  // from the algebra's field
    std::vector<Vec> idempotents;
    std::vector<Series> eigenvalues;
    std::vector<Rat> levels;  // l(e_l)
    Rat precision;            // identities hold modulo T^precision
    Rat working_precision;
};

// Throws RepeatedEigenvalue, ZeroEigenvalue, FieldBudgetExceeded, PrecisionInsufficient.
IdempotentSplit certify_semisimple(const Algebra& A, const Vec& a, const Rat& Z,
                                   int field_budget = kDefaultFieldBudget);

// Residual valuations of the splitting identities (minimum over coordinates).
struct SplitResiduals {
    ExtRat idempotent, orthogonal, unit_sum, eigen;
};
SplitResiduals split_residuals(const Algebra& A, const Vec& a, const IdempotentSplit& S);

struct DiscriminantReport {
    Series discriminant;
    Rat valuation;
    // Primes dividing the norm of the leading coefficient of the
    // discriminant or a denominator of the structure constants.
    std::vector<std::int64_t> small_primes;
};
// Throws DiscriminantZeroToPrecision.
DiscriminantReport discriminant_valuation(const Algebra& A, const Vec& a);

struct TransferReport {
    std::int64_t p = 0;
    IdempotentSplit characteristic_zero;
    IdempotentSplit reduced;       // over the residue field of characteristic p
    std::vector<Rat> defect;       // Z minus the valuation of e_(p) - reduce(trunc e_(0))
    bool levels_match = false;     // l_p(e_l) = l_0(e_l) for every l
};
// Throws PrimeTooSmall or IterationDiverged.
TransferReport mod_p_transfer(const Algebra& A, const Vec& a, std::int64_t p, const Rat& Z,
                              int field_budget = kDefaultFieldBudget);

// 2^n-dimensional algebra on exterior monomials with x_i x_j + x_j x_i = H_ij.
// Throws DegenerateForm when det H has no resolved leading term.
Algebra clifford_from_hessian(const Mat& H);

}  // namespace nov
