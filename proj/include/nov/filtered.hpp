#pragma once

// Filtered Floer–Novikov complexes: a Z/2-graded free module over the
// Novikov field with action-valued generators and a differential that
// lowers the filtration level
//     l(sum a_i x_i) = max_i ( l(x_i) - v(a_i) ).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nov/matrix.hpp"

namespace nov {

enum class FiltrationMode { Strict, Verbose };

struct Generator {
    std::string label;
    int degree = 0;  // taken mod 2
    Rat action;
};

struct FilteredComplex {
    Field field;
    std::vector<Generator> gens;
    Mat d;  // d[q][p] is the coefficient of q in the boundary of p
    FiltrationMode mode = FiltrationMode::Strict;
    std::size_t size() const { return gens.size(); }
};

struct ValidationReport {
    bool ok = true;
    std::string condition;  // first violated condition
    std::string witness;
};

ValidationReport validate(const FilteredComplex& C);
// Throws InvalidComplex with the report text.
void require_valid(const FilteredComplex& C);

// Filtration level of a chain; nullopt for the zero chain (level -inf).
std::optional<Rat> chain_level(const FilteredComplex& C, const Vec& chain);

struct Barcode {
    std::vector<Rat> finite;  // sorted, longest first
    std::size_t infinite = 0;
    std::size_t endpoint_count() const { return 2 * finite.size() + infinite; }
};

Barcode barcode(const FilteredComplex& C);
Rat boundary_depth(const FilteredComplex& C);
Rat total_bar_length(const FilteredComplex& C);

struct SpectralValue {
    bool minus_infinity = false;  // the class is zero
    Rat value;
    // A homologous cycle of level exactly `value` (empty for the zero class).
    Vec representative;
};

// Throws NotClosed when the chain is not a cycle.
SpectralValue spectral_invariant(const FilteredComplex& C, const Vec& cycle);

// All differential entries are constants of T-degree zero.
bool is_generator_filtered(const FilteredComplex& C);

struct Interval {
    Rat birth;
    std::optional<Rat> death;  // nullopt: infinite
    int degree = 0;
};

// Persistence intervals of the sub-complexes spanned by generators of
// action <= s. Generator-filtered complexes only (NotGeneratorFiltered).
std::vector<Interval> persistence_intervals(const FilteredComplex& C);
std::size_t persistence_rank(const FilteredComplex& C, const Rat& s);

enum class BottleneckConvention {
    // Matched bar lengths differ by at most delta.
    LengthDifference,
    // Matched bar lengths differ by at most 2 delta (endpoints move by delta).
    Endpoint,
};

ExtRat bottleneck_distance(const Barcode& a, const Barcode& b,
                           BottleneckConvention conv = BottleneckConvention::LengthDifference);
// Feasibility of one delta under the same rules.
bool bottleneck_feasible(const std::vector<Rat>& a, const std::vector<Rat>& b, const Rat& delta,
                         BottleneckConvention conv = BottleneckConvention::LengthDifference);

struct QuasiReport {
    bool ok = true;
    std::string failure;
};

QuasiReport check_quasiequivalence(const FilteredComplex& C1, const FilteredComplex& C2, const Mat& Phi,
                                   const Mat& Psi, const Mat& K1, const Mat& K2, const Rat& delta);

// Actions negated and the differential transposed.
FilteredComplex dual_complex(const FilteredComplex& C);

// Matrix with entries d_qp T^{l(p) - l(q)}; its Smith valuations over the
// valuation ring are the finite bar lengths.
Mat normalized_differential(const FilteredComplex& C);

// Exponent bound P such that working modulo T^P cannot lose an invariant
// factor of a finitely supported matrix over the valuation ring.
Rat smith_precision_bound(const Mat& a);

// Valuations of the invariant factors of a matrix over the valuation ring,
// computed modulo T^P with P = smith_precision_bound.
std::vector<Rat> smith_valuations(const Mat& a);

}  // namespace nov
