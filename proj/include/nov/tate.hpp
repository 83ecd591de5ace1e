#pragma once

// The Z/p layer: the Borel Morse model of S^infinity, p-fold tensor powers
// with the signed cyclic operator, the Tate complex over a window of
// u-powers, and the torsion comparison with the base complex.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nov/filtered.hpp"

namespace nov {

// Column-major sparse matrix: col[c] maps a row index to a nonzero entry.
struct SparseMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<std::map<std::size_t, Series>> col;

    SparseMatrix() = default;
    SparseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), col(c) {}
    void add(std::size_t r, std::size_t c, const Series& v);
    std::size_t nonzeros() const;
    Mat dense(const Field& f) const;
};

SparseMatrix sparse_mul(const SparseMatrix& a, const SparseMatrix& b);
bool is_zero(const SparseMatrix& a);

// Valuations of the invariant factors over the valuation ring, by
// elimination modulo T^P with least-valuation pivots. Units appear as 0.
std::vector<Rat> sparse_smith_valuations(const SparseMatrix& a, const Rat& P);

struct BorelMorseComplex {
    std::int64_t p = 0;
    int l_max = 0;
    Field field;
    std::vector<std::string> labels;  // Z_k^m
    std::vector<int> degree;
    Mat d;  // cochain differential, d[target][source]
};

// Generators Z_k^m for 0 <= k <= 2 l_max + 1; coefficients in F_p unless
// another field is given.
BorelMorseComplex borel_morse_complex(std::int64_t p, int l_max, const Field& coefficients = nullptr);
// Cohomology ranks in degrees 0 .. 2 l_max of the orbit complex, a model of
// B(Z/p), and of the complex itself, a model of the contractible S^infinity.
std::vector<std::size_t> borel_cohomology_ranks(const BorelMorseComplex& B);
std::vector<std::size_t> sphere_cohomology_ranks(const BorelMorseComplex& B);
// The differential commutes with the cyclic shift m -> m + 1.
bool is_equivariant(const BorelMorseComplex& B);

struct TensorPower {
    std::int64_t p = 0;
    std::size_t base_dim = 0;
    std::vector<int> degree;  // mod 2, per basis tuple
    SparseMatrix d;
    SparseMatrix zeta;
};

// Tuples are indexed in base-n positional order with x_0 most significant.
TensorPower tensor_power_with_zeta(const Mat& d, const std::vector<int>& degree, std::int64_t p);
std::vector<std::size_t> tensor_index_digits(std::size_t index, std::size_t n, std::int64_t p);

struct TateComplex {
    std::int64_t p = 0;
    int window = 0;          // u-levels -window .. window
    std::size_t block = 0;   // dimension of the tensor power
    Field field;
    SparseMatrix d;
    // Basis index ((j + window) * 2 + theta) * block + x.
    std::size_t index(int level, int theta, std::size_t x) const;
};

// Base complex in characteristic p (rational complexes are reduced mod p).
// Levels above the window are dropped, so the result is a quotient complex.
TateComplex tate_differential(const FilteredComplex& C, std::int64_t p, int M);

struct TateTorsion {
    std::vector<Rat> exponents;  // one entry per torsion summand of a K<theta>-line, longest first
    std::size_t free_rank = 0;   // free summands per K<theta>-line
    Rat total;
    int window = 0;
};
// Compares windows M-2, M-1 and M; throws WindowTooSmall unless both
// increments agree and split evenly across levels and the theta bit.
TateTorsion tate_torsion_exponents(const FilteredComplex& C, std::int64_t p, int M);

struct QuasiFrobeniusReport {
    bool ok = false;
    std::vector<Rat> base_exponents;
    std::vector<Rat> tate_exponents;
    std::vector<Rat> expected;  // p times the base exponents
    std::size_t base_free = 0;
    std::size_t tate_free = 0;
    std::string witness;
};
QuasiFrobeniusReport quasi_frobenius_check(const FilteredComplex& C, std::int64_t p, int M);

struct SmithDemo {
    bool vacuous = false;
    std::optional<int> k;  // least k with p^k tau > bars * C0
    Rat lhs, rhs;
};
SmithDemo smith_demo(const Rat& base_tau, const Rat& depth_bound, long bars, std::int64_t p, int k_max = 64);

}  // namespace nov
