#pragma once

// Dense matrices of Novikov series and the eliminations used across the
// library. Two arithmetic regimes appear:
//  * honest: entries carry precision horizons and every operation propagates
//    them with the min rule;
//  * capped: every intermediate is cut at a fixed exponent cap and kept
//    exact, which is how Newton-type iterations run before being certified
//    separately.

#include <cstddef>
#include <utility>
#include <vector>

#include "nov/novikov.hpp"

namespace nov {

using Vec = std::vector<Series>;
using Mat = std::vector<Vec>;

namespace mat {

Mat zeros(const Field& f, std::size_t rows, std::size_t cols);
Mat identity(const Field& f, std::size_t n);
std::size_t rows(const Mat& a);
std::size_t cols(const Mat& a);
Mat mul(const Mat& a, const Mat& b);
Mat add(const Mat& a, const Mat& b);
Mat sub(const Mat& a, const Mat& b);
Mat scale(const Mat& a, const Series& s);
Mat transpose(const Mat& a);
Vec apply(const Mat& a, const Vec& v);
bool is_exact_zero(const Mat& a);
// Keep only terms with exponent below cap and mark the result exact.
Mat truncate(const Mat& a, const Rat& cap);
Vec truncate(const Vec& v, const Rat& cap);
Mat reduce_mod_p(const Mat& a, std::int64_t p);
Mat map(const Mat& a, const Embedding& e);

// Division-free cofactor expansion.
Series determinant(const Mat& a);

struct RankResult {
    std::size_t rank = 0;
    // False when elimination stopped at entries whose valuation is hidden
    // below their precision horizon.
    bool resolved = true;
    std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, col)
};

// Rank over the Novikov field by Gaussian elimination that always pivots
// on an entry of least valuation. Pivot inverses are expanded to absolute
// precision `target`.
RankResult valuation_rank(Mat a, const Rat& target);

// Solve a·x = b with every intermediate cut at cap. Throws NotInvertible
// when a pivot column has no nonzero entry.
Vec solve_capped(Mat a, Vec b, const Rat& cap);

}  // namespace mat

}  // namespace nov
