#pragma once

// Bulk-deformed Givental–Hori–Vafa potentials W_b = sum_j c_j T^{-lambda_j} y^{v_j}
// and their critical points as truncated Puiseux series.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nov/matrix.hpp"
#include "nov/polytope.hpp"

namespace nov {

using Exponent = std::vector<long>;

struct LaurentPoly {
    Field field;
    int n = 0;
    std::map<Exponent, Series> terms;  // no zero coefficients

    void add_term(const Exponent& e, const Series& c);
    LaurentPoly map(const Embedding& e) const;
    std::string to_string() const;
};

// Nonzero Gaussian integers c_j, one per facet.
struct BulkDeformation {
    std::vector<GaussianRat> c;
    static BulkDeformation trivial(std::size_t facets);
    bool is_real() const;
    std::string to_string() const;
};

// Comma-separated list such as "1,2-i,3i"; throws ParseError on zero or
// non-integral entries.
BulkDeformation parse_bulk(const std::string& text);

// ℚ for real bulks, ℚ(i) otherwise.
Field bulk_field(const BulkDeformation& b);
Scalar bulk_scalar(const Field& f, const GaussianRat& c);

LaurentPoly build_ghv(const Polytope& P, const BulkDeformation& b);
// W_b(T^{u_1} y_1, ..., T^{u_n} y_n); throws NotInterior.
LaurentPoly build_fiber_potential(const Polytope& P, const BulkDeformation& b, const std::vector<Rat>& u);
std::vector<LaurentPoly> log_derivatives(const LaurentPoly& W);

// y^v at a point whose coordinates have valuations `vals`, to absolute precision `target`.
Series power_product(const Vec& y, const std::vector<Rat>& vals, const Exponent& v, const Rat& target);
Series evaluate(const LaurentPoly& W, const Vec& y, const Rat& target);
// Exact valuation of W(y) for exact coordinates, by clearing negative exponents.
ExtRat exact_valuation_at(const LaurentPoly& W, const Vec& y);

struct CriticalPoint {
    Vec eta;
    std::vector<Rat> val_vector;
    ExtRat residual;         // min_i v(y_i d_i W(eta)), certified exactly
    Rat value_precision;     // absolute precision of `value`
    Series value;
    std::optional<Rat> hessian_val;
    bool inside = false;
};

struct CriticalSet {
    Field field;       // common coefficient field of every point
    Embedding embed;   // from the field of W
    LaurentPoly W;     // W mapped into `field`
    Rat precision;
    std::vector<CriticalPoint> points;
    // Tropical branches whose leading system the solver could not handle.
    std::vector<std::string> unresolved;
};

// Throws JacobianDegenerateAtLeadingOrder, FieldBudgetExceeded, PrecisionInsufficient.
CriticalSet critical_points(const LaurentPoly& W, const Rat& Z, int field_budget = kDefaultFieldBudget);

struct HessianCertificate {
    Mat hessian;  // y_i d_i (y_k d_k W)
    Series det;
    Rat det_val;
};
// Entries evaluated to absolute precision `target`; throws PrecisionInsufficient
// when the determinant has no resolved term.
HessianCertificate hessian_certificate(const LaurentPoly& W, const Vec& eta, const Rat& target);

struct ConvenienceCertificate {
    bool morse = false;
    bool distinct_values = false;
    Rat precision_used;
};
// Escalates the precision by doubling up to `cap`, then throws PrecisionInsufficient.
ConvenienceCertificate certify_convenient(const LaurentPoly& W, const Rat& Z, const Rat& cap,
                                          int field_budget = kDefaultFieldBudget, CriticalSet* out = nullptr);
// Certificate for an already computed set; nullopt when precision is insufficient.
std::optional<ConvenienceCertificate> certify_set(const CriticalSet& S);

struct Classification {
    std::vector<std::size_t> inside, outside;
};
// Sets CriticalPoint::inside; throws BoundaryCase.
Classification classify_inside(CriticalSet& S, const Polytope& P);

struct BulkSearchResult {
    BulkDeformation bulk;
    std::size_t trial = 0;
    CriticalSet critical;
    ConvenienceCertificate certificate;
};
struct BulkSearchOptions {
    long norm_bound = 3;
    std::size_t trials = 20;
    std::uint64_t seed = 0;
    Rat precision = Rat(4);
    int field_budget = kDefaultFieldBudget;
};
// Trial 0 is the trivial bulk; later trials are seeded random Gaussian integers.
BulkSearchResult search_convenient_bulk(const Polytope& P, const BulkSearchOptions& opts);

struct DiskWeight {
    Series weight;
    long maslov = 0;
};
DiskWeight disk_weight(const Polytope& P, const BulkDeformation& b, const std::vector<long>& I,
                       const std::vector<Rat>& u, const Vec& y, const Rat& target);

// Component at each point: prod_j W_{b,j}(eta)^{I_j}.
Vec ks_evaluate(const std::vector<long>& I, const Polytope& P, const BulkDeformation& b, const CriticalSet& S,
                const std::vector<std::size_t>& points, const Rat& target);
struct KsRank {
    std::size_t rank = 0;
    bool resolved = true;
};
KsRank ks_surjectivity_check(const std::vector<std::vector<long>>& monomials, const Polytope& P,
                             const BulkDeformation& b, const CriticalSet& S, const std::vector<std::size_t>& points,
                             const Rat& target);
// All multi-indices over `facets` entries with |I| <= degree.
std::vector<std::vector<long>> multiindices_up_to(std::size_t facets, long degree);

}  // namespace nov
