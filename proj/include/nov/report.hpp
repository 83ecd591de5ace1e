#pragma once

// JSON reports behind each command-line subcommand.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nov/errors.hpp"
#include "nov/io.hpp"
#include "nov/potential.hpp"

namespace nov {

constexpr int kSchemaVersion = 1;
constexpr const char* kVersion = "1.0.0";

struct RunConfig {
    Rat precision = Rat(4);            // critical points and certificates
    Rat algebra_precision = Rat(8);    // idempotent splittings and transfers
    int field_budget = kDefaultFieldBudget;
    std::size_t trial_budget = 20;
    std::uint64_t seed = 0;
    long norm_bound = 3;
    int u_window = 4;
    std::vector<std::int64_t> primes{5, 7, 11, 13};
};

// Throws InvalidArgument for a non-positive precision or empty budgets.
void check_config(const RunConfig& cfg);

// 0 ok, 2 parse, 3 precision (including a too small u-window), 4 budget,
// 1 anything else.
int exit_code_for(ErrorCode code);

Json report_header(const std::string& command);
Json error_report(const std::string& command, const Error& e);

Json presets_report();
Json version_report();

// Critical points of W_b, or of W_b(T^u y) when a fiber u is given.
Json potential_report(const Polytope& P, const BulkDeformation& b, const RunConfig& cfg,
                      const std::optional<std::vector<Rat>>& fiber = std::nullopt);
Json bulk_search_report(const Polytope& P, const RunConfig& cfg);

// The quantum model of a polytope: the diagonal algebra on the inside
// critical points with the critical values as certifying element.
struct PotentialModel {
    BulkDeformation bulk;
    std::size_t trial = 0;
    CriticalSet critical;
    ConvenienceCertificate certificate;
    Classification classes;
    Algebra algebra;
    Vec element;
};
// Uses the given bulk when present, otherwise searches for a convenient one.
PotentialModel potential_model(const Polytope& P, const std::optional<BulkDeformation>& bulk, const RunConfig& cfg);

Json split_report(const Algebra& A, const Vec& a, const RunConfig& cfg, std::optional<std::int64_t> p = std::nullopt);
Json split_from_potential_report(const Polytope& P, const std::optional<BulkDeformation>& bulk, const RunConfig& cfg,
                                 std::optional<std::int64_t> p = std::nullopt);

Json barcode_report(const FilteredComplex& C);
Json depth_report(const FilteredComplex& C);
Json tau_report(const FilteredComplex& C);
Json rho_report(const FilteredComplex& C, const Vec& cycle);
Json bottleneck_report(const FilteredComplex& C1, const FilteredComplex& C2, BottleneckConvention conv);

Json tate_report(const FilteredComplex& C, std::int64_t p, int window);

Json pipeline_report(const Polytope& P, const RunConfig& cfg);

struct SelftestCase {
    std::string name;
    bool ok = false;
    std::string detail;
};
std::vector<SelftestCase> run_selftest();
Json selftest_report(const std::vector<SelftestCase>& cases);

}  // namespace nov
