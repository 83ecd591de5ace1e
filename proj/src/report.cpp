#include "nov/report.hpp"

#include "nov/tate.hpp"

namespace nov {

namespace {

Series exact_part(const Series& s) { return Series::from_terms(s.field(), s.terms()); }

Json point_json(const CriticalPoint& pt, std::size_t index) {
    Json out;
    out["index"] = index;
    out["eta"] = Json::array();
    for (const auto& c : pt.eta) out["eta"].push_back(series_json(c));
    out["valuations"] = rats_json(pt.val_vector);
    out["inside"] = pt.inside;
    out["value"] = series_json(pt.value);
    out["value_precision"] = to_string(pt.value_precision);
    out["hessian_val"] = pt.hessian_val ? Json(to_string(*pt.hessian_val)) : Json(nullptr);
    out["residual"] = ext_rat_json(pt.residual);
    return out;
}

Json certificate_json(const ConvenienceCertificate& c) {
    return {{"morse", c.morse}, {"distinct_values", c.distinct_values}, {"precision_used", to_string(c.precision_used)}};
}

Json bulk_json(const BulkDeformation& b, std::size_t trial) {
    Json coeffs = Json::array();
    for (const auto& c : b.c) coeffs.push_back(c.to_string());
    return {{"coefficients", coeffs}, {"text", b.to_string()}, {"trial", trial}};
}

BulkSearchOptions search_options(const RunConfig& cfg) {
    BulkSearchOptions o;
    o.norm_bound = cfg.norm_bound;
    o.trials = cfg.trial_budget;
    o.seed = cfg.seed;
    o.precision = cfg.precision;
    o.field_budget = cfg.field_budget;
    return o;
}

Json split_json(const Algebra& A, const IdempotentSplit& S) {
    Json out;
    out["field"] = describe(S.field);
    out["dimension"] = A.dim();
    out["precision"] = to_string(S.precision);
    out["working_precision"] = to_string(S.working_precision);
    out["eigenvalues"] = Json::array();
    for (const auto& l : S.eigenvalues) out["eigenvalues"].push_back(series_json(l));
    out["levels"] = rats_json(S.levels);
    out["idempotents"] = Json::array();
    for (const auto& e : S.idempotents) out["idempotents"].push_back(chain_json(A.labels, e));
    return out;
}

Json residuals_json(const SplitResiduals& r) {
    return {{"idempotent", ext_rat_json(r.idempotent)},
            {"orthogonal", ext_rat_json(r.orthogonal)},
            {"unit_sum", ext_rat_json(r.unit_sum)},
            {"eigen", ext_rat_json(r.eigen)}};
}

Json transfer_json(const Algebra& A, const Vec& a, std::int64_t p, const RunConfig& cfg) {
    Json out;
    out["p"] = p;
    try {
        const TransferReport t = mod_p_transfer(A, a, p, cfg.algebra_precision, cfg.field_budget);
        out["status"] = "ok";
        out["residue_field"] = describe(t.reduced.field);
        out["levels_match"] = t.levels_match;
        out["levels"] = rats_json(t.reduced.levels);
        out["defect"] = rats_json(t.defect);
    } catch (const Error& e) {
        out["status"] = error_name(e.code());
        out["message"] = e.what();
    }
    return out;
}

}  // namespace

void check_config(const RunConfig& cfg) {
    if (cfg.precision <= 0 || cfg.algebra_precision <= 0) fail(ErrorCode::InvalidArgument, "precision must be positive");
    if (cfg.field_budget < 1 || cfg.trial_budget < 1) fail(ErrorCode::InvalidArgument, "budgets must be at least 1");
    if (cfg.u_window < 2) fail(ErrorCode::InvalidArgument, "the u-window must be at least 2");
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return 2;
        case ErrorCode::PrecisionInsufficient:
        case ErrorCode::DiscriminantZeroToPrecision:
        case ErrorCode::IndeterminateValuation:
        case ErrorCode::WindowTooSmall: return 3;
        case ErrorCode::FieldBudgetExceeded:
        case ErrorCode::SearchExhausted: return 4;
        default: return 1;
    }
}

Json report_header(const std::string& command) {
    Json out;
    out["schema_version"] = kSchemaVersion;
    out["command"] = command;
    return out;
}

Json error_report(const std::string& command, const Error& e) {
    Json out = report_header(command);
    out["error"] = {{"code", error_name(e.code())}, {"message", e.what()}, {"exit_code", exit_code_for(e.code())}};
    return out;
}

Json presets_report() {
    Json out = report_header("presets");
    out["presets"] = Json::array();
    for (const auto& name : preset_names()) {
        const Polytope P = preset_polytope(name);
        out["presets"].push_back({{"name", name}, {"dim", P.n}, {"facets", P.facets.size()}});
    }
    return out;
}

Json version_report() {
    Json out = report_header("version");
    out["version"] = kVersion;
    return out;
}

Json potential_report(const Polytope& P, const BulkDeformation& b, const RunConfig& cfg,
                      const std::optional<std::vector<Rat>>& fiber) {
    check_config(cfg);
    Json out = report_header("potential analyze");
    out["polytope"] = P.name;
    out["bulk"] = bulk_json(b, 0);
    const LaurentPoly W = fiber ? build_fiber_potential(P, b, *fiber) : build_ghv(P, b);
    out["potential"] = W.to_string();
    if (fiber) out["fiber"] = rats_json(*fiber);
    CriticalSet S;
    const ConvenienceCertificate cert = certify_convenient(W, cfg.precision, 8 * cfg.precision, cfg.field_budget, &S);
    std::vector<Rat> shift(P.n, Rat(0));
    if (fiber) for (int i = 0; i < P.n; ++i) shift[i] = -(*fiber)[i];
    const Polytope frame = fiber ? translate(P, shift) : P;
    const Classification cl = classify_inside(S, frame);
    out["field"] = describe(S.field);
    out["precision"] = to_string(S.precision);
    out["points"] = Json::array();
    for (std::size_t k = 0; k < S.points.size(); ++k) out["points"].push_back(point_json(S.points[k], k));
    Json unresolved = Json::array();
    for (const auto& u : S.unresolved) unresolved.push_back(u);
    out["unresolved"] = unresolved;
    Json c = certificate_json(cert);
    c["kouchnirenko_bound"] = to_string(kouchnirenko_bound(P));
    c["betti"] = vertex_count(P);
    c["total"] = S.points.size();
    c["inside"] = cl.inside.size();
    c["outside"] = cl.outside.size();
    out["certificates"] = c;
    return out;
}

Json bulk_search_report(const Polytope& P, const RunConfig& cfg) {
    check_config(cfg);
    BulkSearchResult r = search_convenient_bulk(P, search_options(cfg));
    const Classification cl = classify_inside(r.critical, P);
    Json out = report_header("bulk search");
    out["polytope"] = P.name;
    out["seed"] = cfg.seed;
    out["bulk"] = bulk_json(r.bulk, r.trial);
    out["certificate"] = certificate_json(r.certificate);
    out["counts"] = {{"total", r.critical.points.size()}, {"inside", cl.inside.size()}, {"outside", cl.outside.size()}};
    return out;
}

PotentialModel potential_model(const Polytope& P, const std::optional<BulkDeformation>& bulk, const RunConfig& cfg) {
    check_config(cfg);
    PotentialModel m;
    if (bulk) {
        m.bulk = *bulk;
        m.certificate =
            certify_convenient(build_ghv(P, *bulk), cfg.precision, 8 * cfg.precision, cfg.field_budget, &m.critical);
    } else {
        BulkSearchResult r = search_convenient_bulk(P, search_options(cfg));
        m.bulk = r.bulk;
        m.trial = r.trial;
        m.critical = std::move(r.critical);
        m.certificate = r.certificate;
    }
    m.classes = classify_inside(m.critical, P);
    m.algebra = diagonal_algebra(m.critical.field, m.classes.inside.size());
    for (std::size_t k : m.classes.inside) m.element.push_back(exact_part(m.critical.points[k].value));
    return m;
}

Json split_report(const Algebra& A, const Vec& a, const RunConfig& cfg, std::optional<std::int64_t> p) {
    check_config(cfg);
    const AlgebraCheck chk = check_algebra(A);
    if (!chk.ok) fail(ErrorCode::InvalidArgument, "not a commutative unital algebra: " + chk.failure);
    Json out = report_header("algebra split");
    out["element"] = chain_json(A.labels, a);
    const IdempotentSplit S = certify_semisimple(A, a, cfg.algebra_precision, cfg.field_budget);
    out["split"] = split_json(A, S);
    out["residuals"] = residuals_json(split_residuals(A, a, S));
    if (p) out["transfer"] = transfer_json(A, a, *p, cfg);
    return out;
}

Json split_from_potential_report(const Polytope& P, const std::optional<BulkDeformation>& bulk, const RunConfig& cfg,
                                 std::optional<std::int64_t> p) {
    const PotentialModel m = potential_model(P, bulk, cfg);
    Json out = split_report(m.algebra, m.element, cfg, p);
    out["polytope"] = P.name;
    out["bulk"] = bulk_json(m.bulk, m.trial);
    return out;
}

Json barcode_report(const FilteredComplex& C) {
    const Barcode b = barcode(C);
    Json out = report_header("filtered barcode");
    out["field"] = describe(C.field);
    out["generators"] = C.size();
    out["finite"] = rats_json(b.finite);
    out["infinite"] = b.infinite;
    out["endpoint_count"] = b.endpoint_count();
    return out;
}

Json depth_report(const FilteredComplex& C) {
    Json out = report_header("filtered depth");
    out["boundary_depth"] = to_string(boundary_depth(C));
    return out;
}

Json tau_report(const FilteredComplex& C) {
    Json out = report_header("filtered tau");
    out["total_bar_length"] = to_string(total_bar_length(C));
    return out;
}

Json rho_report(const FilteredComplex& C, const Vec& cycle) {
    std::vector<std::string> labels;
    for (const auto& g : C.gens) labels.push_back(g.label);
    const SpectralValue v = spectral_invariant(C, cycle);
    Json out = report_header("filtered rho");
    out["cycle"] = chain_json(labels, cycle);
    out["zero_class"] = v.minus_infinity;
    out["rho"] = v.minus_infinity ? Json("-inf") : Json(to_string(v.value));
    out["representative"] = chain_json(labels, v.representative);
    return out;
}

Json bottleneck_report(const FilteredComplex& C1, const FilteredComplex& C2, BottleneckConvention conv) {
    const Barcode a = barcode(C1), b = barcode(C2);
    Json out = report_header("filtered bottleneck");
    out["convention"] = conv == BottleneckConvention::LengthDifference ? "length" : "endpoint";
    out["first"] = {{"finite", rats_json(a.finite)}, {"infinite", a.infinite}};
    out["second"] = {{"finite", rats_json(b.finite)}, {"infinite", b.infinite}};
    out["distance"] = ext_rat_json(bottleneck_distance(a, b, conv));
    return out;
}

Json tate_report(const FilteredComplex& C, std::int64_t p, int window) {
    const QuasiFrobeniusReport q = quasi_frobenius_check(C, p, window);
    Rat base_total = 0, tate_total = 0;
    for (const auto& g : q.base_exponents) base_total += g;
    for (const auto& g : q.tate_exponents) tate_total += g;
    Json out = report_header("tate check");
    out["p"] = p;
    out["window"] = window;
    out["base_torsion"] = {{"exponents", rats_json(q.base_exponents)}, {"total", to_string(base_total)}, {"free", q.base_free}};
    out["tate_torsion"] = {{"exponents", rats_json(q.tate_exponents)}, {"total", to_string(tate_total)}, {"free", q.tate_free}};
    out["ratio"] = base_total == 0 ? Json(nullptr) : Json(to_string(Rat(tate_total / base_total)));
    out["quasi_frobenius"] = q.ok ? "ok" : "mismatch";
    if (!q.ok) out["witness"] = q.witness;
    return out;
}

Json pipeline_report(const Polytope& P, const RunConfig& cfg) {
    const PotentialModel m = potential_model(P, std::nullopt, cfg);
    Json out = report_header("pipeline");
    out["polytope"] = P.name;
    out["config"] = {{"seed", cfg.seed},
                     {"trial_budget", cfg.trial_budget},
                     {"norm_bound", cfg.norm_bound},
                     {"precision", to_string(cfg.precision)},
                     {"algebra_precision", to_string(cfg.algebra_precision)},
                     {"field_budget", cfg.field_budget},
                     {"primes", cfg.primes}};
    out["bulk"] = bulk_json(m.bulk, m.trial);
    out["field"] = describe(m.critical.field);
    out["points"] = Json::array();
    for (std::size_t k = 0; k < m.critical.points.size(); ++k) out["points"].push_back(point_json(m.critical.points[k], k));
    out["counts"] = {{"total", m.critical.points.size()},
                     {"inside", m.classes.inside.size()},
                     {"outside", m.classes.outside.size()},
                     {"vertex_count", vertex_count(P)},
                     {"kouchnirenko_bound", to_string(kouchnirenko_bound(P))}};
    out["certificate"] = certificate_json(m.certificate);
    const IdempotentSplit S = certify_semisimple(m.algebra, m.element, cfg.algebra_precision, cfg.field_budget);
    Json alg = split_json(m.algebra, S);
    alg["semisimple"] = true;
    alg["residuals"] = residuals_json(split_residuals(m.algebra, m.element, S));
    out["algebra"] = alg;
    out["transfers"] = Json::array();
    for (std::int64_t p : cfg.primes) out["transfers"].push_back(transfer_json(m.algebra, m.element, p, cfg));
    return out;
}

Json selftest_report(const std::vector<SelftestCase>& cases) {
    Json out = report_header("selftest");
    std::size_t passed = 0;
    out["cases"] = Json::array();
    for (const auto& c : cases) {
        passed += c.ok;
        Json item = {{"name", c.name}, {"ok", c.ok}};
        if (!c.detail.empty()) item["detail"] = c.detail;
        out["cases"].push_back(item);
    }
    out["passed"] = passed;
    out["failed"] = cases.size() - passed;
    return out;
}

}  // namespace nov
