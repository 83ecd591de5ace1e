#include <functional>

#include "nov/random.hpp"
#include "nov/report.hpp"
#include "nov/tate.hpp"

namespace nov {

namespace {

using Check = std::function<std::string()>;  // empty string on success

Series mono(const Field& f, long c, const Rat& e) { return Series::monomial(Scalar::from_int(f, c), e); }

std::string expect(bool cond, const std::string& what) { return cond ? std::string() : what; }

FilteredComplex half_bar(const Field& f) {
    FilteredComplex C;
    C.field = f;
    C.gens = {{"x", 1, Rat(0)}, {"y", 0, Rat(0)}};
    C.d = mat::zeros(f, 2, 2);
    C.d[1][0] = mono(f, 1, Rat(1, 2));
    return C;
}

std::vector<std::pair<std::string, Check>> cases() {
    std::vector<std::pair<std::string, Check>> out;
    out.emplace_back("rational arithmetic", [] {
        const Field F7 = prime_field(7);
        const Scalar i = Scalar::generator(gaussian_rationals());
        return expect(Rat(1, 2) + Rat(1, 3) == Rat(5, 6) && i * i == -Scalar::one(gaussian_rationals()) &&
                          Scalar::from_int(F7, 3).inverse() == Scalar::from_int(F7, 5),
                      "field identities");
    });
    out.emplace_back("geometric series inverse", [] {
        const Field Q = rationals();
        const Series inv = (Series::one(Q) - mono(Q, 1, Rat(1))).invert(Rat(5));
        Series expected = Series::zero(Q);
        for (int k = 0; k < 5; ++k) expected += mono(Q, 1, Rat(k));
        return expect(inv.agrees_with(expected) && inv.precision() == Rat(5), "1/(1-T) mod T^5");
    });
    out.emplace_back("series text round trip", [] {
        const Field Qi = gaussian_rationals();
        const Series s = parse_series(Qi, "(1+2i)*T^(-1/2) - 3 + T^2 + O(T^4)");
        return expect(parse_series(Qi, s.to_string()) == s && s.valuation().get() == Rat(-1, 2), s.to_string());
    });
    out.emplace_back("projective plane polytope", [] {
        const Polytope P = preset_polytope("cp2");
        return expect(vertex_count(P) == 3 && kouchnirenko_bound(P) == 3, "vertices and mixed volume");
    });
    out.emplace_back("half-length bar", [] {
        const FilteredComplex C = half_bar(rationals());
        const Barcode b = barcode(C);
        return expect(b.finite == std::vector<Rat>{Rat(1, 2)} && b.infinite == 0 && boundary_depth(C) == Rat(1, 2),
                      "barcode of d x = T^(1/2) y");
    });
    out.emplace_back("planted barcodes", [] {
        Rng root(7);
        for (std::uint64_t k = 0; k < 20; ++k) {
            Rng rng = root.derive(k);
            RandomComplexOptions o;
            o.novikov_entries = k % 2 == 1;
            const PlantedComplex pc = random_complex(rng, o, rationals());
            const Barcode b = barcode(pc.complex);
            if (b.finite != pc.expected.finite || b.infinite != pc.expected.infinite)
                return "instance " + std::to_string(k);
        }
        return std::string();
    });
    out.emplace_back("projective line critical values", [] {
        CriticalSet S = critical_points(build_ghv(cp_polytope(1), BulkDeformation::trivial(2)), Rat(4));
        if (S.points.size() != 2) return std::string("expected two critical points");
        for (const auto& pt : S.points) {
            const Series v = Series::from_terms(S.field, pt.value.terms());
            const Series sq = v * v;
            if (!(sq == mono(S.field, 4, Rat(1)))) return "value squared is " + sq.to_string();
        }
        return std::string();
    });
    out.emplace_back("Hirzebruch F4 classification", [] {
        const Polytope P = preset_polytope("f4");
        CriticalSet S = critical_points(build_ghv(P, BulkDeformation::trivial(4)), Rat(4));
        const Classification cl = classify_inside(S, P);
        return expect(S.points.size() == 6 && cl.inside.size() == 4 && cl.outside.size() == 2, "six points, four inside");
    });
    out.emplace_back("idempotents of x^2 = T", [] {
        const Algebra A = projective_model(1);
        const Vec a = projective_chern_class(1);
        const IdempotentSplit S = certify_semisimple(A, a, Rat(6));
        const SplitResiduals r = split_residuals(A, a, S);
        bool ok = S.levels == std::vector<Rat>{Rat(1, 2), Rat(1, 2)};
        ok = ok && !(r.idempotent < ExtRat::of(S.precision)) && !(r.unit_sum < ExtRat::of(S.precision));
        return expect(ok, "levels 1/2 and identities to precision");
    });
    out.emplace_back("transfer to characteristic 5", [] {
        const TransferReport t = mod_p_transfer(projective_model(1), projective_chern_class(1), 5, Rat(8));
        return expect(t.levels_match, "levels differ after reduction");
    });
    out.emplace_back("characteristic 2 rejected", [] {
        try {
            mod_p_transfer(projective_model(1), projective_chern_class(1), 2, Rat(8));
        } catch (const Error& e) {
            return expect(e.code() == ErrorCode::PrimeTooSmall, error_name(e.code()));
        }
        return std::string("no error raised");
    });
    out.emplace_back("Borel ranks", [] {
        for (std::int64_t p : {3, 5}) {
            const auto ranks = borel_cohomology_ranks(borel_morse_complex(p, 3));
            for (std::size_t r : ranks)
                if (r != 1) return "rank " + std::to_string(r) + " at p=" + std::to_string(p);
        }
        return std::string();
    });
    out.emplace_back("Tate torsion of a half bar", [] {
        const TateTorsion t = tate_torsion_exponents(half_bar(prime_field(3)), 3, 4);
        return expect(t.exponents == std::vector<Rat>{Rat(3, 2)} && t.free_rank == 0, "expected one exponent 3/2");
    });
    out.emplace_back("reduction of 1/2 modulo 7", [] {
        return expect(reduce_mod_p(GaussianRat(Rat(1, 2)), 7).to_string() == "4", "expected 4");
    });
    out.emplace_back("reducible modulus rejected", [] {
        try {
            extend_field(5, {1, 0, 1});
        } catch (const Error& e) {
            return expect(e.code() == ErrorCode::ReduciblePolynomial, error_name(e.code()));
        }
        return std::string("x^2 + 1 accepted over F_5");
    });
    out.emplace_back("quadratic extension of F_3", [] {
        return expect(extend_field(3, {1, 0, 1})->degree == 2, "degree of F_9");
    });
    out.emplace_back("Delzant and support values", [] {
        const bool delzant = delzant_check(cp_polytope(2)).delzant;
        const auto ell = support_values(cp_polytope(1), {Rat(1, 2)});
        return expect(delzant && ell == std::vector<Rat>{Rat(1, 2), Rat(1, 2)}, "cp1 at u = 1/2");
    });
    out.emplace_back("log-Hessian of the projective line", [] {
        const Field Q = rationals();
        const auto H = hessian_certificate(build_ghv(cp_polytope(1), BulkDeformation::trivial(2)),
                                           {mono(Q, 1, Rat(1, 2))}, Rat(4));
        return expect(H.det_val == Rat(1, 2) && H.hessian[0][0] == mono(Q, 2, Rat(1, 2)), "2 T^(1/2)");
    });
    out.emplace_back("discriminant of x^2 = T", [] {
        const DiscriminantReport d = discriminant_valuation(projective_model(1), projective_chern_class(1));
        return expect(d.discriminant == mono(rationals(), 16, Rat(1)) && d.valuation == Rat(1), d.discriminant.to_string());
    });
    out.emplace_back("bottleneck conventions", [] {
        const Barcode a{{Rat(10)}, 1}, b{{Rat(9)}, 1};
        return expect(bottleneck_distance(a, b) == ExtRat::of(Rat(1)) &&
                          bottleneck_distance(a, b, BottleneckConvention::Endpoint) == ExtRat::of(Rat(1, 2)),
                      "bars 10 and 9");
    });
    out.emplace_back("spectral invariant of a surviving cycle", [] {
        FilteredComplex C = half_bar(rationals());
        C.gens.push_back({"z", 0, Rat(2)});
        C.d = mat::zeros(C.field, 3, 3);
        C.d[1][0] = mono(C.field, 1, Rat(1, 2));
        Vec z(3, Series::zero(C.field));
        z[2] = mono(C.field, 1, Rat(1));
        const SpectralValue r = spectral_invariant(C, z);
        return expect(!r.minus_infinity && r.value == Rat(1), "rho(T z) = 2 - 1");
    });
    out.emplace_back("growth against bounded depth", [] {
        const SmithDemo d = smith_demo(Rat(1), Rat(100), 10, 5);
        return expect(d.k && *d.k == 5, "smallest k is 5");
    });
    out.emplace_back("missing file", [] {
        try {
            load_complex_file("/nonexistent/complex.json");
        } catch (const Error& e) {
            return expect(exit_code_for(e.code()) == 2, error_name(e.code()));
        }
        return std::string("no error raised");
    });
    out.emplace_back("pipeline determinism", [] {
        RunConfig cfg;
        const Polytope P = preset_polytope("cp1");
        const Json a = pipeline_report(P, cfg), b = pipeline_report(P, cfg);
        bool ok = a.dump() == b.dump() && a["counts"]["inside"] == 2;
        for (const auto& t : a["transfers"]) ok = ok && t["status"] == "ok";
        return expect(ok, "cp1 pipeline");
    });
    return out;
}

}  // namespace

std::vector<SelftestCase> run_selftest() {
    std::vector<SelftestCase> out;
    for (const auto& [name, check] : cases()) {
        SelftestCase c;
        c.name = name;
        try {
            c.detail = check();
            c.ok = c.detail.empty();
        } catch (const Error& e) {
            c.detail = e.what();
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace nov
