// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "nov/random.hpp"
#include "nov/report.hpp"
#include "nov/semisimple.hpp"
#include "nov/tate.hpp"

using namespace nov;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Collects failures without stopping at the first one.
struct Tally {
    Outcome out;
    void require(bool cond, const std::string& what) {
        if (!cond && out.ok) {
            out.ok = false;
            out.detail = what;
        }
    }
};

Series mono(const Field& f, long c, const Rat& e) { return Series::monomial(Scalar::from_int(f, c), e); }

// ---- brute-force linear algebra over the coefficient field -------------------

std::size_t rank_of(std::vector<std::vector<Scalar>> rows) {
    std::size_t rank = 0;
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        std::size_t p = rank;
        while (p < rows.size() && rows[p][c].is_zero()) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[rank]);
        for (std::size_t i = rank + 1; i < rows.size(); ++i) {
            if (rows[i][c].is_zero()) continue;
            const Scalar f = rows[i][c] / rows[rank][c];
            for (std::size_t j = c; j < cols; ++j) rows[i][j] -= f * rows[rank][j];
        }
        ++rank;
    }
    return rank;
}

Scalar entry(const FilteredComplex& C, std::size_t q, std::size_t p) {
    const Series& e = C.d[q][p];
    return e.is_exact_zero() ? Scalar::zero(C.field) : e.terms().front().second;
}

std::vector<std::size_t> below(const FilteredComplex& C, const Rat& s) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < C.size(); ++i)
        if (C.gens[i].action <= s) out.push_back(i);
    return out;
}

std::vector<std::vector<Scalar>> boundaries_of(const FilteredComplex& C, const std::vector<std::size_t>& span) {
    std::vector<std::vector<Scalar>> out;
    for (std::size_t p : span) {
        std::vector<Scalar> v;
        for (std::size_t q = 0; q < C.size(); ++q) v.push_back(entry(C, q, p));
        out.push_back(v);
    }
    return out;
}

std::vector<std::vector<Scalar>> unit_vectors(const FilteredComplex& C, const std::vector<std::size_t>& span) {
    std::vector<std::vector<Scalar>> out;
    for (std::size_t i : span) {
        std::vector<Scalar> v(C.size(), Scalar::zero(C.field));
        v[i] = Scalar::one(C.field);
        out.push_back(v);
    }
    return out;
}

// Homology rank of the sub-complex spanned by generators of action <= s.
std::size_t filtered_betti(const FilteredComplex& C, const Rat& s) {
    const auto span = below(C, s);
    return span.size() - 2 * rank_of(boundaries_of(C, span));
}

std::size_t intersection_dim(const std::vector<std::vector<Scalar>>& a, const std::vector<std::vector<Scalar>>& b) {
    auto both = a;
    both.insert(both.end(), b.begin(), b.end());
    return rank_of(a) + rank_of(b) - rank_of(both);
}

// Least beta with V_l ∩ Im d inside d(V_{l+beta}) for every level l.
std::optional<Rat> direct_boundary_depth(const FilteredComplex& C) {
    std::vector<std::size_t> all(C.size());
    for (std::size_t i = 0; i < C.size(); ++i) all[i] = i;
    const auto image = boundaries_of(C, all);
    std::set<Rat> candidates{Rat(0)};
    for (const auto& a : C.gens)
        for (const auto& b : C.gens)
            if (a.action > b.action) candidates.insert(a.action - b.action);
    for (const Rat& beta : candidates) {
        bool ok = true;
        for (const auto& g : C.gens) {
            const auto V = unit_vectors(C, below(C, g.action));
            const auto W = boundaries_of(C, below(C, g.action + beta));
            if (intersection_dim(V, image) != intersection_dim(V, W)) {
                ok = false;
                break;
            }
        }
        if (ok) return beta;
    }
    return std::nullopt;
}

// ---- criteria ------------------------------------------------------------------

Outcome hirzebruch() {
    Tally t;
    const Polytope P = hirzebruch_polytope(4, Rat(1, 2));
    CriticalSet S = critical_points(build_ghv(P, BulkDeformation::trivial(P.facets.size())), Rat(4));
    const Classification cl = classify_inside(S, P);
    t.require(S.points.size() == 6, "expected 6 critical points, got " + std::to_string(S.points.size()));
    t.require(S.unresolved.empty(), "unresolved tropical branches");
    for (const auto& pt : S.points) {
        const Rat v2 = pt.val_vector[1];
        if (pt.inside) t.require(v2 == Rat(1, 4), "inside point with v(y2) = " + to_string(v2));
        else t.require(v2 == Rat(3, 2), "outside point with v(y2) = " + to_string(v2));
    }
    t.require(cl.inside.size() == 4 && cl.outside.size() == 2, "expected 4 inside and 2 outside");
    t.require(cl.inside.size() == vertex_count(P), "inside count differs from the vertex count");
    if (t.out.ok) t.out.detail = "6 points, 4 with v(y2)=1/4 inside, 2 with v(y2)=3/2 outside";
    return t.out;
}

Outcome projective_spectrum() {
    Tally t;
    const Rat Z(5);
    for (int n = 1; n <= 3; ++n) {
        const LaurentPoly W = build_ghv(cp_polytope(n), BulkDeformation::trivial(n + 1));
        const CriticalSet S = critical_points(W, Z);
        const Field& F = S.field;
        const std::string tag = "CP^" + std::to_string(n) + ": ";
        t.require(S.points.size() == static_cast<std::size_t>(n + 1), tag + "wrong number of points");
        const Rat w(1, n + 1);
        std::vector<Scalar> roots;
        for (const auto& pt : S.points) {
            // Every coordinate is the same monomial zeta T^{1/(n+1)}.
            const Series& y = pt.eta[0];
            bool shape = y.terms().size() == 1 && y.terms()[0].first == w;
            for (const auto& c : pt.eta) shape = shape && c == y;
            t.require(shape, tag + "coordinates are not zeta T^(1/(n+1))");
            if (!shape) continue;
            const Scalar zeta = y.terms()[0].second;
            t.require(zeta.pow(n + 1) == Scalar::one(F), tag + "zeta is not a root of unity of order n+1");
            for (const auto& r : roots) t.require(r != zeta, tag + "repeated root of unity");
            roots.push_back(zeta);
            // Substitution: y_i d_i W = y_i - T / prod y and W = n y + T / y^n.
            const Series T = mono(F, 1, Rat(1));
            Series prod = Series::one(F);
            for (const auto& c : pt.eta) prod *= c;
            const Series quotient = T * prod.invert(Rat(10));
            for (const auto& c : pt.eta) t.require((c - quotient).is_exact_zero(), tag + "not a critical point");
            const Series value = Series::constant(Scalar::from_int(F, n)) * y + quotient;
            t.require(value == Series::monomial(zeta * Scalar::from_int(F, n + 1), w), tag + "closed-form value");
            t.require(pt.value.agrees_with(value), tag + "reported critical value differs");
            t.require(!(pt.residual < ExtRat::of(Z)), tag + "residual below Z");
        }
        const auto cert = certify_set(S);
        t.require(cert && cert->morse && cert->distinct_values, tag + "certificate failed");
    }
    if (t.out.ok) t.out.detail = "n = 1, 2, 3 match zeta T^(1/(n+1)) with values (n+1) zeta T^(1/(n+1))";
    return t.out;
}

Outcome count_and_bound() {
    Tally t;
    std::ostringstream os;
    for (const auto& name : preset_names()) {
        const Polytope P = preset_polytope(name);
        BulkSearchOptions o;
        BulkSearchResult r = search_convenient_bulk(P, o);
        const Classification cl = classify_inside(r.critical, P);
        const Int bound = kouchnirenko_bound(P);
        t.require(cl.inside.size() == vertex_count(P), name + ": inside count differs from the vertex count");
        t.require(Int(static_cast<unsigned long>(r.critical.points.size())) <= bound, name + ": total exceeds the bound");
        os << name << " " << cl.inside.size() << "/" << r.critical.points.size() << "<=" << bound.get_str() << " ";
    }
    if (t.out.ok) t.out.detail = os.str();
    return t.out;
}

Outcome random_barcodes() {
    Tally t;
    Rng root(20240401);
    std::size_t depth_checked = 0;
    for (std::uint64_t s = 0; s < 500; ++s) {
        Rng rng = root.derive(s);
        RandomComplexOptions o;
        o.generators = static_cast<std::size_t>(rng.uniform(1, 8));
        o.max_den = 4;
        const PlantedComplex pc = random_complex(rng, o, rationals());
        const FilteredComplex& C = pc.complex;
        const std::string tag = "instance " + std::to_string(s) + ": ";
        const Barcode b = barcode(C);
        t.require(b.endpoint_count() == C.size(), tag + "endpoint identity");
        std::set<Rat> probes;
        for (const auto& g : C.gens) {
            probes.insert(g.action);
            probes.insert(g.action - Rat(1, 8));
        }
        probes.insert(Rat(1000));
        for (const Rat& p : probes)
            t.require(persistence_rank(C, p) == filtered_betti(C, p), tag + "rank at " + to_string(p));
        std::vector<Rat> lengths;
        for (const auto& iv : persistence_intervals(C))
            if (iv.death) lengths.push_back(*iv.death - iv.birth);
        std::sort(lengths.begin(), lengths.end(), [](const Rat& x, const Rat& y) { return x > y; });
        t.require(lengths == b.finite, tag + "interval lengths differ from the barcode");
        if (C.size() <= 6) {
            t.require(direct_boundary_depth(C) == boundary_depth(C), tag + "boundary depth");
            ++depth_checked;
        }
    }
    if (t.out.ok) t.out.detail = "500 complexes, " + std::to_string(depth_checked) + " depth checks";
    return t.out;
}

Outcome stability() {
    Tally t;
    Rng root(20240402);
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng = root.derive(s);
        RandomComplexOptions o;
        o.generators = static_cast<std::size_t>(rng.uniform(1, 7));
        o.novikov_entries = s % 2 == 0;
        const PlantedComplex pc = random_complex(rng, o, rationals());
        const Rat delta(rng.uniform(1, 6), 4);
        const FilteredComplex P = perturb_actions(rng, pc.complex, delta);
        const std::string tag = "instance " + std::to_string(s) + ": ";
        const ExtRat dB = bottleneck_distance(barcode(pc.complex), barcode(P));
        t.require(!dB.is_infinite() && dB.get() <= 2 * delta, tag + "bottleneck above 2 delta");
        Rat diff = boundary_depth(pc.complex) - boundary_depth(P);
        if (diff < 0) diff = -diff;
        t.require(diff <= 2 * delta, tag + "boundary depth moved by more than 2 delta");
    }
    if (t.out.ok) t.out.detail = "200 perturbations";
    return t.out;
}

Outcome spectral_axioms() {
    Tally t;
    Rng root(20240403);
    std::size_t nonzero = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng = root.derive(s);
        RandomComplexOptions o;
        o.generators = static_cast<std::size_t>(rng.uniform(1, 7));
        o.novikov_entries = s % 2 == 0;
        const Field f = s % 3 == 0 ? gaussian_rationals() : rationals();
        const PlantedComplex pc = random_complex(rng, o, f);
        const FilteredComplex& K = pc.complex;
        const std::size_t n = K.size();
        const std::string tag = "instance " + std::to_string(s) + ": ";
        Vec alpha(n, Series::zero(f));
        std::optional<Rat> expected;
        for (std::size_t u : pc.unpaired) {
            if (!rng.coin(2, 3)) continue;
            const Rat g = rng.rational(-2, 2, 4);
            const Series c = mono(f, rng.uniform(1, 3), g);
            for (std::size_t i = 0; i < n; ++i) alpha[i] += c * pc.frame[i][u];
            const Rat lvl = pc.planted_actions[u] - g;
            if (!expected || *expected < lvl) expected = lvl;
        }
        const SpectralValue rho = spectral_invariant(K, alpha);
        if (!expected) {
            t.require(rho.minus_infinity, tag + "zero class not reported as -inf");
            continue;
        }
        ++nonzero;
        t.require(!rho.minus_infinity && rho.value == *expected, tag + "value differs from the planted level");
        // Attained by a homologous cycle.
        t.require(chain_level(K, rho.representative) == rho.value, tag + "representative level");
        t.require(mat::is_exact_zero(Mat{mat::apply(K.d, rho.representative)}), tag + "representative is not a cycle");
        t.require(spectral_invariant(K, rho.representative).value == rho.value, tag + "representative changes the class");
        // Independent of the representative.
        Vec chain(n, Series::zero(f));
        for (auto& x : chain)
            if (rng.coin(1, 2)) x = mono(f, rng.uniform(-3, 3), rng.rational(-2, 2, 2));
        Vec shifted = alpha;
        const Vec dchain = mat::apply(K.d, chain);
        for (std::size_t i = 0; i < n; ++i) shifted[i] += dchain[i];
        t.require(spectral_invariant(K, shifted).value == rho.value, tag + "boundary shifts the value");
        // Homogeneity.
        const Rat g = rng.rational(-2, 2, 3);
        const Series lambda = mono(f, rng.uniform(1, 4), g) + mono(f, 1, g + 1);
        Vec scaled = alpha;
        for (auto& x : scaled) x = x * lambda;
        t.require(spectral_invariant(K, scaled).value == rho.value - g, tag + "homogeneity");
    }
    if (t.out.ok) t.out.detail = "200 instances, " + std::to_string(nonzero) + " nonzero classes";
    return t.out;
}

Outcome mod_p() {
    Tally t;
    const Rat Z(8);
    for (int n : {1, 2}) {
        const Algebra A = projective_model(n);
        const Vec a = projective_chern_class(n);
        for (std::int64_t p : {5, 7, 11, 13}) {
            const std::string tag = "CP^" + std::to_string(n) + " p=" + std::to_string(p) + ": ";
            const TransferReport r = mod_p_transfer(A, a, p, Z);
            t.require(characteristic(r.reduced.field) == p, tag + "wrong characteristic");
            t.require(r.levels_match && r.reduced.levels == r.characteristic_zero.levels, tag + "levels differ");
            for (const auto& l : r.reduced.levels) t.require(l == Rat(n, n + 1), tag + "level is not n/(n+1)");
            const Algebra Ap = reduce_algebra(map_algebra(A, r.characteristic_zero.embed), p);
            Vec ap;
            for (const auto& c : a) ap.push_back(c.map(r.characteristic_zero.embed).reduce_mod_p(p));
            const SplitResiduals res = split_residuals(Ap, ap, r.reduced);
            const ExtRat target = ExtRat::of(Z);
            t.require(!(res.idempotent < target) && !(res.orthogonal < target) && !(res.unit_sum < target) &&
                          !(res.eigen < target),
                      tag + "identities fail below T^8");
        }
        try {
            mod_p_transfer(A, a, 2, Z);
            t.require(false, "p = 2 accepted");
        } catch (const Error& e) {
            t.require(e.code() == ErrorCode::PrimeTooSmall, std::string("p = 2 raised ") + error_name(e.code()));
        }
    }
    if (t.out.ok) t.out.detail = "CP^1, CP^2 at p = 5, 7, 11, 13; p = 2 rejected";
    return t.out;
}

Outcome borel_tate() {
    Tally t;
    for (std::int64_t p : {3, 5}) {
        const BorelMorseComplex B = borel_morse_complex(p, 3);
        const auto ranks = borel_cohomology_ranks(B);
        t.require(ranks.size() == 7, "expected degrees 0..6");
        for (std::size_t r : ranks) t.require(r == 1, "Borel rank " + std::to_string(r) + " at p=" + std::to_string(p));
        t.require(is_equivariant(B), "differential is not equivariant");
    }
    const Field F3 = prime_field(3);
    FilteredComplex C;
    C.field = F3;
    C.gens = {{"x", 1, Rat(0)}, {"y", 0, Rat(0)}};
    C.d = mat::zeros(F3, 2, 2);
    C.d[1][0] = mono(F3, 1, Rat(1, 2));
    const TateTorsion tt = tate_torsion_exponents(C, 3, 4);
    Rat total = 0;
    for (const auto& g : tt.exponents) total += g;
    t.require(total == Rat(3, 2) && total == 3 * total_bar_length(C), "Tate torsion total " + to_string(total));
    const QuasiFrobeniusReport q = quasi_frobenius_check(C, 3, 4);
    t.require(q.ok && q.tate_free == q.base_free, "quasi-Frobenius mismatch: " + q.witness);
    if (t.out.ok) t.out.detail = "ranks 1 in degrees 0..6; torsion 3/2 = 3 * 1/2 at M = 4";
    return t.out;
}

Outcome kodaira_spencer() {
    Tally t;
    const Rat target(4);
    for (const std::string name : {"cp1", "f2"}) {
        const Polytope P = preset_polytope(name);
        BulkSearchResult r = search_convenient_bulk(P, BulkSearchOptions{});
        const Classification cl = classify_inside(r.critical, P);
        const std::size_t N = P.facets.size();
        for (std::size_t k : cl.inside) {
            Series sum = Series::zero(r.critical.field);
            for (std::size_t j = 0; j < N; ++j) {
                std::vector<long> e(N, 0);
                e[j] = 1;
                sum += ks_evaluate(e, P, r.bulk, r.critical, {k}, target)[0];
            }
            t.require(sum == evaluate(r.critical.W, r.critical.points[k].eta, target),
                      name + ": sum of ks(e_j) differs from W_b at point " + std::to_string(k));
        }
        const KsRank rank = ks_surjectivity_check(multiindices_up_to(N, P.n), P, r.bulk, r.critical, cl.inside, target);
        t.require(rank.resolved && rank.rank == cl.inside.size(), name + ": Kodaira-Spencer rank below #inside");
    }
    if (t.out.ok) t.out.detail = "cp1 and f2: sums match, full rank";
    return t.out;
}

std::string run_cli(const std::string& args) {
    const std::string cmd = std::string(NOV_CLI_PATH) + " " + args + " 2>/dev/null";
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    if (!pipe) return "";
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
    return out;
}

Outcome determinism() {
    Tally t;
    RunConfig cfg;
    cfg.seed = 42;
    for (const auto& name : preset_names()) {
        const Polytope P = preset_polytope(name);
        t.require(pipeline_report(P, cfg).dump() == pipeline_report(P, cfg).dump(), name + ": in-process reports differ");
        const std::string args = "pipeline --preset " + name + " --seed 42";
        const std::string first = run_cli(args), second = run_cli(args);
        t.require(!first.empty() && first.find("\"schema_version\"") != std::string::npos, name + ": no CLI report");
        t.require(first == second, name + ": CLI reports differ between runs");
        t.require(first == pipeline_report(P, cfg).dump(2) + "\n", name + ": CLI and library reports differ");
    }
    if (t.out.ok) t.out.detail = "cp1, cp2, f2, f4 byte-identical across runs";
    return t.out;
}

}  // namespace

int main() {
    struct Criterion {
        std::string name;
        std::function<Outcome()> run;
        double limit_seconds;
    };
    const std::vector<Criterion> criteria = {
        {"1 Hirzebruch F4 reproduction", hirzebruch, 10},
        {"2 CP^n spectrum", projective_spectrum, 5},
        {"3 count and Kouchnirenko bound", count_and_bound, 60},
        {"4 barcode correctness", random_barcodes, 60},
        {"5 stability", stability, 60},
        {"6 spectral-invariant axioms", spectral_axioms, 60},
        {"7 mod-p transfer", mod_p, 60},
        {"8 Borel and Tate", borel_tate, 30},
        {"9 Kodaira-Spencer", kodaira_spencer, 60},
        {"10 pipeline determinism", determinism, 120},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const Error& e) {
            o = {false, e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.ok && secs > c.limit_seconds) o = {false, "over the time limit of " + std::to_string(int(c.limit_seconds)) + "s"};
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.2fs", secs);
        std::cout << (o.ok ? "PASS " : "FAIL ") << c.name << " (" << timing << "): " << o.detail << std::endl;
        failures += !o.ok;
    }
    std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criteria failed" : "acceptance: all criteria passed")
              << std::endl;
    return failures ? 1 : 0;
}
