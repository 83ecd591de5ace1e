#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nov/report.hpp"

using namespace nov;

namespace {

struct Source {
    std::string polytope_file;
    std::string preset;
};

void add_source(CLI::App* cmd, Source& s) {
    auto* file = cmd->add_option("--polytope", s.polytope_file, "Polytope JSON file");
    auto* preset = cmd->add_option("--preset", s.preset, "Preset polytope (cp1, cp2, f2, f4)");
    file->excludes(preset);
}

Polytope resolve(const Source& s) {
    if (!s.polytope_file.empty()) return load_polytope_file(s.polytope_file);
    if (!s.preset.empty()) {
        for (const auto& name : preset_names())
            if (name == s.preset) return preset_polytope(name);
        fail(ErrorCode::ParseError, "unknown preset '" + s.preset + "'");
    }
    fail(ErrorCode::ParseError, "one of --polytope or --preset is required");
}

// --from-potential takes a preset name or a polytope file.
Polytope resolve_named(const std::string& text) {
    for (const auto& name : preset_names())
        if (name == text) return preset_polytope(name);
    return load_polytope_file(text);
}

std::vector<Rat> parse_rat_list(const std::string& text) {
    std::vector<Rat> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_rat(item));
    if (out.empty()) fail(ErrorCode::ParseError, "empty list");
    return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> out;
    for (const auto& r : parse_rat_list(text)) {
        if (r.get_den() != 1 || !r.get_num().fits_slong_p()) fail(ErrorCode::ParseError, "expected an integer, got " + to_string(r));
        out.push_back(r.get_num().get_si());
    }
    return out;
}

struct Options {
    std::string output;
    std::string precision = "4";
    std::string algebra_precision = "8";
    int field_budget = kDefaultFieldBudget;
    std::size_t trials = 20;
    std::uint64_t seed = 0;
    long norm_bound = 3;
    std::string primes = "5,7,11,13";
    std::string bulk;
    std::string fiber;
    std::string from_potential;
    std::string algebra_file;
    std::string element;
    std::int64_t mod_p = 0;
    std::string complex_file;
    std::string other_file;
    std::string cycle;
    std::string convention = "length";
    std::int64_t p = 3;
    int window = 4;
};

RunConfig config_from(const Options& o) {
    RunConfig cfg;
    cfg.precision = parse_rat(o.precision);
    cfg.algebra_precision = parse_rat(o.algebra_precision);
    cfg.field_budget = o.field_budget;
    cfg.trial_budget = o.trials;
    cfg.seed = o.seed;
    cfg.norm_bound = o.norm_bound;
    cfg.u_window = o.window;
    cfg.primes = parse_int_list(o.primes);
    check_config(cfg);
    return cfg;
}

void emit(const Json& doc, const std::string& path) {
    if (path.empty()) {
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + path);
    out << doc.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact Novikov-field toolkit: barcodes, potentials, semisimple splittings and Tate torsion"};
    app.require_subcommand(1);
    Options o;
    app.add_option("-o,--output", o.output, "Write the report to a file instead of stdout");

    auto* version = app.add_subcommand("version", "Print the version");
    auto* presets = app.add_subcommand("presets", "List the preset polytopes");
    auto* selftest = app.add_subcommand("selftest", "Run the built-in example suite");

    Source src;
    auto* potential = app.add_subcommand("potential", "Potential function analysis");
    auto* analyze = potential->add_subcommand("analyze", "Critical points and certificates of W_b");
    potential->require_subcommand(1);
    add_source(analyze, src);
    analyze->add_option("--bulk", o.bulk, "Bulk coefficients c1,...,cN (default all 1)");
    analyze->add_option("--precision", o.precision, "Working precision a/b");
    analyze->add_option("--fiber", o.fiber, "Fiber point u1,...,un");
    analyze->add_option("--field-budget", o.field_budget, "Maximal extension degree");

    auto* bulk = app.add_subcommand("bulk", "Bulk deformations");
    auto* search = bulk->add_subcommand("search", "Seeded search for a convenient bulk");
    bulk->require_subcommand(1);
    add_source(search, src);
    search->add_option("--seed", o.seed, "Random seed");
    search->add_option("--trials", o.trials, "Trial budget");
    search->add_option("--norm-bound", o.norm_bound, "Bound on real and imaginary parts");
    search->add_option("--precision", o.precision, "Working precision a/b");
    search->add_option("--field-budget", o.field_budget, "Maximal extension degree");

    auto* algebra = app.add_subcommand("algebra", "Semisimple algebras");
    auto* split = algebra->add_subcommand("split", "Idempotent splitting through a certifying element");
    algebra->require_subcommand(1);
    auto* from_pot = split->add_option("--from-potential", o.from_potential, "Preset name or polytope file");
    auto* afile = split->add_option("--file", o.algebra_file, "Algebra JSON file");
    from_pot->excludes(afile);
    split->add_option("--element", o.element, "Certifying element, e.g. \"x\" or \"1=2,x=T\"");
    split->add_option("--bulk", o.bulk, "Bulk for --from-potential (default: search)");
    split->add_option("--precision", o.algebra_precision, "Precision Z of the splitting");
    split->add_option("--mod-p", o.mod_p, "Also transfer to characteristic p");
    split->add_option("--seed", o.seed, "Seed of the bulk search");
    split->add_option("--field-budget", o.field_budget, "Maximal extension degree");

    auto* filtered = app.add_subcommand("filtered", "Filtered Floer-Novikov complexes");
    filtered->require_subcommand(1);
    auto* fbar = filtered->add_subcommand("barcode", "Barcode");
    auto* fdepth = filtered->add_subcommand("depth", "Boundary depth");
    auto* ftau = filtered->add_subcommand("tau", "Total bar length");
    auto* frho = filtered->add_subcommand("rho", "Spectral invariant of a cycle");
    auto* fbot = filtered->add_subcommand("bottleneck", "Bottleneck distance between two complexes");
    for (auto* c : {fbar, fdepth, ftau, frho, fbot}) c->add_option("--complex", o.complex_file, "Complex JSON file")->required();
    frho->add_option("--cycle", o.cycle, "Cycle, e.g. \"x=1,y=T\"")->required();
    fbot->add_option("--other", o.other_file, "Second complex JSON file")->required();
    fbot->add_option("--convention", o.convention, "length or endpoint")->check(CLI::IsMember({"length", "endpoint"}));

    auto* tate = app.add_subcommand("tate", "Z/p Tate construction");
    tate->require_subcommand(1);
    auto* tcheck = tate->add_subcommand("check", "Tate torsion against p times the base torsion");
    tcheck->add_option("--complex", o.complex_file, "Complex JSON file")->required();
    tcheck->add_option("--p", o.p, "Odd prime");
    tcheck->add_option("--window", o.window, "u-window M");

    auto* pipeline = app.add_subcommand("pipeline", "Polytope to mod-p transfer table");
    add_source(pipeline, src);
    pipeline->add_option("--seed", o.seed, "Random seed");
    pipeline->add_option("--trials", o.trials, "Trial budget");
    pipeline->add_option("--norm-bound", o.norm_bound, "Bound on bulk coefficients");
    pipeline->add_option("--precision", o.precision, "Critical-point precision");
    pipeline->add_option("--algebra-precision", o.algebra_precision, "Splitting precision Z");
    pipeline->add_option("--field-budget", o.field_budget, "Maximal extension degree");
    pipeline->add_option("--primes", o.primes, "Comma-separated primes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::string command = "unknown";
    try {
        if (version->parsed()) {
            command = "version";
            emit(version_report(), o.output);
        } else if (presets->parsed()) {
            command = "presets";
            emit(presets_report(), o.output);
        } else if (selftest->parsed()) {
            command = "selftest";
            const auto cases = run_selftest();
            emit(selftest_report(cases), o.output);
            for (const auto& c : cases)
                if (!c.ok) return 1;
        } else if (analyze->parsed()) {
            command = "potential analyze";
            const Polytope P = resolve(src);
            const BulkDeformation b = o.bulk.empty() ? BulkDeformation::trivial(P.facets.size()) : parse_bulk(o.bulk);
            std::optional<std::vector<Rat>> fiber;
            if (!o.fiber.empty()) fiber = parse_rat_list(o.fiber);
            emit(potential_report(P, b, config_from(o), fiber), o.output);
        } else if (search->parsed()) {
            command = "bulk search";
            emit(bulk_search_report(resolve(src), config_from(o)), o.output);
        } else if (split->parsed()) {
            command = "algebra split";
            const RunConfig cfg = config_from(o);
            std::optional<std::int64_t> p;
            if (o.mod_p != 0) p = o.mod_p;
            if (!o.from_potential.empty()) {
                std::optional<BulkDeformation> b;
                if (!o.bulk.empty()) b = parse_bulk(o.bulk);
                emit(split_from_potential_report(resolve_named(o.from_potential), b, cfg, p), o.output);
            } else if (!o.algebra_file.empty()) {
                AlgebraFile f = load_algebra_file(o.algebra_file);
                if (!o.element.empty()) f.element = parse_chain(f.algebra.labels, f.algebra.field, o.element);
                if (f.element.empty()) fail(ErrorCode::ParseError, "no certifying element: pass --element");
                emit(split_report(f.algebra, f.element, cfg, p), o.output);
            } else {
                fail(ErrorCode::ParseError, "one of --from-potential or --file is required");
            }
        } else if (filtered->parsed()) {
            command = "filtered";
            const FilteredComplex C = load_complex_file(o.complex_file);
            if (fbar->parsed()) {
                command = "filtered barcode";
                emit(barcode_report(C), o.output);
            } else if (fdepth->parsed()) {
                command = "filtered depth";
                emit(depth_report(C), o.output);
            } else if (ftau->parsed()) {
                command = "filtered tau";
                emit(tau_report(C), o.output);
            } else if (frho->parsed()) {
                command = "filtered rho";
                std::vector<std::string> labels;
                for (const auto& g : C.gens) labels.push_back(g.label);
                emit(rho_report(C, parse_chain(labels, C.field, o.cycle)), o.output);
            } else {
                command = "filtered bottleneck";
                const FilteredComplex D = load_complex_file(o.other_file);
                const auto conv = o.convention == "endpoint" ? BottleneckConvention::Endpoint
                                                             : BottleneckConvention::LengthDifference;
                emit(bottleneck_report(C, D, conv), o.output);
            }
        } else if (tcheck->parsed()) {
            command = "tate check";
            emit(tate_report(load_complex_file(o.complex_file), o.p, o.window), o.output);
        } else if (pipeline->parsed()) {
            command = "pipeline";
            emit(pipeline_report(resolve(src), config_from(o)), o.output);
        }
    } catch (const Error& e) {
        std::cout << error_report(command, e).dump(2) << "\n";
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    }
    return 0;
}
