#pragma once

// Moment polytopes {u : <u, v_j> >= lambda_j} with integer normals.

#include <cstddef>
#include <string>
#include <vector>

#include "nov/rat.hpp"

namespace nov {

struct Facet {
    std::vector<long> v;
    Rat lambda;
};

struct Polytope {
    int n = 0;
    std::vector<Facet> facets;
    std::string name;
    std::size_t facet_count() const { return facets.size(); }
};

// Validates boundedness and full-dimensionality; throws Unbounded,
// NotFullDimensional or ParseError.
Polytope make_polytope(int n, std::vector<Facet> facets, std::string name = "");
// JSON document {"dim": n, "facets": [{"v": [...], "lambda": "a/b"}], "name": ...}.
Polytope parse_polytope(const std::string& text);
Polytope load_polytope_file(const std::string& path);
std::string polytope_to_json(const Polytope& P);

std::vector<Rat> support_values(const Polytope& P, const std::vector<Rat>& u);
bool is_interior(const Polytope& P, const std::vector<Rat>& u);

struct Vertex {
    std::vector<Rat> point;
    std::vector<std::size_t> active;  // facets with l_j = 0 at the vertex
};
std::vector<Vertex> vertices(const Polytope& P);
std::size_t vertex_count(const Polytope& P);

struct DelzantReport {
    bool delzant = true;
    std::vector<std::vector<Rat>> violating;
};
DelzantReport delzant_check(const Polytope& P);

// n! times the volume of the convex hull of the facet normals.
Int kouchnirenko_bound(const Polytope& P);

// lambda_j -> lambda_j + <t, v_j>, i.e. the polytope moved by t.
Polytope translate(const Polytope& P, const std::vector<Rat>& t);

Polytope cp_polytope(int n);
// Four facets u1 >= 0, u2 >= 0, 1 - alpha - u2 >= 0, n - u1 - n u2 >= 0.
Polytope hirzebruch_polytope(int n, const Rat& alpha);
// Presets cp1, cp2, f2, f4 (alpha = 1/2); throws InvalidArgument otherwise.
Polytope preset_polytope(const std::string& name);
std::vector<std::string> preset_names();

// ---- exact linear programming ------------------------------------------------

enum class LpStatus { Optimal, Unbounded, Infeasible };
struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rat value;
    std::vector<Rat> x;
};
// maximize c.x subject to M x <= b, x >= 0; two-phase simplex with Bland's rule.
LpResult simplex_max(const std::vector<Rat>& c, const std::vector<std::vector<Rat>>& M, const std::vector<Rat>& b);

}  // namespace nov
