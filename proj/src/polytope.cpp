#include "nov/polytope.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nov/errors.hpp"

namespace nov {

// ---- simplex -----------------------------------------------------------------

namespace {

struct Tableau {
    std::vector<std::vector<Rat>> a;  // m rows, N columns
    std::vector<Rat> rhs;
    std::vector<std::size_t> basis;
    std::vector<bool> allowed;  // columns allowed to enter
};

void pivot(Tableau& t, std::size_t r, std::size_t c) {
    const Rat inv = 1 / t.a[r][c];
    for (auto& x : t.a[r]) x *= inv;
    t.rhs[r] *= inv;
    for (std::size_t i = 0; i < t.a.size(); ++i) {
        if (i == r || t.a[i][c] == 0) continue;
        const Rat f = t.a[i][c];
        for (std::size_t j = 0; j < t.a[i].size(); ++j) t.a[i][j] -= f * t.a[r][j];
        t.rhs[i] -= f * t.rhs[r];
    }
    t.basis[r] = c;
}

// Returns false when the objective is unbounded.
bool optimize(Tableau& t, const std::vector<Rat>& cost) {
    const std::size_t N = cost.size();
    for (;;) {
        std::size_t enter = N;
        for (std::size_t j = 0; j < N && enter == N; ++j) {
            if (!t.allowed[j]) continue;
            Rat r = cost[j];
            for (std::size_t i = 0; i < t.a.size(); ++i) r -= cost[t.basis[i]] * t.a[i][j];
            if (r > 0) enter = j;
        }
        if (enter == N) return true;
        std::size_t leave = t.a.size();
        Rat best;
        for (std::size_t i = 0; i < t.a.size(); ++i) {
            if (t.a[i][enter] <= 0) continue;
            Rat ratio = t.rhs[i] / t.a[i][enter];
            if (leave == t.a.size() || ratio < best || (ratio == best && t.basis[i] < t.basis[leave])) {
                best = ratio;
                leave = i;
            }
        }
        if (leave == t.a.size()) return false;
        pivot(t, leave, enter);
    }
}

}  // namespace

LpResult simplex_max(const std::vector<Rat>& c, const std::vector<std::vector<Rat>>& M, const std::vector<Rat>& b) {
    const std::size_t n = c.size(), m = M.size();
    std::size_t n_art = 0;
    for (const auto& bi : b)
        if (bi < 0) ++n_art;
    const std::size_t N = n + m + n_art;
    Tableau t;
    t.a.assign(m, std::vector<Rat>(N, Rat(0)));
    t.rhs.assign(m, Rat(0));
    t.basis.assign(m, 0);
    t.allowed.assign(N, true);
    std::size_t art = n + m;
    for (std::size_t i = 0; i < m; ++i) {
        const Rat sign = b[i] < 0 ? Rat(-1) : Rat(1);
        for (std::size_t j = 0; j < n; ++j) t.a[i][j] = sign * M[i][j];
        t.a[i][n + i] = sign;
        t.rhs[i] = sign * b[i];
        if (b[i] < 0) {
            t.a[i][art] = 1;
            t.basis[i] = art++;
        } else {
            t.basis[i] = n + i;
        }
    }
    LpResult res;
    if (n_art > 0) {
        std::vector<Rat> phase1(N, Rat(0));
        for (std::size_t j = n + m; j < N; ++j) phase1[j] = -1;
        optimize(t, phase1);
        Rat infeas = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (t.basis[i] >= n + m) infeas += t.rhs[i];
        if (infeas != 0) return res;
        for (std::size_t i = 0; i < t.a.size();) {
            if (t.basis[i] < n + m) {
                ++i;
                continue;
            }
            std::size_t col = n + m;
            for (std::size_t j = 0; j < n + m; ++j)
                if (t.a[i][j] != 0) {
                    col = j;
                    break;
                }
            if (col == n + m) {
                t.a.erase(t.a.begin() + static_cast<long>(i));
                t.rhs.erase(t.rhs.begin() + static_cast<long>(i));
                t.basis.erase(t.basis.begin() + static_cast<long>(i));
            } else {
                pivot(t, i, col);
                ++i;
            }
        }
        for (std::size_t j = n + m; j < N; ++j) t.allowed[j] = false;
    }
    std::vector<Rat> cost(N, Rat(0));
    for (std::size_t j = 0; j < n; ++j) cost[j] = c[j];
    if (!optimize(t, cost)) {
        res.status = LpStatus::Unbounded;
        return res;
    }
    res.status = LpStatus::Optimal;
    res.x.assign(n, Rat(0));
    for (std::size_t i = 0; i < t.a.size(); ++i)
        if (t.basis[i] < n) res.x[t.basis[i]] = t.rhs[i];
    res.value = 0;
    for (std::size_t j = 0; j < n; ++j) res.value += c[j] * res.x[j];
    return res;
}

// ---- validation ----------------------------------------------------------------

namespace {

// Constraints -<v_j, u> <= -lambda_j with u = x+ - x- split into nonnegative parts.
void split_constraints(const Polytope& P, std::vector<std::vector<Rat>>& M, std::vector<Rat>& b, bool with_slack_var) {
    const std::size_t n = static_cast<std::size_t>(P.n);
    for (const auto& f : P.facets) {
        std::vector<Rat> row(2 * n + (with_slack_var ? 1 : 0), Rat(0));
        for (std::size_t i = 0; i < n; ++i) {
            row[i] = -f.v[i];
            row[n + i] = f.v[i];
        }
        if (with_slack_var) row[2 * n] = 1;  // -<v,u> + t <= -lambda
        M.push_back(row);
        b.push_back(-f.lambda);
    }
}

void validate(const Polytope& P) {
    if (P.n < 1) fail(ErrorCode::ParseError, "dimension must be positive");
    if (P.facets.empty()) fail(ErrorCode::Unbounded, "no facets");
    for (const auto& f : P.facets) {
        if (static_cast<int>(f.v.size()) != P.n) fail(ErrorCode::ParseError, "normal vector length differs from dim");
        if (std::all_of(f.v.begin(), f.v.end(), [](long x) { return x == 0; }))
            fail(ErrorCode::ParseError, "zero normal vector");
    }
    const std::size_t n = static_cast<std::size_t>(P.n);
    // Full-dimensionality: maximise t subject to <v_j,u> >= lambda_j + t, t <= 1.
    {
        std::vector<std::vector<Rat>> M;
        std::vector<Rat> b;
        split_constraints(P, M, b, true);
        std::vector<Rat> cap(2 * n + 1, Rat(0));
        cap[2 * n] = 1;
        M.push_back(cap);
        b.push_back(Rat(1));
        std::vector<Rat> c(2 * n + 1, Rat(0));
        c[2 * n] = 1;
        LpResult r = simplex_max(c, M, b);
        if (r.status == LpStatus::Infeasible || r.value <= 0)
            fail(ErrorCode::NotFullDimensional, "the inequalities have no strictly interior point");
    }
    // Boundedness: every coordinate bounded above and below.
    std::vector<std::vector<Rat>> M;
    std::vector<Rat> b;
    split_constraints(P, M, b, false);
    for (std::size_t i = 0; i < n; ++i)
        for (int sign : {1, -1}) {
            std::vector<Rat> c(2 * n, Rat(0));
            c[i] = sign;
            c[n + i] = -sign;
            if (simplex_max(c, M, b).status == LpStatus::Unbounded)
                fail(ErrorCode::Unbounded, "coordinate u" + std::to_string(i + 1) + " is unbounded");
        }
}

Rat parse_lambda(const nlohmann::json& j) {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long>());
    fail(ErrorCode::ParseError, "lambda must be an integer or a string \"a/b\"");
}

}  // namespace

Polytope make_polytope(int n, std::vector<Facet> facets, std::string name) {
    Polytope P{n, std::move(facets), std::move(name)};
    validate(P);
    return P;
}

Polytope parse_polytope(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("polytope document: ") + e.what());
    }
    try {
        if (!doc.is_object() || !doc.contains("dim") || !doc.contains("facets"))
            fail(ErrorCode::ParseError, "polytope document needs \"dim\" and \"facets\"");
        int n = doc.at("dim").get<int>();
        std::vector<Facet> facets;
        for (const auto& f : doc.at("facets")) {
            Facet facet;
            facet.v = f.at("v").get<std::vector<long>>();
            facet.lambda = parse_lambda(f.at("lambda"));
            facets.push_back(std::move(facet));
        }
        std::string name = doc.contains("name") ? doc.at("name").get<std::string>() : "";
        return make_polytope(n, std::move(facets), std::move(name));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("polytope document: ") + e.what());
    }
}

Polytope load_polytope_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_polytope(ss.str());
}

std::string polytope_to_json(const Polytope& P) {
    nlohmann::ordered_json doc;
    doc["name"] = P.name;
    doc["dim"] = P.n;
    doc["facets"] = nlohmann::ordered_json::array();
    for (const auto& f : P.facets) doc["facets"].push_back({{"v", f.v}, {"lambda", to_string(f.lambda)}});
    return doc.dump(2);
}

std::vector<Rat> support_values(const Polytope& P, const std::vector<Rat>& u) {
    if (static_cast<int>(u.size()) != P.n) fail(ErrorCode::InvalidArgument, "point has the wrong dimension");
    std::vector<Rat> out;
    for (const auto& f : P.facets) {
        Rat s = -f.lambda;
        for (int i = 0; i < P.n; ++i) s += u[i] * f.v[i];
        out.push_back(s);
    }
    return out;
}

bool is_interior(const Polytope& P, const std::vector<Rat>& u) {
    for (const auto& l : support_values(P, u))
        if (l <= 0) return false;
    return true;
}

namespace {

// Solves the square system a x = b exactly; false if singular.
bool solve_exact(std::vector<std::vector<Rat>> a, std::vector<Rat> b, std::vector<Rat>& x) {
    const std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t r = c;
        while (r < n && a[r][c] == 0) ++r;
        if (r == n) return false;
        std::swap(a[r], a[c]);
        std::swap(b[r], b[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            const Rat f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
            b[i] -= f * b[c];
        }
    }
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

void for_each_subset(std::size_t N, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> idx(k);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
        if (depth == k) {
            fn(idx);
            return;
        }
        for (std::size_t i = start; i < N; ++i) {
            idx[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
}

Rat det_rat(std::vector<std::vector<Rat>> a) {
    const std::size_t n = a.size();
    Rat det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t r = c;
        while (r < n && a[r][c] == 0) ++r;
        if (r == n) return 0;
        if (r != c) {
            std::swap(a[r], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            const Rat f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return det;
}

std::size_t rank_rat(std::vector<std::vector<Rat>> a) {
    std::size_t rank = 0;
    const std::size_t cols = a.empty() ? 0 : a.front().size();
    for (std::size_t c = 0; c < cols && rank < a.size(); ++c) {
        std::size_t r = rank;
        while (r < a.size() && a[r][c] == 0) ++r;
        if (r == a.size()) continue;
        std::swap(a[r], a[rank]);
        for (std::size_t i = rank + 1; i < a.size(); ++i) {
            const Rat f = a[i][c] / a[rank][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[rank][j];
        }
        ++rank;
    }
    return rank;
}

}  // namespace

std::vector<Vertex> vertices(const Polytope& P) {
    const std::size_t n = static_cast<std::size_t>(P.n), N = P.facets.size();
    std::vector<Vertex> out;
    std::set<std::vector<Rat>> seen;
    for_each_subset(N, n, [&](const std::vector<std::size_t>& idx) {
        std::vector<std::vector<Rat>> a;
        std::vector<Rat> b;
        for (auto j : idx) {
            a.emplace_back(P.facets[j].v.begin(), P.facets[j].v.end());
            b.push_back(P.facets[j].lambda);
        }
        std::vector<Rat> u;
        if (!solve_exact(a, b, u)) return;
        auto l = support_values(P, u);
        if (std::any_of(l.begin(), l.end(), [](const Rat& x) { return x < 0; })) return;
        if (!seen.insert(u).second) return;
        Vertex v{u, {}};
        for (std::size_t j = 0; j < N; ++j)
            if (l[j] == 0) v.active.push_back(j);
        out.push_back(std::move(v));
    });
    return out;
}

std::size_t vertex_count(const Polytope& P) { return vertices(P).size(); }

DelzantReport delzant_check(const Polytope& P) {
    DelzantReport rep;
    for (const auto& v : vertices(P)) {
        bool ok = v.active.size() == static_cast<std::size_t>(P.n);
        if (ok) {
            std::vector<std::vector<Rat>> a;
            for (auto j : v.active) a.emplace_back(P.facets[j].v.begin(), P.facets[j].v.end());
            Rat d = det_rat(a);
            ok = d == 1 || d == -1;
        }
        if (!ok) {
            rep.delzant = false;
            rep.violating.push_back(v.point);
        }
    }
    return rep;
}

namespace {

using Point = std::vector<Rat>;
using Face = std::vector<std::size_t>;  // sorted indices into the point list

std::size_t affine_dim(const std::vector<Point>& pts, const Face& face) {
    if (face.empty()) return 0;
    std::vector<std::vector<Rat>> diffs;
    for (std::size_t k = 1; k < face.size(); ++k) {
        std::vector<Rat> d(pts[face[0]].size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = pts[face[k]][i] - pts[face[0]][i];
        diffs.push_back(d);
    }
    return rank_rat(diffs);
}

// Sum of |det| over a pulling triangulation of the face of dimension d.
Rat pulled_volume(const std::vector<Point>& pts, const std::vector<Face>& facets, const Face& face, std::size_t d,
                  std::vector<std::size_t>& apexes, std::size_t n) {
    if (d == 0) {
        std::vector<std::size_t> simplex = apexes;
        simplex.push_back(face.front());
        std::vector<std::vector<Rat>> m;
        for (std::size_t k = 1; k < simplex.size(); ++k) {
            std::vector<Rat> row(n);
            for (std::size_t i = 0; i < n; ++i) row[i] = pts[simplex[k]][i] - pts[simplex[0]][i];
            m.push_back(row);
        }
        Rat det = det_rat(m);
        return det < 0 ? Rat(-det) : det;
    }
    const std::size_t w = face.front();
    std::set<Face> sub;
    for (const auto& F : facets) {
        Face g;
        std::set_intersection(face.begin(), face.end(), F.begin(), F.end(), std::back_inserter(g));
        if (g.empty() || std::binary_search(g.begin(), g.end(), w)) continue;
        if (affine_dim(pts, g) + 1 == d) sub.insert(g);
    }
    Rat total = 0;
    apexes.push_back(w);
    for (const auto& g : sub) total += pulled_volume(pts, facets, g, d - 1, apexes, n);
    apexes.pop_back();
    return total;
}

}  // namespace

Int kouchnirenko_bound(const Polytope& P) {
    const std::size_t n = static_cast<std::size_t>(P.n);
    std::vector<Point> pts;
    std::set<Point> seen;
    for (const auto& f : P.facets) {
        Point p(f.v.begin(), f.v.end());
        if (seen.insert(p).second) pts.push_back(p);
    }
    Face all(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) all[k] = k;
    if (affine_dim(pts, all) < n) return 0;
    // Facets of the hull: hyperplanes through n affinely independent points
    // with every point on one side.
    std::set<Face> facets;
    for_each_subset(pts.size(), n, [&](const std::vector<std::size_t>& idx) {
        std::vector<std::vector<Rat>> rows;
        for (std::size_t k = 1; k < idx.size(); ++k) {
            std::vector<Rat> d(n);
            for (std::size_t i = 0; i < n; ++i) d[i] = pts[idx[k]][i] - pts[idx[0]][i];
            rows.push_back(d);
        }
        if (rank_rat(rows) != n - 1) return;
        // Normal vector by cofactors of the (n-1) x n difference matrix.
        std::vector<Rat> normal(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::vector<Rat>> minor;
            for (const auto& r : rows) {
                std::vector<Rat> m;
                for (std::size_t k = 0; k < n; ++k)
                    if (k != i) m.push_back(r[k]);
                minor.push_back(m);
            }
            normal[i] = (i % 2 == 0 ? 1 : -1) * (minor.empty() ? Rat(1) : det_rat(minor));
        }
        int pos = 0, neg = 0;
        Face on;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            Rat s = 0;
            for (std::size_t i = 0; i < n; ++i) s += normal[i] * (pts[k][i] - pts[idx[0]][i]);
            if (s > 0) ++pos;
            else if (s < 0) ++neg;
            else on.push_back(k);
        }
        if (pos == 0 || neg == 0) facets.insert(on);
    });
    std::vector<Face> facet_list(facets.begin(), facets.end());
    std::vector<std::size_t> apexes;
    Rat vol = pulled_volume(pts, facet_list, all, n, apexes, n);
    if (vol.get_den() != 1) fail(ErrorCode::InvalidArgument, "lattice volume is not integral");
    return vol.get_num();
}

Polytope translate(const Polytope& P, const std::vector<Rat>& t) {
    Polytope Q = P;
    for (auto& f : Q.facets)
        for (int i = 0; i < P.n; ++i) f.lambda += t[i] * f.v[i];
    return Q;
}

Polytope cp_polytope(int n) {
    std::vector<Facet> facets;
    for (int i = 0; i < n; ++i) {
        std::vector<long> v(n, 0);
        v[i] = 1;
        facets.push_back({v, Rat(0)});
    }
    facets.push_back({std::vector<long>(n, -1), Rat(-1)});
    return make_polytope(n, std::move(facets), "cp" + std::to_string(n));
}

Polytope hirzebruch_polytope(int n, const Rat& alpha) {
    std::vector<Facet> facets = {
        {{1, 0}, Rat(0)},
        {{0, 1}, Rat(0)},
        {{0, -1}, Rat(alpha - 1)},
        {{-1, -n}, Rat(-n)},
    };
    return make_polytope(2, std::move(facets), "f" + std::to_string(n));
}

std::vector<std::string> preset_names() { return {"cp1", "cp2", "f2", "f4"}; }

Polytope preset_polytope(const std::string& name) {
    if (name == "cp1") return cp_polytope(1);
    if (name == "cp2") return cp_polytope(2);
    if (name == "f2") return hirzebruch_polytope(2, make_rat(1, 2));
    if (name == "f4") return hirzebruch_polytope(4, make_rat(1, 2));
    fail(ErrorCode::InvalidArgument, "unknown preset " + name);
}

}  // namespace nov
