#include "nov/io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace nov {

namespace {

std::string strip_spaces(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    return s;
}

std::string unwrap(std::string s) {
    while (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
        int depth = 0;
        bool outer = true;
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            if (s[i] == '(') ++depth;
            else if (s[i] == ')') --depth;
            if (depth == 0) {
                outer = false;
                break;
            }
        }
        if (!outer) break;
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

Rat parse_exponent(const std::string& text) {
    if (text.empty()) return Rat(1);
    if (text[0] != '^') fail(ErrorCode::ParseError, "expected ^ after T in '" + text + "'");
    return parse_rat(unwrap(text.substr(1)));
}

Scalar parse_coefficient(const Field& f, const std::string& text) {
    const std::string s = unwrap(text);
    if (s.empty() || s == "+") return Scalar::one(f);
    if (s == "-") return -Scalar::one(f);
    if (s.find('i') != std::string::npos) {
        if (f != gaussian_rationals()) fail(ErrorCode::ParseError, "coefficient '" + s + "' needs the field Q(i)");
        return parse_gaussian(s).to_scalar();
    }
    return Scalar::from_rat(f, parse_rat(s));
}

// Splits at top-level signs that start a new term.
std::vector<std::string> split_terms(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '(') ++depth;
        else if (c == ')') --depth;
        if (depth < 0) fail(ErrorCode::ParseError, "unbalanced parentheses in '" + s + "'");
        if (depth == 0 && (c == '+' || c == '-') && i > start) {
            const char prev = s[i - 1];
            if (prev == '^' || prev == '*' || prev == '/' || prev == '+' || prev == '-') continue;
            out.push_back(s.substr(start, i - start));
            start = i;
        }
    }
    if (depth != 0) fail(ErrorCode::ParseError, "unbalanced parentheses in '" + s + "'");
    out.push_back(s.substr(start));
    return out;
}

const Json& require(const Json& node, const char* key, const std::string& where) {
    if (!node.is_object() || !node.contains(key)) fail(ErrorCode::ParseError, where + ": missing field '" + key + "'");
    return node.at(key);
}

std::string as_text(const Json& node, const std::string& where) {
    if (node.is_string()) return node.get<std::string>();
    if (node.is_number_integer()) return std::to_string(node.get<long long>());
    fail(ErrorCode::ParseError, where + ": expected a string or an integer");
}

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
    }
}

std::size_t label_index(const std::vector<std::string>& labels, const std::string& name) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == name) return i;
    fail(ErrorCode::ParseError, "unknown label '" + name + "'");
}

}  // namespace

Field parse_field(const std::string& text) {
    const std::string s = strip_spaces(text);
    if (s == "Q" || s.empty()) return rationals();
    if (s == "Q(i)" || s == "Qi") return gaussian_rationals();
    std::string digits;
    if (s.rfind("GF(", 0) == 0 && s.back() == ')') digits = s.substr(3, s.size() - 4);
    else if (s.rfind("F_", 0) == 0) digits = s.substr(2);
    else if (s.size() > 1 && s[0] == 'F') digits = s.substr(1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        fail(ErrorCode::ParseError, "unknown field '" + text + "'");
    const long p = std::stol(digits);
    if (p < 2) fail(ErrorCode::ParseError, "field characteristic must be a prime");
    for (long q = 2; q * q <= p; ++q)
        if (p % q == 0) fail(ErrorCode::ParseError, std::to_string(p) + " is not prime");
    return prime_field(p);
}

Series parse_series(const Field& f, const std::string& text) {
    const std::string s = strip_spaces(text);
    if (s.empty()) fail(ErrorCode::ParseError, "empty series");
    std::vector<Series::Term> terms;
    std::optional<Rat> precision;
    for (std::string term : split_terms(s)) {
        std::string sign;
        if (term[0] == '+' || term[0] == '-') {
            sign = term.substr(0, 1);
            term = term.substr(1);
        }
        if (term.empty()) fail(ErrorCode::ParseError, "dangling sign in '" + s + "'");
        if (term.rfind("O(", 0) == 0 && term.back() == ')') {
            const std::string inner = term.substr(2, term.size() - 3);
            Rat P;
            if (inner == "1") P = 0;
            else if (!inner.empty() && inner[0] == 'T') P = parse_exponent(inner.substr(1));
            else fail(ErrorCode::ParseError, "bad precision term '" + term + "'");
            precision = precision ? std::min(*precision, P) : P;
            continue;
        }
        // The variable is the last top-level T.
        std::size_t tpos = std::string::npos;
        int depth = 0;
        for (std::size_t i = 0; i < term.size(); ++i) {
            if (term[i] == '(') ++depth;
            else if (term[i] == ')') --depth;
            else if (term[i] == 'T' && depth == 0) tpos = i;
        }
        Rat e = 0;
        std::string coeff = term;
        if (tpos != std::string::npos) {
            e = parse_exponent(term.substr(tpos + 1));
            coeff = term.substr(0, tpos);
            if (!coeff.empty() && coeff.back() == '*') coeff.pop_back();
        }
        Scalar c = parse_coefficient(f, coeff.empty() ? "1" : coeff);
        if (sign == "-") c = -c;
        terms.push_back({e, c});
    }
    // Like exponents are merged by summing.
    std::map<Rat, Scalar> merged;
    for (const auto& [e, c] : terms) {
        auto [it, fresh] = merged.try_emplace(e, c);
        if (!fresh) it->second += c;
    }
    std::vector<Series::Term> out;
    for (const auto& [e, c] : merged)
        if (!c.is_zero() && (!precision || e < *precision)) out.push_back({e, c});
    return Series::from_terms(f, std::move(out), precision);
}

Series series_from_json(const Field& f, const Json& node) {
    if (node.is_string() || node.is_number_integer()) return parse_series(f, as_text(node, "series"));
    if (!node.is_object()) fail(ErrorCode::ParseError, "series must be a string or a record");
    std::vector<Series::Term> terms;
    for (const auto& t : require(node, "terms", "series")) {
        const Rat e = parse_rat(as_text(require(t, "exp", "series term"), "exp"));
        terms.push_back({e, parse_coefficient(f, as_text(require(t, "coeff", "series term"), "coeff"))});
    }
    std::optional<Rat> precision;
    if (node.contains("precision") && !node.at("precision").is_null())
        precision = parse_rat(as_text(node.at("precision"), "precision"));
    Series s = Series::zero(f);
    for (const auto& [e, c] : terms) s += Series::monomial(c, e);
    if (precision) s = s.with_precision(*precision);
    return s;
}

Json series_json(const Series& s) {
    Json terms = Json::array();
    for (const auto& [e, c] : s.terms()) terms.push_back({{"exp", to_string(e)}, {"coeff", c.to_string()}});
    Json out;
    out["terms"] = terms;
    out["precision"] = s.precision() ? Json(to_string(*s.precision())) : Json(nullptr);
    return out;
}

Json rats_json(const std::vector<Rat>& v) {
    Json out = Json::array();
    for (const auto& r : v) out.push_back(to_string(r));
    return out;
}

Json ext_rat_json(const ExtRat& r) { return to_string(r); }

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Vec parse_chain(const std::vector<std::string>& labels, const Field& f, const std::string& text) {
    Vec v(labels.size(), Series::zero(f));
    std::stringstream ss(text);
    std::string item;
    bool any = false;
    while (std::getline(ss, item, ',')) {
        item = strip_spaces(item);
        if (item.empty()) continue;
        any = true;
        const auto eq = item.find('=');
        const std::string name = eq == std::string::npos ? item : item.substr(0, eq);
        const Series c = eq == std::string::npos ? Series::one(f) : parse_series(f, item.substr(eq + 1));
        v[label_index(labels, name)] += c;
    }
    if (!any) fail(ErrorCode::ParseError, "empty chain");
    return v;
}

Vec chain_from_json(const std::vector<std::string>& labels, const Field& f, const Json& node) {
    if (node.is_string()) return parse_chain(labels, f, node.get<std::string>());
    if (!node.is_object()) fail(ErrorCode::ParseError, "chain must be a string or an object");
    Vec v(labels.size(), Series::zero(f));
    for (const auto& [name, value] : node.items()) v[label_index(labels, name)] += series_from_json(f, value);
    return v;
}

Json chain_json(const std::vector<std::string>& labels, const Vec& v) {
    Json out = Json::object();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!v[i].is_exact_zero()) out[labels[i]] = series_json(v[i]);
    return out;
}

FilteredComplex parse_complex(const std::string& text) {
    const Json doc = parse_json(text);
    FilteredComplex C;
    C.field = parse_field(doc.contains("field") ? as_text(doc.at("field"), "field") : "Q");
    if (doc.contains("mode")) {
        const std::string mode = as_text(doc.at("mode"), "mode");
        if (mode == "strict") C.mode = FiltrationMode::Strict;
        else if (mode == "verbose") C.mode = FiltrationMode::Verbose;
        else fail(ErrorCode::ParseError, "mode must be strict or verbose");
    }
    std::vector<std::string> labels;
    for (const auto& g : require(doc, "generators", "complex")) {
        Generator gen;
        gen.label = as_text(require(g, "label", "generator"), "label");
        const Json& deg = require(g, "degree", "generator");
        if (!deg.is_number_integer()) fail(ErrorCode::ParseError, "generator degree must be an integer");
        gen.degree = static_cast<int>(((deg.get<long long>() % 2) + 2) % 2);
        gen.action = parse_rat(as_text(require(g, "action", "generator"), "action"));
        for (const auto& l : labels)
            if (l == gen.label) fail(ErrorCode::ParseError, "duplicate generator '" + gen.label + "'");
        labels.push_back(gen.label);
        C.gens.push_back(gen);
    }
    const std::size_t n = C.gens.size();
    C.d = mat::zeros(C.field, n, n);
    if (doc.contains("differential")) {
        for (const auto& e : doc.at("differential")) {
            const std::size_t from = label_index(labels, as_text(require(e, "from", "differential"), "from"));
            const std::size_t to = label_index(labels, as_text(require(e, "to", "differential"), "to"));
            C.d[to][from] += series_from_json(C.field, require(e, "series", "differential"));
        }
    }
    require_valid(C);
    return C;
}

FilteredComplex load_complex_file(const std::string& path) { return parse_complex(read_text_file(path)); }

Json complex_json(const FilteredComplex& C) {
    Json doc;
    doc["field"] = describe(C.field);
    doc["mode"] = C.mode == FiltrationMode::Strict ? "strict" : "verbose";
    doc["generators"] = Json::array();
    for (const auto& g : C.gens)
        doc["generators"].push_back({{"label", g.label}, {"degree", g.degree}, {"action", to_string(g.action)}});
    doc["differential"] = Json::array();
    for (std::size_t p = 0; p < C.size(); ++p)
        for (std::size_t q = 0; q < C.size(); ++q)
            if (!C.d[q][p].is_exact_zero())
                doc["differential"].push_back(
                    {{"from", C.gens[p].label}, {"to", C.gens[q].label}, {"series", C.d[q][p].to_string()}});
    return doc;
}

AlgebraFile parse_algebra(const std::string& text) {
    const Json doc = parse_json(text);
    AlgebraFile out;
    Algebra& A = out.algebra;
    A.field = parse_field(doc.contains("field") ? as_text(doc.at("field"), "field") : "Q");
    for (const auto& b : require(doc, "basis", "algebra")) A.labels.push_back(as_text(b, "basis label"));
    const std::size_t n = A.dim();
    if (n == 0) fail(ErrorCode::ParseError, "algebra basis is empty");
    A.unit = chain_from_json(A.labels, A.field, require(doc, "unit", "algebra"));
    A.product.assign(n, std::vector<Vec>(n, Vec(n, Series::zero(A.field))));
    std::vector<std::vector<bool>> given(n, std::vector<bool>(n, false));
    if (doc.contains("products")) {
        for (const auto& e : doc.at("products")) {
            const std::size_t i = label_index(A.labels, as_text(require(e, "left", "product"), "left"));
            const std::size_t j = label_index(A.labels, as_text(require(e, "right", "product"), "right"));
            if (given[i][j]) fail(ErrorCode::ParseError, "product " + A.labels[i] + "*" + A.labels[j] + " given twice");
            A.product[i][j] = chain_from_json(A.labels, A.field, require(e, "result", "product"));
            given[i][j] = true;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (given[i][j] && !given[j][i]) A.product[j][i] = A.product[i][j];
    // A unit that is a basis vector multiplies as the identity unless overridden.
    std::size_t support = 0, u = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (!A.unit[i].is_exact_zero()) {
            ++support;
            u = i;
        }
    if (support == 1 && A.unit[u] == Series::one(A.field)) {
        for (std::size_t j = 0; j < n; ++j) {
            Vec ej(n, Series::zero(A.field));
            ej[j] = Series::one(A.field);
            if (!given[u][j] && !given[j][u]) A.product[u][j] = A.product[j][u] = ej;
        }
    }
    if (doc.contains("element")) out.element = chain_from_json(A.labels, A.field, doc.at("element"));
    return out;
}

AlgebraFile load_algebra_file(const std::string& path) { return parse_algebra(read_text_file(path)); }

}  // namespace nov
