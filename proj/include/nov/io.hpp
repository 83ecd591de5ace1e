#pragma once

// Text and JSON ingestion for series, filtered complexes and algebras, and
// the JSON encodings shared by every report.

#include <string>
#include <vector>

#include "json.hpp"
#include "nov/errors.hpp"
#include "nov/filtered.hpp"
#include "nov/semisimple.hpp"

namespace nov {

using Json = nlohmann::ordered_json;

// "Q", "Q(i)", or a prime field written "F3", "F_3" or "GF(3)".
Field parse_field(const std::string& text);

// Sums of terms such as "2*T^(1/2) - T + (1+i)*T^-1 + O(T^4)". The output of
// Series::to_string parses back to the same series.
Series parse_series(const Field& f, const std::string& text);
// Accepts a string or the record form produced by series_json.
Series series_from_json(const Field& f, const Json& node);

Json series_json(const Series& s);
Json rats_json(const std::vector<Rat>& v);
Json ext_rat_json(const ExtRat& r);

std::string read_text_file(const std::string& path);  // ParseError when unreadable

// {"field": "F3", "mode": "strict" | "verbose",
//  "generators": [{"label": "x", "degree": 1, "action": "1/2"}],
//  "differential": [{"from": "x", "to": "y", "series": "T^(1/2)"}]}
// The result is validated (InvalidComplex).
FilteredComplex parse_complex(const std::string& text);
FilteredComplex load_complex_file(const std::string& path);
Json complex_json(const FilteredComplex& C);

// A chain written as "x" or "x=2*T,y=-1" over the generator labels, or a
// JSON object mapping labels to series.
Vec parse_chain(const std::vector<std::string>& labels, const Field& f, const std::string& text);
Vec chain_from_json(const std::vector<std::string>& labels, const Field& f, const Json& node);
Json chain_json(const std::vector<std::string>& labels, const Vec& v);

struct AlgebraFile {
    Algebra algebra;
    Vec element;  // empty unless the file names one
};
// {"field": "Q", "basis": ["1", "x"], "unit": "1",
//  "products": [{"left": "x", "right": "x", "result": "1=T"}], "element": "x"}
// A product given in one order also fills the other. When the unit is a basis
// vector its products default to the identity; other omitted products are zero.
AlgebraFile parse_algebra(const std::string& text);
AlgebraFile load_algebra_file(const std::string& path);

}  // namespace nov
