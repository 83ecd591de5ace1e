#include "nov/rat.hpp"

#include <cctype>

#include "nov/errors.hpp"

namespace nov {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::Unbounded: return "Unbounded";
        case ErrorCode::NotFullDimensional: return "NotFullDimensional";
        case ErrorCode::FieldMismatch: return "FieldMismatch";
        case ErrorCode::DenominatorDivisibleByP: return "DenominatorDivisibleByP";
        case ErrorCode::ReduciblePolynomial: return "ReduciblePolynomial";
        case ErrorCode::IndeterminateValuation: return "IndeterminateValuation";
        case ErrorCode::NotInvertible: return "NotInvertible";
        case ErrorCode::FieldBudgetExceeded: return "FieldBudgetExceeded";
        case ErrorCode::JacobianDegenerateAtLeadingOrder: return "JacobianDegenerateAtLeadingOrder";
        case ErrorCode::PrecisionInsufficient: return "PrecisionInsufficient";
        case ErrorCode::NotInterior: return "NotInterior";
        case ErrorCode::BoundaryCase: return "BoundaryCase";
        case ErrorCode::SearchExhausted: return "SearchExhausted";
        case ErrorCode::NotClosed: return "NotClosed";
        case ErrorCode::RepeatedEigenvalue: return "RepeatedEigenvalue";
        case ErrorCode::ZeroEigenvalue: return "ZeroEigenvalue";
        case ErrorCode::DiscriminantZeroToPrecision: return "DiscriminantZeroToPrecision";
        case ErrorCode::PrimeTooSmall: return "PrimeTooSmall";
        case ErrorCode::IterationDiverged: return "IterationDiverged";
        case ErrorCode::DegenerateForm: return "DegenerateForm";
        case ErrorCode::WindowTooSmall: return "WindowTooSmall";
        case ErrorCode::InvalidComplex: return "InvalidComplex";
        case ErrorCode::NotGeneratorFiltered: return "NotGeneratorFiltered";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

Rat parse_rat(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) fail(ErrorCode::ParseError, "empty rational");
    auto valid_int = [](const std::string& t) {
        size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i >= t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    auto slash = s.find('/');
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!num.empty() && num[0] == '+') num = num.substr(1);
    if (num.empty() || !valid_int(num) || !valid_int(den)) fail(ErrorCode::ParseError, "bad rational '" + text + "'");
    Int n(num), d(den);
    if (d == 0) fail(ErrorCode::ParseError, "zero denominator in '" + text + "'");
    Rat r(n, d);
    r.canonicalize();
    return r;
}

std::string to_string(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string to_string(const Int& z) { return z.get_str(); }

Int rat_floor(const Rat& r) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

Int rat_ceil(const Rat& r) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

bool operator<(const ExtRat& a, const ExtRat& b) {
    if (a.is_infinite()) return false;
    if (b.is_infinite()) return true;
    return a.get() < b.get();
}

bool operator==(const ExtRat& a, const ExtRat& b) {
    if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
    return a.get() == b.get();
}

std::string to_string(const ExtRat& r) { return r.is_infinite() ? std::string("+inf") : to_string(r.get()); }

}  // namespace nov
