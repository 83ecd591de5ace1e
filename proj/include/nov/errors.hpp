#pragma once

#include <stdexcept>
#include <string>

namespace nov {

enum class ErrorCode {
    ParseError,
    Unbounded,
    NotFullDimensional,
    FieldMismatch,
    DenominatorDivisibleByP,
    ReduciblePolynomial,
    IndeterminateValuation,
    NotInvertible,
    FieldBudgetExceeded,
    JacobianDegenerateAtLeadingOrder,
    PrecisionInsufficient,
    NotInterior,
    BoundaryCase,
    SearchExhausted,
    NotClosed,
    RepeatedEigenvalue,
    ZeroEigenvalue,
    DiscriminantZeroToPrecision,
    PrimeTooSmall,
    IterationDiverged,
    DegenerateForm,
    WindowTooSmall,
    InvalidComplex,
    NotGeneratorFiltered,
    InvalidArgument,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace nov
