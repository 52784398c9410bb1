#pragma once

#include <stdexcept>
#include <string>

namespace thlab {

// Every domain failure derives from Error so callers (and the CLI) can
// separate them from programming errors and usage problems.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define THLAB_ERROR(Name)                                                  \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

THLAB_ERROR(DegenerateDenominator);
THLAB_ERROR(InvalidSigns);
THLAB_ERROR(ZeroSpeed);
THLAB_ERROR(ZeroCTilde);
THLAB_ERROR(NTAbsent);
THLAB_ERROR(UnsupportedClass);
THLAB_ERROR(NewtonDiverged);
THLAB_ERROR(NoExistence);
THLAB_ERROR(Degenerate);
THLAB_ERROR(NonRealField);
THLAB_ERROR(GridMismatch);
THLAB_ERROR(InvalidGrid);
THLAB_ERROR(DegenerateData);
THLAB_ERROR(InsufficientReturns);
THLAB_ERROR(ChartSingular);

#undef THLAB_ERROR

class BlowUp : public Error {
public:
    BlowUp(const std::string& what, double t)
        : Error("BlowUp: " + what + " at t=" + std::to_string(t)), time(t) {}
    double time;
};

// Carries the equilibrium the trajectory actually approached, if any.
class NoConnection : public Error {
public:
    NoConnection(const std::string& what, std::string omega_limit)
        : Error("NoConnection: " + what + " (omega-limit: " + omega_limit + ")"),
          omega_limit(std::move(omega_limit)) {}
    std::string omega_limit;
};

}  // namespace thlab
