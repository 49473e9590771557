#pragma once

#include <stdexcept>
#include <string>

namespace semitoric {

// Base class for all toolkit errors. `code()` is a stable machine-readable
// name that the CLI prints on stderr before exiting with status 3.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define SEMITORIC_ERROR(Name)                                   \
    struct Name : Error {                                       \
        explicit Name(const std::string& what)                  \
            : Error(#Name, std::string(#Name) + ": " + what) {} \
    }

SEMITORIC_ERROR(InvalidPoint);
SEMITORIC_ERROR(StepFailure);
SEMITORIC_ERROR(DegeneratePoint);
SEMITORIC_ERROR(EmptyFiber);
SEMITORIC_ERROR(SingularValue);
SEMITORIC_ERROR(NonRationalEdge);
SEMITORIC_ERROR(ConvexityLoss);
SEMITORIC_ERROR(CutoffTooSmall);
SEMITORIC_ERROR(EigensolverFailure);
SEMITORIC_ERROR(MismatchedHbar);
SEMITORIC_ERROR(EmptySpectrum);
SEMITORIC_ERROR(InsufficientScales);
SEMITORIC_ERROR(DevelopmentObstruction);
SEMITORIC_ERROR(NonUnipotent);
SEMITORIC_ERROR(HullDegenerate);
SEMITORIC_ERROR(FitUnstable);
SEMITORIC_ERROR(NotConverging);
SEMITORIC_ERROR(SchemaError);
SEMITORIC_ERROR(OverflowError);
SEMITORIC_ERROR(ConfigError);

#undef SEMITORIC_ERROR

} // namespace semitoric
