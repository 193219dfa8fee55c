#ifndef DDENORM_ERRORS_HPP
#define DDENORM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ddenorm {

// Base class for all toolkit errors.  Every error carries a short machine
// readable kind string (stable across versions, used by the CLI error JSON)
// in addition to the human readable message.
class Error : public std::runtime_error {
  public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

  private:
    std::string kind_;
};

#define DDENORM_DEFINE_ERROR(NAME)                                      \
    class NAME : public Error {                                         \
      public:                                                           \
        explicit NAME(const std::string& msg) : Error(#NAME, msg) {}    \
    }

DDENORM_DEFINE_ERROR(InvalidInput);
DDENORM_DEFINE_ERROR(UnknownModel);
DDENORM_DEFINE_ERROR(NotAnEquilibrium);
DDENORM_DEFINE_ERROR(NoConvergence);
DDENORM_DEFINE_ERROR(DefectiveEigenvalue);
DDENORM_DEFINE_ERROR(ImaginaryAxisLost);
DDENORM_DEFINE_ERROR(InconsistentSystem);
DDENORM_DEFINE_ERROR(SingularBorder);
DDENORM_DEFINE_ERROR(NearSingularResolvent);
DDENORM_DEFINE_ERROR(AmbiguousPattern);
DDENORM_DEFINE_ERROR(ResonanceDetected);
DDENORM_DEFINE_ERROR(SingularParameterMatrix);
DDENORM_DEFINE_ERROR(Degenerate);
DDENORM_DEFINE_ERROR(DegenerateL2);
DDENORM_DEFINE_ERROR(TorusAbsent);
DDENORM_DEFINE_ERROR(StallDetected);
DDENORM_DEFINE_ERROR(BoxExit);
DDENORM_DEFINE_ERROR(BisectionFailure);
DDENORM_DEFINE_ERROR(NonFiniteState);
DDENORM_DEFINE_ERROR(NoBifurcation);

#undef DDENORM_DEFINE_ERROR

} // namespace ddenorm

#endif
