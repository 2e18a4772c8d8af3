#pragma once

#include <stdexcept>
#include <string>

namespace esrline {

// Base for all toolkit errors. `code()` is a stable machine-readable tag
// surfaced by the CLI error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define ESRLINE_DEFINE_ERROR(NAME)                                    \
    class NAME : public Error {                                       \
    public:                                                           \
        explicit NAME(const std::string& what) : Error(#NAME, what) {} \
    }

// scene
ESRLINE_DEFINE_ERROR(OverlappingConductors);
ESRLINE_DEFINE_ERROR(DanglingNet);
ESRLINE_DEFINE_ERROR(ProbeInsideConductor);
ESRLINE_DEFINE_ERROR(LayerGap);
ESRLINE_DEFINE_ERROR(ConfigDoesNotFitLayer);
ESRLINE_DEFINE_ERROR(EmptyRegion);
ESRLINE_DEFINE_ERROR(NotAConductor);

// magnetoqs
ESRLINE_DEFINE_ERROR(NoPortNets);
ESRLINE_DEFINE_ERROR(OverlappingDistinctFilaments);
ESRLINE_DEFINE_ERROR(ZeroConductivity);
ESRLINE_DEFINE_ERROR(SingularSystem);
ESRLINE_DEFINE_ERROR(ConvergenceFailure);
ESRLINE_DEFINE_ERROR(PointInsideConductor);

// electroqs
ESRLINE_DEFINE_ERROR(CoincidentDistinctPanels);

// netline
ESRLINE_DEFINE_ERROR(ActiveLoad);
ESRLINE_DEFINE_ERROR(SingularAccess);

// fom
ESRLINE_DEFINE_ERROR(EmptyProbes);
ESRLINE_DEFINE_ERROR(MismatchedProbeSets);

// cli / io
ESRLINE_DEFINE_ERROR(ParseError);
ESRLINE_DEFINE_ERROR(ValidationError);
ESRLINE_DEFINE_ERROR(UnknownUnit);
ESRLINE_DEFINE_ERROR(IoError);

#undef ESRLINE_DEFINE_ERROR

} // namespace esrline
