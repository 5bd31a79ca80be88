#pragma once

#include <stdexcept>
#include <string>

namespace lossdyn {

/// Base class for all library errors. `code()` is a stable identifier
/// suitable for scripting against CLI diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define LOSSDYN_DEFINE_ERROR(Name)                                      \
    class Name : public Error {                                         \
    public:                                                              \
        explicit Name(const std::string& what) : Error(#Name, what) {}   \
    }

LOSSDYN_DEFINE_ERROR(NonFinite);
LOSSDYN_DEFINE_ERROR(NonHermitianInput);
LOSSDYN_DEFINE_ERROR(NotPositiveDefinite);
LOSSDYN_DEFINE_ERROR(SingularBlock);
LOSSDYN_DEFINE_ERROR(SingularSchurComplement);
LOSSDYN_DEFINE_ERROR(NonHermitianOmega);
LOSSDYN_DEFINE_ERROR(BNotPSD);
LOSSDYN_DEFINE_ERROR(LossFractionViolated);
LOSSDYN_DEFINE_ERROR(RankDeficiencyAmbiguous);
LOSSDYN_DEFINE_ERROR(NotAnEigenpair);
LOSSDYN_DEFINE_ERROR(NotDiagonalizable);
LOSSDYN_DEFINE_ERROR(EquivalenceViolated);
LOSSDYN_DEFINE_ERROR(MatchingAmbiguous);
LOSSDYN_DEFINE_ERROR(ClassificationFailed);
LOSSDYN_DEFINE_ERROR(NoMergeInBracket);
LOSSDYN_DEFINE_ERROR(ResonantFrequency);
LOSSDYN_DEFINE_ERROR(InequalityViolated);
LOSSDYN_DEFINE_ERROR(PhiOffDiagonalZero);
LOSSDYN_DEFINE_ERROR(ConfigError);
LOSSDYN_DEFINE_ERROR(PreconditionViolated);

#undef LOSSDYN_DEFINE_ERROR

} // namespace lossdyn
