#pragma once

#include <stdexcept>
#include <string>

namespace sadoe {

// Base class for every failure raised by the library. kind() names the
// error class so the CLI can report it on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SADOE_DEFINE_ERROR(Name)                                         \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& what) : Error(#Name, what) {}   \
    }

// Precondition violations: dimension mismatch, out-of-support inputs,
// out-of-range parameters.
SADOE_DEFINE_ERROR(InvalidArgument);
SADOE_DEFINE_ERROR(InsufficientData);
SADOE_DEFINE_ERROR(SingularDesign);
SADOE_DEFINE_ERROR(DegenerateModel);
SADOE_DEFINE_ERROR(SingularCriterion);
SADOE_DEFINE_ERROR(DegenerateCandidates);
SADOE_DEFINE_ERROR(DegenerateSamples);
SADOE_DEFINE_ERROR(UnknownModel);
SADOE_DEFINE_ERROR(ConfigError);

#undef SADOE_DEFINE_ERROR

}  // namespace sadoe
