#pragma once

#include <stdexcept>
#include <string>

namespace traffic {

/// Base error. error_class() is the stable machine-readable name printed by the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string cls, const std::string& msg)
        : std::runtime_error(msg), class_(std::move(cls)) {}
    const std::string& error_class() const noexcept { return class_; }

private:
    std::string class_;
};

#define TRAFFIC_ERROR(Name)                                                        \
    class Name : public Error {                                                    \
    public:                                                                        \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}               \
        Name(const std::string& cls, const std::string& msg) : Error(cls, msg) {}  \
    };

TRAFFIC_ERROR(DomainError)
TRAFFIC_ERROR(RootBracketError)
TRAFFIC_ERROR(NoSignChangeError)
TRAFFIC_ERROR(RootCountError)
TRAFFIC_ERROR(VacuumError)
TRAFFIC_ERROR(NegativeRadicandError)
TRAFFIC_ERROR(SingularTransformError)
TRAFFIC_ERROR(NoAdmissibleRootError)
TRAFFIC_ERROR(CflViolation)
TRAFFIC_ERROR(LengthMismatchError)
TRAFFIC_ERROR(EmptyVectorError)
TRAFFIC_ERROR(NonPositiveError)
TRAFFIC_ERROR(NegativeCountError)
TRAFFIC_ERROR(UnroutableError)
TRAFFIC_ERROR(FractionSumError)
TRAFFIC_ERROR(ParseError)
TRAFFIC_ERROR(ValidationError)
TRAFFIC_ERROR(IoError)

#undef TRAFFIC_ERROR

}  // namespace traffic
