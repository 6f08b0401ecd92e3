#ifndef MIXEDSYS_ERRORS_HPP
#define MIXEDSYS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mixedsys {

enum class ErrorClass { Input, Budget, Invariant };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string name, const std::string& what)
        : std::runtime_error(what), class_(cls), name_(std::move(name)) {}

    ErrorClass error_class() const noexcept { return class_; }
    const std::string& name() const noexcept { return name_; }

private:
    ErrorClass class_;
    std::string name_;
};

#define MIXEDSYS_DEFINE_ERROR(Type, Cls)                                           \
    class Type : public Error {                                                    \
    public:                                                                        \
        explicit Type(const std::string& what) : Error(ErrorClass::Cls, #Type, what) {} \
    }

MIXEDSYS_DEFINE_ERROR(ParseError, Input);
MIXEDSYS_DEFINE_ERROR(DependentGenerators, Input);
MIXEDSYS_DEFINE_ERROR(MalformedDefectSet, Input);
MIXEDSYS_DEFINE_ERROR(UnsupportedFamily, Input);
MIXEDSYS_DEFINE_ERROR(WrongSide, Input);
MIXEDSYS_DEFINE_ERROR(TooLarge, Input);
MIXEDSYS_DEFINE_ERROR(ZeroVector, Input);
MIXEDSYS_DEFINE_ERROR(DimensionMismatch, Input);
MIXEDSYS_DEFINE_ERROR(BudgetExceeded, Budget);
MIXEDSYS_DEFINE_ERROR(InvariantViolation, Invariant);

#undef MIXEDSYS_DEFINE_ERROR

} // namespace mixedsys

#endif
