#ifndef PTDIST_ERROR_HPP
#define PTDIST_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ptdist {

/// Operand shapes or subsystem dimensions do not agree.
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// A value violates a domain invariant (not Hermitian, not normalized, ...).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed file payload.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ptdist

#endif  // PTDIST_ERROR_HPP
