#pragma once

#include <stdexcept>
#include <string>

namespace rlab {

// Bad input or violated precondition. The CLI maps this to exit status 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical procedure failed to converge or produced unusable output (exit status 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

}  // namespace rlab
