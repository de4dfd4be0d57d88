#pragma once

#include <stdexcept>
#include <string>

namespace zksem {

// precondition or input violations; cli exit code 1
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// NaN, overflow guard, blow-up; cli exit code 2
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw ValidationError(what);
}

} // namespace zksem
