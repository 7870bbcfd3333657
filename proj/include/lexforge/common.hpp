#ifndef LEXFORGE_COMMON_HPP
#define LEXFORGE_COMMON_HPP

#include <stdexcept>
#include <string>

namespace lexforge {

inline constexpr const char* kVersion = "0.1.0";

// Malformed or inconsistent input data (files, vocabularies, shapes of
// user-supplied matrices). CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during an otherwise well-formed computation
// (divergence, undefined statistic). CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lexforge

#endif
