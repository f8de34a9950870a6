#pragma once
// Error type shared by all notewatch stages.

#include <stdexcept>
#include <string>

namespace notewatch {

// Every contract violation surfaces as an Error with a human-readable,
// single-line message carrying the offending file/line/id where known.
class Error : public std::runtime_error {
public:
    explicit Error(std::string message) : std::runtime_error(std::move(message)) {}
};

[[noreturn]] inline void fail(const std::string& message) {
    throw Error(message);
}

}  // namespace notewatch
