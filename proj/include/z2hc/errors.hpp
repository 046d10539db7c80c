#pragma once

#include <stdexcept>
#include <string>

namespace z2hc {

// Malformed user input: bad graph files, inconsistent schedule parameters,
// out-of-range CLI values. Maps to exit code 2.
class invalid_argument : public std::invalid_argument {
public:
    explicit invalid_argument(const std::string& msg) : std::invalid_argument(msg) {}
};

// Input is syntactically malformed (unparseable file contents). Carries the
// 1-based line number when known. Maps to exit code 2.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& msg, long line = -1)
        : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

// The request is well formed but exceeds what this build can hold in memory
// or enumerate in reasonable time (qubit caps, DP subset caps). Exit code 3.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical routine failed to reach its tolerance (eigensolver
// non-convergence, norm drift beyond guard rails). Exit code 4.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace z2hc
