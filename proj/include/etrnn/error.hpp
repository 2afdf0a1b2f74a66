#pragma once

#include <stdexcept>
#include <string>

namespace etrnn {

// Error classes map to stable CLI exit codes (see README).
enum class Errc {
    parse,        // syntax errors, with line/column
    symbol,       // unknown function symbol, unknown variable
    unsupported,  // construct outside the supported fragment
    domain,       // division by zero, interval division through zero, etc.
    eval,         // exact evaluation unavailable (irrational value needed)
    instance,     // malformed network/instance/weights
    io,           // file and format errors
    internal,     // invariant violation inside the library
};

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Error(Errc code, int line, int col, const std::string& message)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + message),
          code_(code), line_(line), col_(col) {}

    Errc code() const { return code_; }
    int line() const { return line_; }
    int col() const { return col_; }

private:
    Errc code_;
    int line_ = 0;
    int col_ = 0;
};

} // namespace etrnn
