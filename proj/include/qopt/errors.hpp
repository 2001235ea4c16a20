#pragma once

#include <stdexcept>
#include <string>

namespace qopt {

// Bad argument values, violated preconditions, malformed models.
struct ParameterError : std::invalid_argument {
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Instance/model documents that fail schema or invariant checks.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or syntactically malformed files.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Problem too large for the requested backend or guard.
struct SizeError : std::invalid_argument {
    explicit SizeError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace qopt
