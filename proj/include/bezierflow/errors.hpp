#pragma once

#include <stdexcept>
#include <string>

namespace bezierflow {

// One exception family per failure class the library promises to detect.

// Incompatible dimensions or layer-shape chains.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain (t outside [0,1], non-finite input).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// API misuse: empty batch, mismatched coupling/objective, missing teacher.
struct UsageError : std::logic_error {
    using std::logic_error::logic_error;
};

// Invalid spec or config file content.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File and serialization failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite state encountered while integrating or training.
struct DivergedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bezierflow
