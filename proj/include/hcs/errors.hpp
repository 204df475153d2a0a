#pragma once

#include <stdexcept>
#include <string>

namespace hcs {

/// Invalid numeric parameter (sigma <= 0, iterations < 1, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input data that an operation cannot meaningfully process,
/// e.g. a constant image handed to Otsu.
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Missing files, malformed manifests, id mismatches.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the trainers when a loss becomes non-finite.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hcs
