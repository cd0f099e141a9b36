#pragma once

#include <stdexcept>
#include <string>

namespace pfc {

/// Bad user input: config files, tableau files, out-of-range parameters.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed data structure (dimension mismatch, shape violation).
struct structural_error : std::runtime_error {
    explicit structural_error(const std::string& what) : std::runtime_error(what) {}
};

/// Runtime numerical failure: non-finite fields, vanishing denominators.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pfc
