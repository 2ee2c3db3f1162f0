#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "greenberg/filtration.hpp"
#include "greenberg/formulas.hpp"

namespace greenberg {

/// Raised on malformed input files; the message carries the offending
/// field or parse location.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses and validates an instance file. Strict: unknown keys are rejected
/// (except the free-form "metadata" block, which is carried verbatim).
FieldInstance parse_instance(const std::string& path);
FieldInstance parse_instance_json(const nlohmann::json& doc);

/// Normalized re-emission (keys sorted, structures as exponent lists).
nlohmann::json emit_instance(const FieldInstance& inst);

/// Module files: {p, n, exponents, sigma} with sigma row-major.
GModule parse_module(const std::string& path);
GModule parse_module_json(const nlohmann::json& doc);

}  // namespace greenberg
