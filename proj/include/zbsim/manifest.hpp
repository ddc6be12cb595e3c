#pragma once

// Run manifest: a single ordered-JSON document recording the tool version,
// the canonical config (and its hash), resolved defaults, derived scalar
// quantities, modeling-convention notes, warnings, and per-stage wall-clock
// times. Everything except the "wall_clock_s" block is deterministic, so two
// runs of the same config must agree on the manifest modulo that block.

#include <stdexcept>
#include <string>

#include "json.hpp"

namespace zbsim::manifest {

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr const char* kToolName = "zbsim";
inline constexpr const char* kToolVersion = "1.0.0";

using Json = nlohmann::ordered_json;

// Canonical rendering: 2-space indent, '\n' line ends, trailing newline.
std::string dump(const Json& j);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// Parse both documents, drop "wall_clock_s" blocks at any depth, compare.
// On mismatch returns false and stores a short description in why.
bool equal_modulo_timing(const std::string& a, const std::string& b,
                         std::string* why);

} // namespace zbsim::manifest
