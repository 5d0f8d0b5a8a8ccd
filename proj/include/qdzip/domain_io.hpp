#pragma once

#include <string>

#include "qdzip/geometry.hpp"

namespace qdzip {

// Domain file format: {"curves":[{"coeffs":[[re,im],...],"degree_offset":M}],
// "grid":N}; coeffs run c_{-M}..c_{M}. Parse errors and schema violations
// throw IoError; geometric validation errors propagate from Domain.
Domain load_domain(const std::string& path);
Domain parse_domain(const std::string& json_text);
std::string domain_to_json(const Domain& dom);
void save_domain(const Domain& dom, const std::string& path);

// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace qdzip
