#pragma once

#include <iosfwd>
#include <string>

#include "matchstab/fixtures.hpp"

namespace matchstab {

// Model file format (JSON, UTF-8):
//   {
//     "customers": ["1", "2", ...],
//     "servers": ["1'", "2'", ...],
//     "edges": [["1", "2'"], ...],
//     "mu": {"1|2'": "4/25", ...},            (optional)
//     "arrival_edges": [["1", "1'"], ...],    (optional; defaults to supp(mu))
//     "priorities": {"A": [[...]], "B": [[...]]}  (optional)
//   }
// Rationals are "p/q" strings and round-trip bit-exactly.

Model read_model(std::istream& in);
Model read_model_file(const std::string& path);

/// Resolves "nn", "nnn", "nn-fdiag", "nn-fanti" to the built-in fixtures,
/// anything else as a file path.
Model load_model(const std::string& name_or_path);

void write_model(std::ostream& out, const Model& model);
std::string model_to_json(const Model& model);

}  // namespace matchstab
