#pragma once

// Matrix Market coordinate format, complex general field.
// Data lines carry "row col re im" with 1-based indices.

#include <iosfwd>
#include <string>

#include "helmmg/linalg.hpp"

namespace helmmg {

void write_matrix_market(std::ostream& out, const CsrMatrix& m);
void write_matrix_market(const std::string& path, const CsrMatrix& m);

/// Accepts "complex general" and "real general" coordinate files.
CsrMatrix read_matrix_market(std::istream& in);
CsrMatrix read_matrix_market(const std::string& path);

}  // namespace helmmg
