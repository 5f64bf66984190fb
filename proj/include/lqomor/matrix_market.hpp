// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "lqomor/linalg.hpp"

namespace lqomor {

/// Formats a double with 17 significant digits ('.' decimal point), enough
/// for an exact text round trip.
std::string fmt17(double value);

/// Reads a Matrix Market file into a dense matrix. Supports the array and
/// coordinate formats with general, symmetric or skew-symmetric storage.
Matrix read_matrix_market(const std::string& path);
Matrix read_matrix_market(std::istream& in, const std::string& context);

/// Writes a dense matrix in Matrix Market array format (column-major entry
/// order, 17 significant digits).
void write_matrix_market(const std::string& path, const Matrix& A);
void write_matrix_market(std::ostream& out, const Matrix& A);

}  // namespace lqomor
