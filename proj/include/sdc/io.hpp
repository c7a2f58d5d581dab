#pragma once

// Plain-text matrix files:
//
//   # comment lines start with '#'
//   n n
//   a11 a12 ... a1n
//   ...
//   an1 an2 ... ann
//
// Blank lines are ignored. Values are written with 17 significant digits.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sdc/kernel.hpp"

namespace sdc::io {

enum class ParseErrorKind { Unreadable, MissingHeader, NonSquare, DimensionMismatch, NonNumeric, Asymmetric };

const char* to_string(ParseErrorKind kind);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::string source, std::size_t line, const std::string& detail);

  ParseErrorKind kind() const noexcept { return kind_; }
  const std::string& source() const noexcept { return source_; }
  /// 1-based line number, 0 when the whole file is at fault.
  std::size_t line() const noexcept { return line_; }

 private:
  ParseErrorKind kind_;
  std::string source_;
  std::size_t line_;
};

/// Reads one square matrix. Symmetry within `tol.sym` is enforced unless
/// `require_symmetric` is false (congruence matrices need not be symmetric).
Matrix<double> parse_matrix(std::istream& in, const std::string& source, const Tolerances<double>& tol,
                            bool require_symmetric = true);

Matrix<double> parse_matrix_text(std::string_view text, const Tolerances<double>& tol,
                                 bool require_symmetric = true, const std::string& source = "<text>");

Matrix<double> parse_matrix_file(const std::filesystem::path& path, const Tolerances<double>& tol,
                                 bool require_symmetric = true);

/// %.17g, the shortest fixed width that round-trips every double.
std::string format_number(double value);

std::string format_matrix(const Matrix<double>& m, std::string_view comment = {});

void write_matrix_file(const std::filesystem::path& path, const Matrix<double>& m, std::string_view comment = {});

}  // namespace sdc::io
