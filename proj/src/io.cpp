#include "sdc/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace sdc::io {

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::Unreadable: return "unreadable";
    case ParseErrorKind::MissingHeader: return "missing_header";
    case ParseErrorKind::NonSquare: return "non_square";
    case ParseErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ParseErrorKind::NonNumeric: return "non_numeric";
    case ParseErrorKind::Asymmetric: return "asymmetric";
  }
  return "unknown";
}

namespace {

std::string describe(const std::string& source, std::size_t line, const std::string& detail) {
  if (line == 0) return source + ": " + detail;
  return source + ":" + std::to_string(line) + ": " + detail;
}

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

bool parse_double(std::string_view token, double& value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(value);
}

bool parse_count(std::string_view token, long& value) {
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, std::string source, std::size_t line, const std::string& detail)
    : std::runtime_error(describe(source, line, detail)), kind_(kind), source_(std::move(source)), line_(line) {}

Matrix<double> parse_matrix(std::istream& in, const std::string& source, const Tolerances<double>& tol,
                            bool require_symmetric) {
  Matrix<double> m;
  long rows = -1;
  long filled = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;

    if (rows < 0) {
      long r = 0, c = 0;
      if (tokens.size() != 2 || !parse_count(tokens[0], r) || !parse_count(tokens[1], c) || r < 1 || c < 1) {
        throw ParseError(ParseErrorKind::MissingHeader, source, line_no, "expected header line \"n n\"");
      }
      if (r != c) {
        throw ParseError(ParseErrorKind::NonSquare, source, line_no,
                         "matrix is " + std::to_string(r) + "x" + std::to_string(c) + ", expected square");
      }
      rows = r;
      m.resize(rows, rows);
      continue;
    }

    if (filled == rows) {
      throw ParseError(ParseErrorKind::DimensionMismatch, source, line_no,
                       "more than " + std::to_string(rows) + " data rows");
    }
    if (static_cast<long>(tokens.size()) != rows) {
      throw ParseError(ParseErrorKind::DimensionMismatch, source, line_no,
                       "row has " + std::to_string(tokens.size()) + " entries, expected " + std::to_string(rows));
    }
    for (long j = 0; j < rows; ++j) {
      double value = 0;
      if (!parse_double(tokens[static_cast<std::size_t>(j)], value)) {
        throw ParseError(ParseErrorKind::NonNumeric, source, line_no,
                         "not a finite number: '" + std::string(tokens[static_cast<std::size_t>(j)]) + "'");
      }
      m(filled, j) = value;
    }
    ++filled;
  }
  if (in.bad()) throw ParseError(ParseErrorKind::Unreadable, source, 0, "read error");
  if (rows < 0) throw ParseError(ParseErrorKind::MissingHeader, source, line_no + 1, "no header line");
  if (filled != rows) {
    throw ParseError(ParseErrorKind::DimensionMismatch, source, line_no + 1,
                     "found " + std::to_string(filled) + " data rows, expected " + std::to_string(rows));
  }
  if (require_symmetric && !check_symmetric(m, tol)) {
    throw ParseError(ParseErrorKind::Asymmetric, source, 0,
                     "matrix is not symmetric (max |M - M^T| = " + format_number(asymmetry(m)) + ")");
  }
  return m;
}

Matrix<double> parse_matrix_text(std::string_view text, const Tolerances<double>& tol, bool require_symmetric,
                                 const std::string& source) {
  std::istringstream in{std::string(text)};
  return parse_matrix(in, source, tol, require_symmetric);
}

Matrix<double> parse_matrix_file(const std::filesystem::path& path, const Tolerances<double>& tol,
                                 bool require_symmetric) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseErrorKind::Unreadable, path.string(), 0, "cannot open file");
  return parse_matrix(in, path.string(), tol, require_symmetric);
}

std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string format_matrix(const Matrix<double>& m, std::string_view comment) {
  std::ostringstream out;
  if (!comment.empty()) out << "# " << comment << '\n';
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_number(m(i, j));
    out << '\n';
  }
  return out.str();
}

void write_matrix_file(const std::filesystem::path& path, const Matrix<double>& m, std::string_view comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << format_matrix(m, comment);
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace sdc::io
