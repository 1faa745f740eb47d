#pragma once

/// \file sigmaqc/textio.hpp
/// \brief Locale-independent text tables and flat key = value documents.

#include <map>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sigmaqc/mesh.hpp"

namespace sqc {

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);

/// Parses a decimal number in the classic locale. Throws std::invalid_argument.
double parse_number(std::string_view text);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Nodal table `x,y,value`, row-major over distinct nodes.
void write_table(std::ostream& os, const NodalField& f);
/// Cell tables `cx,cy,<columns...>`, row-major over cells.
void write_table(std::ostream& os, const CellScalar& f, std::string_view column = "value");
void write_table(std::ostream& os, const VectorField& f);
void write_table(std::ostream& os, const MatrixField& f);
/// Complex pair table `cx,cy,mu_re,mu_im,nu_re,nu_im`.
void write_table(std::ostream& os, const ComplexField& mu, const ComplexField& nu);

/// Per-cell matrix table `cx,cy,s11,s12,s21,s22` on a given grid.
MatrixField read_sigma_table(std::istream& is, const Grid& grid);

/// Ordered key = value document with optional [section] headers.
class KeyValueDocument {
 public:
  void add(std::string key, std::string value);
  void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }
  void add(std::string key, double value) { add(std::move(key), format_number(value)); }
  void add(std::string key, bool value) { add(std::move(key), std::string(value ? "true" : "false")); }
  void add(std::string key, int value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, std::size_t value) { add(std::move(key), std::to_string(value)); }
  void section(std::string name);

  void write(std::ostream& os) const;

 private:
  struct Line {
    bool is_section;
    std::string key;
    std::string value;
  };
  std::vector<Line> lines_;
};

}  // namespace sqc
