#include "sigmaqc/textio.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <stdexcept>

namespace sqc {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return HUGE_VAL;
  if (t == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || t.empty()) {
    throw std::invalid_argument("not a number: '" + t + "'");
  }
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void write_table(std::ostream& os, const NodalField& f) {
  const Grid& g = f.grid();
  os << "x,y,value\n";
  for (int j = 0; j < g.node_rows(); ++j) {
    for (int i = 0; i < g.node_cols(); ++i) {
      const Vec2 p = g.node_position(i, j);
      os << format_number(p.x) << ',' << format_number(p.y) << ',' << format_number(f.value(i, j))
         << '\n';
    }
  }
}

namespace {
template <class F>
void write_cells(std::ostream& os, const Grid& g, std::string_view header, F&& row) {
  os << "cx,cy," << header << '\n';
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const Vec2 p = g.cell_center(c);
    os << format_number(p.x) << ',' << format_number(p.y);
    row(c);
    os << '\n';
  }
}
}  // namespace

void write_table(std::ostream& os, const CellScalar& f, std::string_view column) {
  write_cells(os, f.grid(), column, [&](std::size_t c) { os << ',' << format_number(f[c]); });
}

void write_table(std::ostream& os, const VectorField& f) {
  write_cells(os, f.grid(), "v1,v2", [&](std::size_t c) {
    os << ',' << format_number(f[c].x) << ',' << format_number(f[c].y);
  });
}

void write_table(std::ostream& os, const MatrixField& f) {
  write_cells(os, f.grid(), "v11,v12,v21,v22", [&](std::size_t c) {
    const Mat2& m = f[c];
    os << ',' << format_number(m.a11) << ',' << format_number(m.a12) << ','
       << format_number(m.a21) << ',' << format_number(m.a22);
  });
}

void write_table(std::ostream& os, const ComplexField& mu, const ComplexField& nu) {
  write_cells(os, mu.grid(), "mu_re,mu_im,nu_re,nu_im", [&](std::size_t c) {
    os << ',' << format_number(mu[c].real()) << ',' << format_number(mu[c].imag()) << ','
       << format_number(nu[c].real()) << ',' << format_number(nu[c].imag());
  });
}

MatrixField read_sigma_table(std::istream& is, const Grid& grid) {
  std::vector<Mat2> values(grid.cell_count());
  std::vector<bool> seen(grid.cell_count(), false);
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (t == "cx,cy,s11,s12,s21,s22") continue;
      throw std::invalid_argument("sigma table: expected header cx,cy,s11,s12,s21,s22");
    }
    const auto cols = split(t, ',');
    if (cols.size() != 6) {
      throw std::invalid_argument("sigma table line " + std::to_string(line_no) + ": expected 6 columns");
    }
    const Vec2 p{parse_number(cols[0]), parse_number(cols[1])};
    const Rect& d = grid.domain();
    const int i = static_cast<int>(std::floor((p.x - d.x0) / grid.hx()));
    const int j = static_cast<int>(std::floor((p.y - d.y0) / grid.hy()));
    if (i < 0 || j < 0 || i >= grid.nx() || j >= grid.ny()) {
      throw std::invalid_argument("sigma table line " + std::to_string(line_no) + ": point outside grid");
    }
    const std::size_t c = grid.cell(i, j);
    values[c] = {parse_number(cols[2]), parse_number(cols[3]), parse_number(cols[4]),
                 parse_number(cols[5])};
    seen[c] = true;
  }
  for (bool s : seen) {
    if (!s) throw std::invalid_argument("sigma table does not cover every cell");
  }
  return MatrixField(grid, std::move(values));
}

void KeyValueDocument::add(std::string key, std::string value) {
  lines_.push_back({false, std::move(key), std::move(value)});
}

void KeyValueDocument::section(std::string name) { lines_.push_back({true, std::move(name), {}}); }

void KeyValueDocument::write(std::ostream& os) const {
  for (const Line& l : lines_) {
    if (l.is_section) {
      os << '[' << l.key << "]\n";
    } else {
      os << l.key << " = " << l.value << '\n';
    }
  }
}

}  // namespace sqc
