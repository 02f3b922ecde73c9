#include "export.hpp"

#include <array>
#include <ostream>

#include "experiment.hpp"

namespace bz::cli {

void write_vtk(const Solution& sol, int m, const std::string& title, std::ostream& os) {
  const LatticeSamples s = sample_lattice(sol, m);
  const int row = s.nx + 1;
  std::vector<int> id(s.values.size(), -1);
  int points = 0;
  for (int b = 0; b <= s.ny; ++b)
    for (int a = 0; a <= s.nx; ++a)
      if (s.is_active(a, b)) id[static_cast<size_t>(b) * row + a] = points++;

  // a lattice cell is active when its element is
  const Grid& g = *sol.grid;
  std::vector<std::array<int, 4>> cells;
  for (int b = 0; b < s.ny; ++b)
    for (int a = 0; a < s.nx; ++a) {
      if (g.element_at(a / s.m, b / s.m) < 0) continue;
      const size_t k = static_cast<size_t>(b) * row + a;
      cells.push_back({id[k], id[k + 1], id[k + 1 + row], id[k + row]});
    }

  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << points << " double\n";
  for (int b = 0; b <= s.ny; ++b)
    for (int a = 0; a <= s.nx; ++a)
      if (s.is_active(a, b)) {
        const Point p = s.point(a, b);
        os << format_number(p.x) << ' ' << format_number(p.y) << " 0\n";
      }
  os << "CELLS " << cells.size() << ' ' << 5 * cells.size() << '\n';
  for (const auto& c : cells) os << "4 " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
  os << "CELL_TYPES " << cells.size() << '\n';
  for (size_t i = 0; i < cells.size(); ++i) os << "9\n";
  os << "POINT_DATA " << points << "\nSCALARS u double 1\nLOOKUP_TABLE default\n";
  for (int b = 0; b <= s.ny; ++b)
    for (int a = 0; a <= s.nx; ++a)
      if (s.is_active(a, b)) os << format_number(s.at(a, b)) << '\n';
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& comments,
                     const std::vector<std::string>& columns)
    : os_(&os), width_(columns.size()) {
  for (const auto& c : comments) os << "# " << c << '\n';
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw InvalidArgument("csv row has the wrong number of cells");
  for (size_t i = 0; i < cells.size(); ++i) *os_ << (i ? "," : "") << cells[i];
  *os_ << '\n';
}

}  // namespace bz::cli
