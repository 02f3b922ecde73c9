#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <bubblezoom/analysis.hpp>

namespace bz::cli {

/// Legacy ASCII VTK 3.0 unstructured grid of u_h sampled on the lattice
/// with m nodes per element axis: one VTK_QUAD per active lattice cell,
/// POINT_DATA scalar "u".
void write_vtk(const Solution& sol, int m, const std::string& title, std::ostream& os);

/// Comma separated table with a #-prefixed comment header. Cells are
/// written verbatim; use format_number for doubles.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& comments, const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream* os_;
  size_t width_;
};

}  // namespace bz::cli
