#pragma once

#include <filesystem>
#include <iosfwd>

#include "bubblezoom/bubbles.hpp"

namespace bz {

// Text format, one file per cache (all values as C99 hex floats so that a
// round trip is exact):
//
//   bubblezoom-stabtable 1
//   M <int>
//   tables <count>
//   table <eps> <a.x> <a.y> <c> <level> <physical_h> <depth> <max_residual>
//   diffusion <144 values, row-major>
//   advection <144 values>
//   mass <144 values>
//   integral <12 values>
//   field <k> <(M+1)^2 values, row-major>      (k = 4..11, eight lines)
//   ...
//
// Tables are stored for canonical velocities only.

void save_tables(const StabCache& cache, std::ostream& os);
/// Adds the tables of a stream to the cache; throws InvalidArgument on a
/// version or M mismatch or malformed input.
void load_tables(StabCache& cache, std::istream& is);

void save_tables(const StabCache& cache, const std::filesystem::path& path);
void load_tables(StabCache& cache, const std::filesystem::path& path);

}  // namespace bz
