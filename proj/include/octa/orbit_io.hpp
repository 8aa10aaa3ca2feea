#pragma once

#include <string>

#include "octa/symmetry.hpp"
#include "octa/verify.hpp"

namespace octa {

/// Shortest decimal representation that round-trips the exact double
/// ("inf" / "-inf" / "nan" for non-finite values).
std::string format_double(double v);

/// CSV with header `t,x,y,z,vx,vy,vz,H`, one row per sample, t ascending in
/// [0, T). Velocity components diverging at a collision row are written as
/// inf; the H column carries the orbit energy there (its limit along the
/// orbit).
void write_orbit_csv(const std::string& path, const PeriodicOrbit& orbit);

/// Strict parser for the format above. Throws ParseError with the 1-based
/// line of the first offending row. The period is recovered from the
/// reflection closure of the grid: T = t_last + t_1.
PeriodicOrbit read_orbit_csv(const std::string& path);

}  // namespace octa
