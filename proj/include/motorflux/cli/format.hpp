#pragma once

#include <iosfwd>
#include <string>

#include "motorflux/model.hpp"

namespace motorflux::cli {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// Header "x,u1,...,un" (1-D) or "x,y,u1,...,un" (2-D), one row per cell.
void write_state_csv(std::ostream& os, const State& state);

}  // namespace motorflux::cli
