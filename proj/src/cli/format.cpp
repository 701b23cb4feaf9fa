#include "motorflux/cli/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

namespace motorflux::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_state_csv(std::ostream& os, const State& state) {
  os << (state.grid.dim() == 2 ? "x,y" : "x");
  for (int i = 0; i < state.species; ++i) os << ",u" << i + 1;
  os << '\n';
  for (int c = 0; c < state.cells(); ++c) {
    const Point p = state.grid.center(c);
    os << format_double(p.x);
    if (state.grid.dim() == 2) os << ',' << format_double(p.y);
    for (int i = 0; i < state.species; ++i) os << ',' << format_double(state.field(i)[c]);
    os << '\n';
  }
}

}  // namespace motorflux::cli
