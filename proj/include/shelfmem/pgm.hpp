#pragma once

#include <filesystem>

#include "shelfmem/grid.hpp"

namespace shelfmem {

/// 8-bit binary PGM with values linearly mapped from [lo, hi].
void write_pgm(const std::filesystem::path& path, const Grid2<double>& grid,
               double lo, double hi);

/// Integer grid mapped onto [0, max_value].
void write_pgm(const std::filesystem::path& path, const Grid2<int>& grid,
               int max_value);

}  // namespace shelfmem
