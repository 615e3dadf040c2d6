#include "shelfmem/pgm.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <vector>

#include "shelfmem/errors.hpp"

namespace shelfmem {

namespace {

void write_p5(const std::filesystem::path& path, int rows, int cols,
              const std::vector<std::uint8_t>& pixels) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << "P5\n" << cols << " " << rows << "\n255\n";
  f.write(reinterpret_cast<const char*>(pixels.data()),
          static_cast<std::streamsize>(pixels.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const Grid2<double>& grid,
               double lo, double hi) {
  const double span = hi > lo ? hi - lo : 1.0;
  std::vector<std::uint8_t> pixels;
  pixels.reserve(grid.data().size());
  for (const double v : grid.data()) {
    const double n = std::clamp((v - lo) / span, 0.0, 1.0);
    pixels.push_back(static_cast<std::uint8_t>(n * 255.0 + 0.5));
  }
  write_p5(path, grid.rows(), grid.cols(), pixels);
}

void write_pgm(const std::filesystem::path& path, const Grid2<int>& grid,
               int max_value) {
  const int mv = std::max(1, max_value);
  std::vector<std::uint8_t> pixels;
  pixels.reserve(grid.data().size());
  for (const int v : grid.data()) {
    const int n = std::clamp(v, 0, mv);
    pixels.push_back(static_cast<std::uint8_t>(n * 255 / mv));
  }
  write_p5(path, grid.rows(), grid.cols(), pixels);
}

}  // namespace shelfmem
