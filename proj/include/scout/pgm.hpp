#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scout/inquiry.hpp"
#include "scout/logio.hpp"

namespace scout {

// The candidate lattice clipped to the field is always a full rectangle of
// cells (x-membership depends only on the column, y-membership only on the
// row), so an entropy map rasterizes directly: one pixel per lattice cell,
// lighter shades for higher entropy, top row = largest y.
struct EntropyImage {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> pixels;  // row-major, top row first
};

inline EntropyImage rasterize_entropy(const EntropyMap& map) {
  if (map.entries.empty()) throw std::invalid_argument("rasterize_entropy: empty map");
  int min_col = map.entries.front().point.col, max_col = min_col;
  int min_row = map.entries.front().point.row, max_row = min_row;
  for (const EntropyEntry& e : map.entries) {
    min_col = std::min(min_col, e.point.col);
    max_col = std::max(max_col, e.point.col);
    min_row = std::min(min_row, e.point.row);
    max_row = std::max(max_row, e.point.row);
  }
  EntropyImage img;
  img.width = max_col - min_col + 1;
  img.height = max_row - min_row + 1;
  img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, 0);

  const double h_max = std::log(static_cast<double>(std::max(map.n_bins, 2)));
  for (const EntropyEntry& e : map.entries) {
    const int px = e.point.col - min_col;
    const int py = max_row - e.point.row;  // flip: raster rows go top-down
    const double scaled = std::clamp(e.entropy / h_max, 0.0, 1.0);
    img.pixels[static_cast<std::size_t>(py) * img.width + px] =
        static_cast<unsigned char>(std::lround(scaled * 255.0));
  }
  return img;
}

/// Binary PGM (P5, maxval 255).
inline void write_pgm(const std::string& path, const EntropyImage& img) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("pgm: cannot open " + path + " for writing");
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw std::runtime_error("pgm: write to " + path + " failed");
}

inline void write_entropy_pgm(const std::string& path, const EntropyMap& map) {
  write_pgm(path, rasterize_entropy(map));
}

/// Text sidecar: the selected point, then every candidate with its entropy.
inline void write_entropy_sidecar(const std::string& path, const EntropyMap& map) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("sidecar: cannot open " + path + " for writing");
  out << "# columns: x y entropy (nats); n_bins " << map.n_bins << '\n';
  const GridPoint& best = map.best_point();
  out << "selected " << format_double(best.x) << ' ' << format_double(best.y) << ' '
      << format_double(map.best_entropy) << '\n';
  for (const EntropyEntry& e : map.entries)
    out << format_double(e.point.x) << ' ' << format_double(e.point.y) << ' '
        << format_double(e.entropy) << '\n';
  if (!out) throw std::runtime_error("sidecar: write to " + path + " failed");
}

}  // namespace scout
