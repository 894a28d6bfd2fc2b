#pragma once

// ASCII and PPM pictures of supertiles.

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "subshift/core.hpp"

namespace subshift {

struct Raster {
  Int width = 0, height = 0;
  Vec origin;                          // lattice point of the top-left cell
  std::vector<std::optional<Letter>> cells;  // row-major, top row first
  std::size_t cell_count = 0;          // occupied cells
};

// Axis 1 runs to the right and axis 2 downwards, matching the manifest rows.
inline Raster rasterize(const Pattern& p) {
  Raster r;
  if (p.support.empty()) return r;
  std::size_t d = p.support[0].size();
  if (d > 2) throw InputError("rendering supports dimensions 1 and 2 only");
  Int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  bool first = true;
  for (const auto& v : p.support) {
    Int x = d >= 1 ? v[0] : 0, y = d == 2 ? v[1] : 0;
    if (first || x < x0) x0 = x;
    if (first || x > x1) x1 = x;
    if (first || y < y0) y0 = y;
    if (first || y > y1) y1 = y;
    first = false;
  }
  r.width = x1 - x0 + 1;
  r.height = y1 - y0 + 1;
  r.origin = d == 2 ? Vec{x0, y0} : Vec(d, x0);
  r.cells.assign(static_cast<std::size_t>(r.width * r.height), std::nullopt);
  for (std::size_t i = 0; i < p.support.size(); ++i) {
    Int x = d >= 1 ? p.support[i][0] : 0, y = d == 2 ? p.support[i][1] : 0;
    auto& c = r.cells[static_cast<std::size_t>((y - y0) * r.width + (x - x0))];
    if (!c) ++r.cell_count;
    c = p.cells[i];
  }
  return r;
}

inline std::string render_ascii(const Raster& r, const Substitution& sub) {
  std::string out;
  for (Int y = 0; y < r.height; ++y) {
    for (Int x = 0; x < r.width; ++x) {
      const auto& c = r.cells[static_cast<std::size_t>(y * r.width + x)];
      out += c ? sub.name(*c).substr(0, 1) : std::string(".");
    }
    out += "\n";
  }
  return out;
}

inline std::array<unsigned char, 3> palette(Letter a) {
  static const unsigned char table[][3] = {
      {230, 25, 75},  {60, 180, 75},  {255, 225, 25}, {0, 130, 200},  {245, 130, 48}, {145, 30, 180},
      {70, 240, 240}, {240, 50, 230}, {210, 245, 60}, {250, 190, 212}, {0, 128, 128}, {220, 190, 255},
      {170, 110, 40}, {255, 250, 200}, {128, 0, 0},  {170, 255, 195}, {128, 128, 0}, {255, 215, 180},
      {0, 0, 128},    {128, 128, 128}};
  const auto& c = table[a % (sizeof(table) / sizeof(table[0]))];
  return {c[0], c[1], c[2]};
}

// Binary PPM, `scale` pixels per cell; empty cells are white.
inline std::string render_ppm(const Raster& r, int scale = 4) {
  if (scale < 1) throw InputError("scale must be positive");
  std::string out = "P6\n" + std::to_string(r.width * scale) + " " + std::to_string(r.height * scale) + "\n255\n";
  for (Int y = 0; y < r.height * scale; ++y)
    for (Int x = 0; x < r.width * scale; ++x) {
      const auto& c = r.cells[static_cast<std::size_t>((y / scale) * r.width + x / scale)];
      std::array<unsigned char, 3> rgb = c ? palette(*c) : std::array<unsigned char, 3>{255, 255, 255};
      out.append(reinterpret_cast<const char*>(rgb.data()), 3);
    }
  return out;
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << data;
}

}  // namespace subshift
