#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "kdn/grid.hpp"

namespace kdn {

// Native lossless grid container ("KDN1"): magic bytes, u32 dimension,
// u64 side length, then side^dim IEEE-754 doubles, everything little-endian.
// Round trips are bit-exact, unlike the 8-bit PGM path.
void write_grid(const std::string& path, const ImageGrid& g);
ImageGrid read_grid(const std::string& path);

// Foreground masks ride in the same container with values 0.0 / 1.0.
struct MaskData {
    int dim = 0;
    int side = 0;
    std::vector<std::uint8_t> mask;
};
void write_mask(const std::string& path, std::span<const std::uint8_t> mask, int dim, int side);
MaskData read_mask(const std::string& path);

// Plain key=value metadata sidecar, one pair per line.
void write_meta(const std::string& path,
                const std::vector<std::pair<std::string, std::string>>& pairs);
std::map<std::string, std::string> read_meta(const std::string& path);

// 8-bit binary PGM (P5, maxval 255). Export quantizes 255*v with
// round-half-to-even and is therefore lossy; import maps p -> p/255.
// Supported shapes: dim 2 (n x n) and dim 1 (written as a 1-row image).
void write_pgm(const std::string& path, const ImageGrid& g);
ImageGrid read_pgm(const std::string& path);

// Minimal CSV emission (comma separator, RFC-4180-style quoting, LF rows).
std::string csv_field(const std::string& value);
void write_csv_row(std::ostream& os, std::span<const std::string> cells);

// Compact numeric formatting for CSV cells (shortest round-trip form).
std::string csv_num(double v);

} // namespace kdn
