#pragma once

// Grid-function files.
//
// CSV layout:
//   # box_center, box_half_width, n, points_per_axis, extension
//   # <c0[ c1]>, <w0[ w1]>, <n>, <N>, <extension>
//   <sample 0>
//   ...                       (row-major, one sample per line)
//
// Binary layout: 16-byte magic "MLPLABGF" + 7 zero bytes + 0x01, then a
// little-endian f64 block
//   [len, n, N, center[n], half_width[n], ext_kind, tail_tag, k, params[k]]
// where len counts the f64 values after itself, then N^n little-endian f64
// samples. Both formats round-trip bit-exactly.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "mlplab/grid.hpp"

namespace mlp {

inline constexpr std::array<char, 16> kGridMagic = {'M', 'L', 'P', 'L', 'A', 'B', 'G', 'F',
                                                    0,   0,   0,   0,   0,   0,   0,   1};

void write_grid_csv(std::ostream& out, const GridFunction& gf);
GridFunction read_grid_csv(std::istream& in);

void write_grid_binary(std::ostream& out, const GridFunction& gf);
GridFunction read_grid_binary(std::istream& in);

void save_grid(const std::filesystem::path& path, const GridFunction& gf);
/// Dispatches on content: binary if the file starts with the magic, else CSV.
GridFunction load_grid(const std::filesystem::path& path);

using Metadata = std::map<std::string, std::string>;

/// key=value lines, sorted by key.
void write_metadata(const std::filesystem::path& path, const Metadata& meta);
Metadata read_metadata(const std::filesystem::path& path);

}  // namespace mlp
