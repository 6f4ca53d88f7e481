#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ghost/lattice.hpp"

namespace ghost {

// One axis of a stored array: coordinate of index i is origin + step * i,
// after the data has been reordered to increasing coordinate.
struct Axis {
  std::string name;
  std::string unit;
  double origin = 0.0;
  double step = 1.0;
};

struct ArrayMeta {
  std::vector<std::size_t> shape;
  std::string dtype = "f64";  // f64 | c128
  std::vector<Axis> axes;
  std::map<std::string, std::string> tags;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct ArrayFile {
  ArrayMeta meta;
  rvec real;    // dtype f64
  cvec complex; // dtype c128
};

// File layout: the line "GHOSTARRAY 1", one line of JSON metadata, then the
// raw little-endian payload in row-major order.
void write_array(const std::string& path, const ArrayMeta& meta, const rvec& values);
void write_array(const std::string& path, const ArrayMeta& meta, const cvec& values);
ArrayFile read_array(const std::string& path);

// Maps stored in coordinate order (FFT order unrolled to increasing x).
ArrayMeta map_meta(const RealMap& m, const std::string& unit);
rvec centered(const RealMap& m);
cvec centered(const ComplexMap& m);
// Inverse of centered() for a 1-D or 2-D map read back from disk.
RealMap map_from_file(const ArrayFile& f, Plane plane);

// Columns of equal length with a header row.
void write_csv(const std::string& path, const std::vector<std::string>& names,
               const std::vector<rvec>& columns);

struct PlotSeries {
  std::string label;
  rvec y;
  bool markers = false;
};

// Static SVG line plot of several series over a shared x axis.
void write_svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                    const rvec& x, const std::vector<PlotSeries>& series);

// 8-bit binary PGM of a 2-D map scaled to [min, max].
void write_pgm(const std::string& path, const RealMap& m);

// 64-bit FNV-1a of a string, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace ghost
