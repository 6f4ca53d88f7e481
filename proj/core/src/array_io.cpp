#include "ghost/array_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "ghost/errors.hpp"

namespace ghost {

static_assert(std::endian::native == std::endian::little, "payload is written little-endian");

namespace {

constexpr const char* kMagic = "GHOSTARRAY 1";

nlohmann::json to_json(const ArrayMeta& m) {
  nlohmann::json j;
  j["shape"] = m.shape;
  j["dtype"] = m.dtype;
  j["axes"] = nlohmann::json::array();
  for (const auto& a : m.axes)
    j["axes"].push_back({{"name", a.name}, {"unit", a.unit}, {"origin", a.origin}, {"step", a.step}});
  j["tags"] = m.tags;
  j["shots"] = m.shots;
  j["seed"] = m.seed;
  j["config_hash"] = m.config_hash;
  return j;
}

ArrayMeta from_json(const nlohmann::json& j) {
  ArrayMeta m;
  m.shape = j.at("shape").get<std::vector<std::size_t>>();
  m.dtype = j.at("dtype").get<std::string>();
  for (const auto& a : j.at("axes"))
    m.axes.push_back({a.at("name"), a.at("unit"), a.at("origin"), a.at("step")});
  m.tags = j.value("tags", std::map<std::string, std::string>{});
  m.shots = j.value("shots", std::size_t{0});
  m.seed = j.value("seed", std::uint64_t{0});
  m.config_hash = j.value("config_hash", std::string{});
  return m;
}

std::size_t product(const std::vector<std::size_t>& s) {
  std::size_t n = 1;
  for (auto v : s) n *= v;
  return n;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void write_raw(const std::string& path, const ArrayMeta& meta, const void* data,
               std::size_t bytes) {
  auto out = open_out(path, std::ios::binary);
  out << kMagic << '\n' << to_json(meta).dump() << '\n';
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Index permutation from FFT order to increasing coordinate.
std::vector<std::size_t> unroll(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t k = 0; k < n; ++k) idx[k] = fft_index(static_cast<long>(k) - static_cast<long>(n / 2), n);
  return idx;
}

template <class Map, class Vec>
Vec centered_impl(const Map& m) {
  Vec out(m.size());
  const auto ix = unroll(m.nx);
  const auto iy = unroll(m.ny);
  for (std::size_t a = 0; a < m.nx; ++a)
    for (std::size_t b = 0; b < m.ny; ++b) out[a * m.ny + b] = m(ix[a], iy[b]);
  return out;
}

}  // namespace

void write_array(const std::string& path, const ArrayMeta& meta, const rvec& values) {
  ArrayMeta m = meta;
  m.dtype = "f64";
  if (product(m.shape) != values.size()) throw std::invalid_argument("shape/payload mismatch");
  write_raw(path, m, values.data(), values.size() * sizeof(double));
}

void write_array(const std::string& path, const ArrayMeta& meta, const cvec& values) {
  ArrayMeta m = meta;
  m.dtype = "c128";
  if (product(m.shape) != values.size()) throw std::invalid_argument("shape/payload mismatch");
  write_raw(path, m, values.data(), values.size() * sizeof(cplx));
}

ArrayFile read_array(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string magic;
  std::string header;
  std::getline(in, magic);
  if (magic != kMagic) throw std::runtime_error(path + ": not a GHOSTARRAY file");
  std::getline(in, header);
  ArrayFile f;
  try {
    f.meta = from_json(nlohmann::json::parse(header));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": bad header: " + e.what());
  }
  const std::size_t n = product(f.meta.shape);
  if (f.meta.dtype == "f64") {
    f.real.resize(n);
    in.read(reinterpret_cast<char*>(f.real.data()), static_cast<std::streamsize>(n * sizeof(double)));
  } else if (f.meta.dtype == "c128") {
    f.complex.resize(n);
    in.read(reinterpret_cast<char*>(f.complex.data()), static_cast<std::streamsize>(n * sizeof(cplx)));
  } else {
    throw std::runtime_error(path + ": unknown dtype " + f.meta.dtype);
  }
  if (!in) throw std::runtime_error(path + ": truncated payload");
  return f;
}

ArrayMeta map_meta(const RealMap& m, const std::string& unit) {
  ArrayMeta meta;
  const double ox = -static_cast<double>(m.nx / 2) * m.pitch;
  if (m.ny > 1) {
    meta.shape = {m.nx, m.ny};
    meta.axes = {{"x", unit, ox, m.pitch},
                 {"y", unit, -static_cast<double>(m.ny / 2) * m.pitch, m.pitch}};
  } else {
    meta.shape = {m.nx};
    meta.axes = {{"x", unit, ox, m.pitch}};
  }
  meta.tags["plane"] = m.plane == Plane::Near ? "near" : "far";
  return meta;
}

rvec centered(const RealMap& m) { return centered_impl<RealMap, rvec>(m); }
cvec centered(const ComplexMap& m) { return centered_impl<ComplexMap, cvec>(m); }

RealMap map_from_file(const ArrayFile& f, Plane plane) {
  if (f.meta.dtype != "f64" || f.meta.shape.empty() || f.meta.shape.size() > 2 || f.meta.axes.empty())
    throw std::runtime_error("expected a real 1-D or 2-D map");
  const std::size_t nx = f.meta.shape[0];
  const std::size_t ny = f.meta.shape.size() == 2 ? f.meta.shape[1] : 1;
  RealMap m(nx, ny, f.meta.axes[0].step, plane);
  const auto ix = unroll(nx);
  const auto iy = unroll(ny);
  for (std::size_t a = 0; a < nx; ++a)
    for (std::size_t b = 0; b < ny; ++b) m(ix[a], iy[b]) = f.real[a * ny + b];
  return m;
}

void write_csv(const std::string& path, const std::vector<std::string>& names,
               const std::vector<rvec>& columns) {
  auto out = open_out(path);
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  out << '\n' << std::setprecision(17);
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c].at(r);
    out << '\n';
  }
}

void write_svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                    const rvec& x, const std::vector<PlotSeries>& series) {
  const double w = 720, h = 420, ml = 60, mr = 150, mt = 36, mb = 48;
  double x0 = x.empty() ? 0 : *std::min_element(x.begin(), x.end());
  double x1 = x.empty() ? 1 : *std::max_element(x.begin(), x.end());
  double y0 = 0, y1 = 0;
  for (const auto& s : series)
    for (double v : s.y)
      if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double v) { return ml + (v - x0) / (x1 - x0) * (w - ml - mr); };
  auto py = [&](double v) { return mt + (y1 - v) / (y1 - y0) * (h - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#555555"};

  auto out = open_out(path);
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << ml << "\" y=\"22\" font-size=\"14\" font-family=\"sans-serif\">" << title
      << "</text>\n"
      << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr << "\" height=\""
      << h - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (y0 < 0 && y1 > 0)
    out << "<line x1=\"" << ml << "\" x2=\"" << w - mr << "\" y1=\"" << py(0) << "\" y2=\"" << py(0)
        << "\" stroke=\"#bbb\"/>\n";
  for (double v : {x0, 0.5 * (x0 + x1), x1})
    out << "<text x=\"" << px(v) << "\" y=\"" << h - mb + 16 << "\" font-size=\"11\" text-anchor=\"middle\""
        << " font-family=\"sans-serif\">" << v << "</text>\n";
  for (double v : {y0 + pad, 0.5 * (y0 + y1), y1 - pad})
    out << "<text x=\"" << ml - 4 << "\" y=\"" << py(v) << "\" font-size=\"11\" text-anchor=\"end\""
        << " font-family=\"sans-serif\">" << v << "</text>\n";
  out << "<text x=\"" << 0.5 * (ml + w - mr) << "\" y=\"" << h - 10
      << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">" << xlabel << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % 6];
    if (s.markers) {
      for (std::size_t i = 0; i < x.size() && i < s.y.size(); ++i)
        if (std::isfinite(s.y[i]))
          out << "<circle cx=\"" << px(x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"1.8\" fill=\"none\" stroke=\""
              << c << "\"/>\n";
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < x.size() && i < s.y.size(); ++i)
        if (std::isfinite(s.y[i])) out << px(x[i]) << ',' << py(s.y[i]) << ' ';
      out << "\"/>\n";
    }
    out << "<text x=\"" << w - mr + 8 << "\" y=\"" << mt + 16 * (k + 1) << "\" font-size=\"12\" fill=\"" << c
        << "\" font-family=\"sans-serif\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

void write_pgm(const std::string& path, const RealMap& m) {
  const rvec v = centered(m);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double span = *hi > *lo ? *hi - *lo : 1.0;
  auto out = open_out(path, std::ios::binary);
  // rows are y, columns are x
  out << "P5\n" << m.nx << ' ' << m.ny << "\n255\n";
  for (std::size_t b = 0; b < m.ny; ++b)
    for (std::size_t a = 0; a < m.nx; ++a) {
      const double u = (v[a * m.ny + b] - *lo) / span;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * u))));
    }
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

}  // namespace ghost
