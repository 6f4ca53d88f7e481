#include "ghost/optics.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ghost/errors.hpp"

namespace ghost {

namespace {

constexpr double kPi = std::numbers::pi;

struct Interval {
  double lo, hi;
};

void slit_intervals(const SlitParams& p, Interval out[2]) {
  out[0] = {p.shift - 0.5 * p.d - 0.5 * p.a, p.shift - 0.5 * p.d + 0.5 * p.a};
  out[1] = {p.shift + 0.5 * p.d - 0.5 * p.a, p.shift + 0.5 * p.d + 0.5 * p.a};
}

double overlap(double lo1, double hi1, double lo2, double hi2) {
  return std::max(0.0, std::min(hi1, hi2) - std::max(lo1, lo2));
}

double open_fraction(long k, const Interval& iv, MaskSampling s) {
  const double x = static_cast<double>(k);
  if (s == MaskSampling::Point) return (x >= iv.lo && x < iv.hi) ? 1.0 : 0.0;
  return overlap(x - 0.5, x + 0.5, iv.lo, iv.hi);
}

// sum_{k=k0}^{k1} e^{-i theta k}
cplx geometric(double theta, long k0, long k1) {
  if (k1 < k0) return cplx(0.0);
  const double m = static_cast<double>(k1 - k0 + 1);
  const cplx center = std::polar(1.0, -0.5 * theta * static_cast<double>(k0 + k1));
  const double s = std::sin(0.5 * theta);
  if (std::abs(s) < 1e-12) return m * std::polar(1.0, -theta * static_cast<double>(k0));
  return center * (std::sin(0.5 * m * theta) / s);
}

cplx interval_sum(double theta, const Interval& iv, MaskSampling s) {
  if (s == MaskSampling::Point) {
    const long k0 = static_cast<long>(std::ceil(iv.lo));
    const long k1 = static_cast<long>(std::ceil(iv.hi)) - 1;
    return geometric(theta, k0, k1);
  }
  const long ka = static_cast<long>(std::floor(iv.lo + 0.5));
  const long kb = static_cast<long>(std::floor(iv.hi + 0.5));
  if (ka == kb) return (iv.hi - iv.lo) * std::polar(1.0, -theta * static_cast<double>(ka));
  cplx sum = geometric(theta, ka + 1, kb - 1);
  sum += (static_cast<double>(ka) + 0.5 - iv.lo) * std::polar(1.0, -theta * static_cast<double>(ka));
  sum += (iv.hi - (static_cast<double>(kb) - 0.5)) *
         std::polar(1.0, -theta * static_cast<double>(kb));
  return sum;
}

void check_plane(const FieldLattice& f, Plane p, const char* what) {
  if (f.plane != p) throw ConfigError(std::string(what) + ": plane mismatch");
}

void require_position(const FieldLattice& f, const char* what) {
  if (f.domain != Domain::Position)
    throw ConfigError(std::string(what) + ": field must be in the position domain");
}

// Maps an image pixel (row, col) onto the centered lattice.
ObjectMask mask_from_gray(const std::vector<double>& gray, std::size_t w, std::size_t h,
                          double threshold, std::size_t nx, std::size_t ny, double pitch,
                          Plane plane) {
  if (w > nx || h > ny) {
    std::ostringstream os;
    os << "bitmap " << w << "x" << h << " exceeds the " << nx << "x" << ny << " grid";
    throw ConfigError(os.str());
  }
  ObjectMask m;
  m.kind = MaskKind::Bitmap;
  m.t = ComplexMap(nx, ny, pitch, plane);
  const long cx = static_cast<long>(w / 2);
  const long cy = static_cast<long>(h / 2);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double v = gray[r * w + c];
      if (threshold >= 0.0) v = v >= threshold ? 1.0 : 0.0;
      const std::size_t ix = fft_index(static_cast<long>(c) - cx, nx);
      const std::size_t iy = fft_index(static_cast<long>(r) - cy, ny);
      m.t(ix, iy) = v;
    }
  }
  return m;
}

std::vector<double> read_pgm(const std::string& path, std::size_t& w, std::size_t& h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open mask file " + path);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5") throw ConfigError("not a PGM file: " + path);
  auto next_int = [&]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return std::stol(tok);
    }
    throw ConfigError("truncated PGM header: " + path);
  };
  w = static_cast<std::size_t>(next_int());
  h = static_cast<std::size_t>(next_int());
  const long maxval = next_int();
  if (maxval <= 0 || maxval > 65535) throw ConfigError("bad PGM maxval: " + path);
  std::vector<double> gray(w * h);
  if (magic == "P2") {
    for (auto& g : gray) g = static_cast<double>(next_int()) / static_cast<double>(maxval);
  } else {
    in.get();
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(w * h * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw ConfigError("truncated PGM data: " + path);
    for (std::size_t i = 0; i < w * h; ++i) {
      const double v = bytes == 2 ? raw[2 * i] * 256.0 + raw[2 * i + 1] : raw[i];
      gray[i] = v / static_cast<double>(maxval);
    }
  }
  return gray;
}

std::vector<double> read_png(const std::string& path, std::size_t& w, std::size_t& h) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str()))
    throw ConfigError("cannot read PNG " + path + ": " + img.message);
  img.format = PNG_FORMAT_GRAY;
  std::vector<unsigned char> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&img);
    throw ConfigError("cannot decode PNG " + path + ": " + img.message);
  }
  w = img.width;
  h = img.height;
  std::vector<double> gray(w * h);
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = buf[i] / 255.0;
  return gray;
}

}  // namespace

ObjectMask make_double_slit(std::size_t nx, std::size_t ny, double pitch, Plane plane,
                            const SlitParams& p) {
  if (!(p.a > 0.0 && p.a < p.d)) throw ConfigError("double slit requires 0 < a < d");
  Interval iv[2];
  slit_intervals(p, iv);
  const double lo = -static_cast<double>(nx / 2);
  const double hi = static_cast<double>(nx) - static_cast<double>(nx / 2) - 1.0;
  if (iv[0].lo < lo - 0.5 || iv[1].hi > hi + 0.5)
    throw ConfigError("double slit extends off the grid");
  ObjectMask m;
  m.kind = p.phase ? MaskKind::PhaseSlit : MaskKind::AmplitudeSlit;
  m.slit = p;
  m.t = ComplexMap(nx, ny, pitch, plane);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const long k = fft_coord(ix, nx);
    const double open = open_fraction(k, iv[0], p.sampling) + open_fraction(k, iv[1], p.sampling);
    const double v = p.phase ? 2.0 * open - 1.0 : open;
    for (std::size_t iy = 0; iy < ny; ++iy) m.t(ix, iy) = v;
  }
  return m;
}

ObjectMask make_open_mask(std::size_t nx, std::size_t ny, double pitch, Plane plane) {
  ObjectMask m;
  m.kind = MaskKind::None;
  m.t = ComplexMap(nx, ny, pitch, plane);
  for (auto& v : m.t.values) v = 1.0;
  return m;
}

cplx slit_spectrum(double q, double a, double d, double shift) {
  const double x = 0.5 * q * a;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return a * std::sqrt(2.0 / kPi) * std::polar(1.0, -shift * q) * std::cos(0.5 * q * d) * sinc;
}

cplx slit_spectrum_lattice(double q, const SlitParams& p, double pitch, std::size_t nx) {
  Interval iv[2];
  slit_intervals(p, iv);
  const double theta = q * pitch;
  cplx open = interval_sum(theta, iv[0], p.sampling) + interval_sum(theta, iv[1], p.sampling);
  cplx sum = open;
  if (p.phase) {
    const long half = static_cast<long>(nx / 2);
    sum = 2.0 * open - geometric(theta, -half, static_cast<long>(nx) - half - 1);
  }
  return sum * (pitch / std::sqrt(2.0 * kPi));
}

ObjectMask load_bitmap_mask(const std::string& path, double threshold, std::size_t nx,
                            std::size_t ny, double pitch, Plane plane) {
  std::size_t w = 0;
  std::size_t h = 0;
  std::string ext = path.size() >= 4 ? path.substr(path.size() - 4) : "";
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  std::vector<double> gray = ext == ".png" ? read_png(path, w, h) : read_pgm(path, w, h);
  return mask_from_gray(gray, w, h, threshold, nx, ny, pitch, plane);
}

cplx mask_spectrum(const ComplexMap& t, double q) {
  cplx sum(0.0);
  for (std::size_t ix = 0; ix < t.nx; ++ix) {
    const double x = static_cast<double>(fft_coord(ix, t.nx)) * t.pitch;
    sum += t(ix, 0) * std::polar(1.0, -q * x);
  }
  return sum * (t.pitch / std::sqrt(2.0 * kPi));
}

void apply_ff(FieldLattice& f) {
  require_position(f, "apply_ff");
  const Shape& s = f.shape();
  fft_spatial(f.data(), s, -1);
  const int d = s.dims();
  const cplx scale = cplx(0.0, -1.0) * std::pow(f.pitch / std::sqrt(2.0 * kPi), d);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= scale;
  f.pitch = f.dq();
  f.plane = f.plane == Plane::Near ? Plane::Far : Plane::Near;
}

void apply_telescope(FieldLattice&) {}

void apply_2f2f(FieldLattice& f, double r) {
  require_position(f, "apply_2f2f");
  const Shape& s = f.shape();
  FieldLattice out = f;
  for (std::size_t ix = 0; ix < s.nx; ++ix) {
    const double x = static_cast<double>(fft_coord(ix, s.nx)) * f.pitch;
    const std::size_t mx = mirror_index(ix, s.nx);
    for (std::size_t iy = 0; iy < s.ny; ++iy) {
      const double y = static_cast<double>(fft_coord(iy, s.ny)) * f.pitch;
      const std::size_t my = mirror_index(iy, s.ny);
      const cplx ph = std::polar(1.0, -0.5 * r * (x * x + y * y));
      for (std::size_t it = 0; it < s.nt; ++it)
        out[out.index(ix, iy, it)] = ph * f[f.index(mx, my, it)];
    }
  }
  f = std::move(out);
}

void apply_object(FieldLattice& f, const ObjectMask& m) {
  require_position(f, "apply_object");
  check_plane(f, m.t.plane, "apply_object");
  const Shape& s = f.shape();
  if (m.t.nx != s.nx || m.t.ny != s.ny) throw ConfigError("apply_object: mask grid mismatch");
  for (std::size_t ix = 0; ix < s.nx; ++ix)
    for (std::size_t iy = 0; iy < s.ny; ++iy) {
      const cplx t = m.t(ix, iy);
      for (std::size_t it = 0; it < s.nt; ++it) f[f.index(ix, iy, it)] *= t;
    }
}

void apply_focal_shift(FieldLattice& f, double dz_hat, double fresnel) {
  if (f.domain != Domain::Fourier)
    throw ConfigError("apply_focal_shift: field must be in the Fourier domain");
  if (dz_hat == 0.0) return;
  const Shape& s = f.shape();
  const double dq = f.dq();
  for (std::size_t ix = 0; ix < s.nx; ++ix) {
    const double qx = static_cast<double>(fft_coord(ix, s.nx)) * dq;
    for (std::size_t iy = 0; iy < s.ny; ++iy) {
      const double qy = static_cast<double>(fft_coord(iy, s.ny)) * dq;
      const cplx ph = std::polar(1.0, -dz_hat * fresnel * (qx * qx + qy * qy));
      for (std::size_t it = 0; it < s.nt; ++it) f[f.index(ix, iy, it)] *= ph;
    }
  }
}

bool OpticalPath::has_focal_shift() const {
  return std::any_of(elements.begin(), elements.end(),
                     [](const OpticalElement& e) { return e.kind == ElementKind::FocalShift; });
}

Plane OpticalPath::output_plane() const {
  Plane p = Plane::Near;
  for (const auto& e : elements)
    if (e.kind == ElementKind::FF) p = p == Plane::Near ? Plane::Far : Plane::Near;
  return p;
}

void OpticalPath::validate() const {
  std::vector<ElementKind> k;
  for (const auto& e : elements) k.push_back(e.kind);
  using E = ElementKind;
  const std::vector<std::vector<E>> allowed = {
      {E::Object, E::FF}, {E::FF, E::Object}, {E::FF},        {E::FocalShift, E::FF},
      {E::Telescope},     {E::FocalShift, E::Telescope},     {E::TwoF}};
  if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
    throw ConfigError("unsupported optical path layout");
}

void OpticalPath::apply(FieldLattice& f, const ObjectMask* mask) const {
  for (const auto& e : elements) {
    switch (e.kind) {
      case ElementKind::FF:
        apply_ff(f);
        break;
      case ElementKind::TwoF:
        apply_2f2f(f, near_far_ratio);
        break;
      case ElementKind::Telescope:
        apply_telescope(f);
        break;
      case ElementKind::Object:
        if (mask) apply_object(f, *mask);
        break;
      case ElementKind::FocalShift:
        f.to_fourier();
        apply_focal_shift(f, e.focal_shift, fresnel);
        f.to_position();
        break;
    }
  }
}

namespace {
OpticalPath base_path(const DerivedScales& d, Beam b) {
  OpticalPath p;
  p.beam = b;
  p.fresnel = d.fresnel;
  p.near_far_ratio = d.near_far_ratio;
  return p;
}
}  // namespace

OpticalPath pointlike_test_arm(const DerivedScales& d) {
  OpticalPath p = base_path(d, Beam::Signal);
  p.elements = {{ElementKind::Object}, {ElementKind::FF}};
  return p;
}

OpticalPath bucket_test_arm(const DerivedScales& d) {
  OpticalPath p = base_path(d, Beam::Signal);
  p.elements = {{ElementKind::FF}, {ElementKind::Object}};
  return p;
}

OpticalPath reference_arm_ff(const DerivedScales& d, bool focal_shift) {
  OpticalPath p = base_path(d, Beam::Idler);
  if (focal_shift) p.elements.push_back({ElementKind::FocalShift, d.focal_shift_hat});
  p.elements.push_back({ElementKind::FF});
  return p;
}

OpticalPath reference_arm_telescope(const DerivedScales& d, bool focal_shift) {
  OpticalPath p = base_path(d, Beam::Idler);
  if (focal_shift) p.elements.push_back({ElementKind::FocalShift, d.focal_shift_hat});
  p.elements.push_back({ElementKind::Telescope});
  return p;
}

OpticalPath reference_arm_2f(const DerivedScales& d) {
  OpticalPath p = base_path(d, Beam::Idler);
  p.elements = {{ElementKind::TwoF}};
  return p;
}

}  // namespace ghost
