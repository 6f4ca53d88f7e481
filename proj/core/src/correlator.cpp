#include "ghost/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ghost/errors.hpp"

namespace ghost {

CorrelationEstimate::CorrelationEstimate(std::size_t nx_, std::size_t ny_, double pitch_,
                                         Plane plane_, Geometry g, Quadrature q)
    : nx(nx_), ny(ny_), pitch(pitch_), plane(plane_), geometry(g), quadrature(q),
      mean_(nx_ * ny_, 0.0), m2_(nx_ * ny_, 0.0) {}

void CorrelationEstimate::push(const rvec& x) {
  if (x.size() != mean_.size()) throw ConfigError("correlation sample size mismatch");
  ++n_;
  const double inv = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double delta = x[i] - mean_[i];
    mean_[i] += delta * inv;
    m2_[i] += delta * (x[i] - mean_[i]);
  }
}

void CorrelationEstimate::merge(const CorrelationEstimate& o) {
  if (o.n_ == 0) return;
  if (o.mean_.size() != mean_.size()) throw ConfigError("cannot merge estimates of different size");
  if (n_ == 0) {
    n_ = o.n_;
    mean_ = o.mean_;
    m2_ = o.m2_;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    const double delta = o.mean_[i] - mean_[i];
    mean_[i] += delta * nb / n;
    m2_[i] += o.m2_[i] + delta * delta * na * nb / n;
  }
  n_ += o.n_;
}

rvec CorrelationEstimate::standard_error() const {
  rvec se(mean_.size(), std::numeric_limits<double>::quiet_NaN());
  if (n_ < 2) return se;
  const double n = static_cast<double>(n_);
  for (std::size_t i = 0; i < se.size(); ++i) se[i] = std::sqrt(m2_[i] / (n - 1.0) / n);
  return se;
}

RealMap CorrelationEstimate::mean_map() const {
  RealMap m(nx, ny, pitch, plane);
  m.values = mean_;
  return m;
}

RealMap CorrelationEstimate::error_map() const {
  RealMap m(nx, ny, pitch, plane);
  m.values = standard_error();
  return m;
}

namespace {

void require_same(const RealMap& a, const RealMap& b) {
  if (a.nx != b.nx || a.ny != b.ny) throw ConfigError("quadrature maps differ in size");
}

double cell(const RealMap& m) { return std::pow(m.pitch, m.dims()); }

}  // namespace

rvec fixed_sample(const RealMap& z1, const RealMap& z2, std::size_t pixel, bool scan_x1) {
  require_same(z1, z2);
  if (pixel >= z1.size()) throw ConfigError("fixed pixel outside the grid");
  const RealMap& fixed = scan_x1 ? z2 : z1;
  const RealMap& scanned = scan_x1 ? z1 : z2;
  const double v = fixed.values[pixel];
  rvec out(scanned.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v * scanned.values[i];
  return out;
}

rvec bucket_sample(const RealMap& z1, const RealMap& z2) {
  require_same(z1, z2);
  double total = 0.0;
  for (double v : z1.values) total += v;
  total *= cell(z1);
  rvec out(z2.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = total * z2.values[i];
  return out;
}

rvec convolution_sample(const RealMap& z1, const RealMap& z2, Padding padding) {
  require_same(z1, z2);
  const std::size_t f = padding == Padding::Zero ? 2 : 1;
  const std::size_t nx = z1.nx * f;
  const std::size_t ny = z1.ny > 1 ? z1.ny * f : 1;
  const Shape s{nx, ny, 1};
  cvec a(s.size(), cplx(0.0));
  cvec b(s.size(), cplx(0.0));
  // place samples by signed coordinate so zero padding separates the wraps
  for (std::size_t ix = 0; ix < z1.nx; ++ix) {
    const std::size_t px = fft_index(fft_coord(ix, z1.nx), nx);
    for (std::size_t iy = 0; iy < z1.ny; ++iy) {
      const std::size_t py = fft_index(fft_coord(iy, z1.ny), ny);
      a[px * ny + py] = z1(ix, iy);
      b[px * ny + py] = z2(ix, iy);
    }
  }
  fft_spatial(a.data(), s, -1);
  fft_spatial(b.data(), s, -1);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  fft_spatial(a.data(), s, +1);
  const double scale = cell(z1) / static_cast<double>(s.size());
  rvec out(z1.size());
  for (std::size_t ix = 0; ix < z1.nx; ++ix) {
    const std::size_t px = fft_index(fft_coord(ix, z1.nx), nx);
    for (std::size_t iy = 0; iy < z1.ny; ++iy) {
      const std::size_t py = fft_index(fft_coord(iy, z1.ny), ny);
      out[ix * z1.ny + iy] = a[px * ny + py].real() * scale;
    }
  }
  return out;
}

void accumulate_fixed(CorrelationEstimate& est, const RealMap& z1, const RealMap& z2,
                      std::size_t pixel) {
  est.push(fixed_sample(z1, z2, pixel, est.geometry == Geometry::ScanX1));
}

void accumulate_bucket(CorrelationEstimate& est, const RealMap& z1, const RealMap& z2) {
  est.push(bucket_sample(z1, z2));
}

void accumulate_convolution(CorrelationEstimate& est, const RealMap& z1, const RealMap& z2,
                            Padding padding) {
  if (est.geometry != Geometry::Convolution || z1.plane != Plane::Far || z2.plane != Plane::Far)
    throw ConfigError("convolution estimator needs far-field quadratures");
  est.push(convolution_sample(z1, z2, padding));
}

ComplexMap reconstruct_nearfield(const RealMap& p_re, const RealMap& p_im) {
  require_same(p_re, p_im);
  if (p_re.pitch != p_im.pitch) throw ConfigError("quadrature grids differ in pitch");
  ComplexMap m(p_re.nx, p_re.ny, p_re.pitch, Plane::Far);
  for (std::size_t i = 0; i < m.size(); ++i) m.values[i] = cplx(p_re.values[i], p_im.values[i]);
  unitary_dft(m, +1);
  m.plane = Plane::Near;
  return m;
}

namespace {

bool in_region(const Region& r, std::size_t i) { return r.empty() || r[i]; }

double peak_abs(const rvec& v, const Region& r) {
  double p = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (in_region(r, i)) p = std::max(p, std::abs(v[i]));
  return p;
}

}  // namespace

Comparison compare_peak(const rvec& est, const rvec& ref, const Region& region,
                        const rvec* se) {
  if (est.size() != ref.size()) throw ConfigError("comparison grids differ");
  Comparison c;
  c.scale_estimate = peak_abs(est, region);
  c.scale_reference = peak_abs(ref, region);
  const double ne = c.scale_estimate > 0.0 ? c.scale_estimate : 1.0;
  const double nr = c.scale_reference > 0.0 ? c.scale_reference : 1.0;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (!in_region(region, i)) continue;
    const double a = est[i] / ne;
    const double b = ref[i] / nr;
    num += (a - b) * (a - b);
    den += b * b;
    ++c.pixels;
    if (se && (*se)[i] > 0.0) c.max_abs_z = std::max(c.max_abs_z, std::abs(a - b) / ((*se)[i] / ne));
  }
  c.rel_l2 = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return c;
}

Comparison compare_pair_peak(const rvec& er, const rvec& ei, const rvec& rr, const rvec& ri,
                             const Region& region) {
  if (er.size() != rr.size() || ei.size() != ri.size() || er.size() != ei.size())
    throw ConfigError("comparison grids differ");
  Comparison c;
  for (std::size_t i = 0; i < er.size(); ++i) {
    if (!in_region(region, i)) continue;
    c.scale_estimate = std::max(c.scale_estimate, std::hypot(er[i], ei[i]));
    c.scale_reference = std::max(c.scale_reference, std::hypot(rr[i], ri[i]));
  }
  const double ne = c.scale_estimate > 0.0 ? c.scale_estimate : 1.0;
  const double nr = c.scale_reference > 0.0 ? c.scale_reference : 1.0;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < er.size(); ++i) {
    if (!in_region(region, i)) continue;
    const double dr = er[i] / ne - rr[i] / nr;
    const double di = ei[i] / ne - ri[i] / nr;
    num += dr * dr + di * di;
    den += (rr[i] * rr[i] + ri[i] * ri[i]) / (nr * nr);
    ++c.pixels;
  }
  c.rel_l2 = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return c;
}

ConvergenceReport convergence_report(const CorrelationEstimate& est, const rvec* reference,
                                     const Region& region, double threshold) {
  ConvergenceReport r;
  r.shots = est.count();
  r.defined = r.shots >= 2;
  r.standard_error = est.standard_error();
  if (!r.defined) return r;
  double s2 = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < r.standard_error.size(); ++i) {
    if (!in_region(region, i)) continue;
    s2 += r.standard_error[i] * r.standard_error[i];
    ++n;
  }
  r.rms_standard_error = n ? std::sqrt(s2 / static_cast<double>(n)) : 0.0;
  if (!reference) return r;
  r.has_reference = true;
  const Comparison c = compare_peak(est.mean(), *reference, region, nullptr);
  r.rel_error = c.rel_l2;
  // noise part of the relative error, in the same normalisation
  double den = 0.0;
  const double nr = c.scale_reference > 0.0 ? c.scale_reference : 1.0;
  for (std::size_t i = 0; i < reference->size(); ++i)
    if (in_region(region, i)) den += ((*reference)[i] / nr) * ((*reference)[i] / nr);
  const double ne = c.scale_estimate > 0.0 ? c.scale_estimate : 1.0;
  r.noise_fraction = den > 0.0 ? std::sqrt(s2) / ne / std::sqrt(den) : 0.0;
  const double bias2 = std::max(0.0, r.rel_error * r.rel_error - r.noise_fraction * r.noise_fraction);
  r.bias_fraction = std::sqrt(bias2);
  if (threshold * threshold > bias2 && r.noise_fraction > 0.0) {
    r.shots_to_threshold = static_cast<double>(r.shots) * r.noise_fraction * r.noise_fraction /
                           (threshold * threshold - bias2);
  } else {
    r.shots_to_threshold = std::numeric_limits<double>::infinity();
  }
  return r;
}

}  // namespace ghost
