#include "ghost/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "ghost/errors.hpp"
#include "ghost/optics.hpp"

namespace ghost {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);
const cplx kI(0.0, 1.0);

double coord(std::size_t i, std::size_t n, double pitch) {
  return static_cast<double>(fft_coord(i, n)) * pitch;
}

cplx fresnel(const OracleInputs& in, double q) {
  return std::polar(1.0, -in.focal_shift * in.scales.fresnel * q * q);
}

ComplexMap weighted_object(const OracleInputs& in) {
  ComplexMap t = in.object;
  if (in.object_weight.waist > 0.0)
    for (std::size_t ix = 0; ix < t.nx; ++ix) t(ix, 0) *= in.object_weight(coord(ix, t.nx, t.pitch));
  return t;
}

void require_1d(const OracleInputs& in) {
  if (in.object.ny > 1) throw ConfigError("oracle curves are computed for 2+1D geometries");
  if (in.object.nx == 0) throw ConfigError("oracle needs an object mask (use an open mask)");
}

OracleCurve make_curve(const OracleInputs& in, OracleGeometry g, std::size_t nx, double pitch,
                       Plane plane) {
  OracleCurve c;
  c.values = RealMap(nx, 1, pitch, plane);
  c.amplitude.assign(nx, cplx(0.0));
  c.geometry = g;
  c.mode = in.mode;
  c.focal_shift = in.focal_shift != 0.0;
  c.tilt = in.idler.tilt != 0.0;
  return c;
}

// 2 Re[conj(A1) conj(A2) E] with the scan weight applied.
void finish(OracleCurve& c, const OracleInputs& in, const std::vector<cplx>& pre) {
  for (std::size_t i = 0; i < pre.size(); ++i) {
    const double w = in.scan_weight.waist > 0.0
                         ? in.scan_weight(coord(i, c.values.nx, c.values.pitch))
                         : 1.0;
    c.amplitude[i] = pre[i] * w;
    c.values.values[i] = 2.0 * c.amplitude[i].real();
  }
}

double relative_change(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double peak = 0.0;
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    peak = std::max(peak, std::abs(a[i]));
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  return peak > 0.0 ? diff / peak : diff;
}

// Quadrature nodes over one period of the far lattice: the lattice itself
// (level 0) or 2^level midpoint nodes per cell, each with its cell index.
struct Node {
  double q;
  double w;
  std::size_t cell;
};

std::vector<Node> far_nodes(std::size_t nx, double dq, int level) {
  std::vector<Node> nodes;
  const std::size_t sub = std::size_t{1} << level;
  const double h = dq / static_cast<double>(sub);
  for (std::size_t m = 0; m < nx; ++m) {
    const double q = coord(m, nx, dq);
    if (level == 0) {
      nodes.push_back({q, dq, m});
      continue;
    }
    for (std::size_t j = 0; j < sub; ++j)
      nodes.push_back({q - 0.5 * dq + (static_cast<double>(j) + 0.5) * h, h, m});
  }
  return nodes;
}

constexpr int kMaxLevel = 5;

// Halves the node spacing until two successive sums agree to the tolerance
// and keeps the finest one.
template <class F>
std::vector<cplx> refine(OracleCurve& c, const OracleInputs& in, F&& amplitude) {
  std::vector<cplx> e = amplitude(0);
  if (in.mode != OracleMode::Exact) return e;
  for (int level = 1; level <= kMaxLevel; ++level) {
    std::vector<cplx> fine = amplitude(level);
    c.quadrature_error = relative_change(e, fine);
    e = std::move(fine);
    if (c.quadrature_error <= in.refine_tolerance) break;
  }
  c.converged = c.quadrature_error <= in.refine_tolerance;
  return e;
}

}  // namespace

double GaussianWeight::operator()(double x) const {
  if (waist <= 0.0) return 1.0;
  const double u = (x - center) / waist;
  return std::exp(-u * u);
}

TemporalFactor TemporalFactor::cw(const DerivedScales& d, double t_d) {
  if (!(t_d > 1.0))
    throw ConfigError("cw temporal factor needs a detection window longer than tau_coh");
  TemporalFactor f;
  f.mode_ = TemporalMode::Cw;
  f.d_ = d;
  f.t_d_ = t_d;
  return f;
}

TemporalFactor TemporalFactor::pulsed(const DerivedScales& d, const LocalOscillator& lo1,
                                      const LocalOscillator& lo2, std::vector<double> omegas,
                                      double domega) {
  if (lo1.temporal != TemporalProfile::Gaussian || lo2.temporal != TemporalProfile::Gaussian)
    throw ConfigError("pulsed temporal factor needs Gaussian LOs");
  TemporalFactor f;
  f.mode_ = TemporalMode::Pulsed;
  f.d_ = d;
  f.omegas_ = std::move(omegas);
  for (double w : f.omegas_)
    f.lo_weights_.push_back(domega * lo1.temporal_spectrum(-w) * lo2.temporal_spectrum(w));
  return f;
}

std::vector<double> TemporalFactor::lattice_omegas(std::size_t nt, double extent_t) {
  std::vector<double> w;
  const double dw = 2.0 * kPi / extent_t;
  for (std::size_t i = 0; i < nt; ++i) w.push_back(-coord(i, nt, dw));
  return w;
}

cplx TemporalFactor::weight(double qx) const {
  if (mode_ == TemporalMode::Cw) return t_d_ * gain_G(d_, qx, 0.0, 0.0);
  cplx sum(0.0);
  for (std::size_t i = 0; i < omegas_.size(); ++i)
    sum += lo_weights_[i] * gain_G(d_, qx, 0.0, omegas_[i]);
  return sum;
}

OracleCurve oracle_pointlike_far(const OracleInputs& in, double x1, std::size_t nx,
                                 double far_pitch) {
  require_1d(in);
  OracleCurve c = make_curve(in, OracleGeometry::PointFar, nx, far_pitch, Plane::Far);
  const ComplexMap t = weighted_object(in);
  const cplx a1 = std::conj(in.signal.spatial(x1, 0.0));
  std::vector<cplx> pre(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const double q2 = coord(i, nx, far_pitch);
    const cplx e = -kInvSqrt2Pi * mask_spectrum(t, x1 + q2) * in.temporal.weight(-q2) *
                   fresnel(in, q2);
    pre[i] = a1 * std::conj(in.idler.spatial(q2, 0.0)) * e;
  }
  finish(c, in, pre);
  return c;
}

OracleCurve oracle_pointlike_far_scan(const OracleInputs& in, double x2, std::size_t nx,
                                      double far_pitch) {
  require_1d(in);
  OracleCurve c = make_curve(in, OracleGeometry::PointFar, nx, far_pitch, Plane::Far);
  const ComplexMap t = weighted_object(in);
  const cplx k = -kInvSqrt2Pi * std::conj(in.idler.spatial(x2, 0.0)) * in.temporal.weight(-x2) *
                 fresnel(in, x2);
  std::vector<cplx> pre(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const double x1 = coord(i, nx, far_pitch);
    pre[i] = std::conj(in.signal.spatial(x1, 0.0)) * mask_spectrum(t, x1 + x2) * k;
  }
  finish(c, in, pre);
  return c;
}

namespace {

// E(x2) = -i (2pi)^{-1} \int dq e^{-i q x2} F(q) T~(x1 - q) W(q)
std::vector<cplx> near_field_amplitude(const OracleInputs& in, const ComplexMap& t, double x1,
                                       std::size_t nx, double near_pitch, int level) {
  const double dq = 2.0 * kPi / (static_cast<double>(nx) * near_pitch);
  std::vector<cplx> e(nx, cplx(0.0));
  if (in.mode == OracleMode::Plateau) {
    const cplx k = -kI * kInvSqrt2Pi * in.temporal.weight(x1) * fresnel(in, x1);
    for (std::size_t i = 0; i < nx; ++i) {
      const double x2 = coord(i, nx, near_pitch);
      e[i] = k * std::polar(1.0, -x1 * x2) * t(i, 0);
    }
    return e;
  }
  // nodes mirror the far lattice (q = -q2), so the sum is the exact inverse
  // transform of the far-field estimate, Nyquist column included
  for (const Node& node : far_nodes(nx, dq, level)) {
    const double q = -node.q;
    const cplx f = node.w * fresnel(in, q) * mask_spectrum(t, x1 - q) * in.temporal.weight(q);
    for (std::size_t i = 0; i < nx; ++i) {
      const double x2 = coord(i, nx, near_pitch);
      e[i] += f * std::polar(1.0, -q * x2);
    }
  }
  for (auto& v : e) v *= -kI / (2.0 * kPi);
  return e;
}

}  // namespace

OracleCurve oracle_pointlike_near(const OracleInputs& in, double x1, std::size_t nx,
                                  double near_pitch) {
  require_1d(in);
  OracleCurve c = make_curve(in, OracleGeometry::PointNear, nx, near_pitch, Plane::Near);
  const ComplexMap t = weighted_object(in);
  const std::vector<cplx> e =
      refine(c, in, [&](int level) { return near_field_amplitude(in, t, x1, nx, near_pitch, level); });
  const cplx a1 = std::conj(in.signal.spatial(x1, 0.0));
  std::vector<cplx> pre(nx);
  for (std::size_t i = 0; i < nx; ++i)
    pre[i] = a1 * std::conj(in.idler.spatial(coord(i, nx, near_pitch), 0.0)) * e[i];
  finish(c, in, pre);
  return c;
}

OracleCurve oracle_pointlike_2f(const OracleInputs& in, double x1, std::size_t nx,
                                double near_pitch) {
  require_1d(in);
  OracleCurve c = make_curve(in, OracleGeometry::Point2f, nx, near_pitch, Plane::Near);
  const ComplexMap t = weighted_object(in);
  const std::vector<cplx> e =
      refine(c, in, [&](int level) { return near_field_amplitude(in, t, x1, nx, near_pitch, level); });
  const cplx a1 = std::conj(in.signal.spatial(x1, 0.0));
  const double r = in.scales.near_far_ratio;
  std::vector<cplx> pre(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const double x2 = coord(i, nx, near_pitch);
    const cplx lens = std::polar(1.0, -0.5 * r * x2 * x2);
    pre[i] = a1 * std::conj(in.idler.spatial(x2, 0.0)) * lens * e[mirror_index(i, nx)];
  }
  finish(c, in, pre);
  return c;
}

OracleCurve oracle_bucket_near(const OracleInputs& in, std::size_t nx, double far_pitch) {
  require_1d(in);
  OracleCurve c = make_curve(in, OracleGeometry::BucketNear, nx, far_pitch, Plane::Far);
  const ComplexMap t = weighted_object(in);
  // signal side at q1: object, signal LO and the gain weight
  std::vector<cplx> side(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    const double q1 = coord(j, nx, far_pitch);
    side[j] = -t(j, 0) * std::conj(in.signal.spatial(q1, 0.0)) * in.temporal.weight(q1);
  }
  const GaussianWeight& env = in.pair_envelope;
  std::vector<cplx> pre(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const double q2 = coord(i, nx, far_pitch);
    cplx s = side[mirror_index(i, nx)];
    if (env.waist > 0.0) {
      // kernel normalised to unit area in q
      const double norm = far_pitch * env.waist / (2.0 * std::sqrt(kPi));
      s = 0.0;
      for (std::size_t j = 0; j < nx; ++j) {
        const double p = coord(j, nx, far_pitch) + q2;
        const double a = 0.25 * p * p * env.waist * env.waist;
        if (a < 40.0) s += side[j] * std::polar(norm * std::exp(-a), -p * env.center);
      }
    }
    pre[i] = std::conj(in.idler.spatial(q2, 0.0)) * fresnel(in, q2) * s;
  }
  finish(c, in, pre);
  return c;
}

namespace {

// Trigonometric interpolant of a far-lattice mask: exact on the lattice and
// band limited to the near window, so refining the q nodes only probes the
// smooth factors of the integrand.
struct LatticeInterpolant {
  std::vector<double> x;
  std::vector<cplx> c;

  LatticeInterpolant(const ComplexMap& t, double near_pitch) {
    const std::size_t n = t.nx;
    x.resize(n);
    c.assign(n, cplx(0.0));
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = coord(k, n, near_pitch);
      for (std::size_t m = 0; m < n; ++m)
        if (t(m, 0) != cplx(0.0)) c[k] += t(m, 0) * std::polar(1.0, -x[k] * coord(m, n, t.pitch));
      c[k] /= static_cast<double>(n);
    }
  }

  cplx operator()(double q) const {
    cplx sum(0.0);
    for (std::size_t k = 0; k < x.size(); ++k) sum += c[k] * std::polar(1.0, x[k] * q);
    return sum;
  }
};

// E(x2) = -i (2pi)^{-1/2} \int dq1 conj(A1(q1)) T(q1) F(q1) W(q1) e^{-i q1 x2}
std::vector<cplx> bucket_far_amplitude(const OracleInputs& in, const ComplexMap& t,
                                       std::size_t nx, double near_pitch, int level) {
  const double dq = 2.0 * kPi / (static_cast<double>(nx) * near_pitch);
  std::vector<cplx> e(nx, cplx(0.0));
  if (in.mode == OracleMode::Plateau) {
    const double qc = -in.scales.q_c_hat;
    const cplx k = std::conj(in.signal.spatial(qc, 0.0)) * fresnel(in, qc) * in.temporal.weight(qc);
    for (const Node& n : far_nodes(nx, dq, 0)) {
      const cplx f = n.w * k * t(n.cell, 0);
      for (std::size_t i = 0; i < nx; ++i)
        e[i] += f * std::polar(1.0, -n.q * coord(i, nx, near_pitch));
    }
  } else {
    std::optional<LatticeInterpolant> tq;
    if (level > 0) tq.emplace(t, near_pitch);
    for (const Node& n : far_nodes(nx, dq, level)) {
      const cplx tv = tq ? (*tq)(n.q) : t(n.cell, 0);
      const cplx f = n.w * std::conj(in.signal.spatial(n.q, 0.0)) * tv * fresnel(in, n.q) *
                     in.temporal.weight(n.q);
      if (f == cplx(0.0)) continue;
      for (std::size_t i = 0; i < nx; ++i)
        e[i] += f * std::polar(1.0, -n.q * coord(i, nx, near_pitch));
    }
  }
  for (auto& v : e) v *= -kI * kInvSqrt2Pi;
  return e;
}

}  // namespace

OracleCurve oracle_bucket_far(const OracleInputs& in, std::size_t nx, double near_pitch) {
  require_1d(in);
  OracleCurve c = make_curve(in, OracleGeometry::BucketFar, nx, near_pitch, Plane::Near);
  const ComplexMap t = weighted_object(in);
  const std::vector<cplx> e =
      refine(c, in, [&](int level) { return bucket_far_amplitude(in, t, nx, near_pitch, level); });
  std::vector<cplx> pre(nx);
  for (std::size_t i = 0; i < nx; ++i)
    pre[i] = std::conj(in.idler.spatial(coord(i, nx, near_pitch), 0.0)) * e[i];
  finish(c, in, pre);
  return c;
}

OracleCurve oracle_convolution_far(const OracleInputs& in, std::size_t nx, double far_pitch) {
  require_1d(in);
  OracleCurve c = make_curve(in, OracleGeometry::ConvolutionFar, nx, far_pitch, Plane::Far);
  const ComplexMap t = weighted_object(in);
  // idler-side factor on the lattice: conj(A2(x2)) W(-x2) F(x2)
  std::vector<cplx> idler(nx);
  std::vector<cplx> signal(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const double q = coord(i, nx, far_pitch);
    idler[i] = std::conj(in.idler.spatial(q, 0.0)) * in.temporal.weight(-q) * fresnel(in, q);
    signal[i] = std::conj(in.signal.spatial(q, 0.0));
  }
  std::vector<cplx> pre(nx);
  for (std::size_t k = 0; k < nx; ++k) {
    cplx sum(0.0);
    for (std::size_t i1 = 0; i1 < nx; ++i1) sum += signal[i1] * idler[(k + nx - i1) % nx];
    pre[k] = -kInvSqrt2Pi * far_pitch * mask_spectrum(t, coord(k, nx, far_pitch)) * sum;
  }
  finish(c, in, pre);
  return c;
}

GaussianWeight fit_gaussian(const RealMap& p) {
  double peak = 0.0;
  for (double v : p.values) peak = std::max(peak, v);
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < p.nx; ++i) {
    const double v = p(i, 0);
    if (v < 0.05 * peak) continue;
    const double x = coord(i, p.nx, p.pitch);
    s0 += v;
    s1 += v * x;
    s2 += v * x * x;
  }
  GaussianWeight g;
  if (s0 <= 0.0) return g;
  g.center = s1 / s0;
  const double var = std::max(0.0, s2 / s0 - g.center * g.center);
  // the 5% cut trims the tails; correct the variance of the truncated Gaussian
  const double cut = std::sqrt(std::log(20.0));
  const double trunc = 1.0 - 2.0 * cut * std::exp(-cut * cut) / (std::sqrt(kPi) * std::erf(cut));
  g.waist = std::sqrt(2.0 * var / trunc);
  return g;
}

std::string to_string(OracleGeometry g) {
  switch (g) {
    case OracleGeometry::PointFar: return "pf";
    case OracleGeometry::PointNear: return "pT";
    case OracleGeometry::Point2f: return "p2f";
    case OracleGeometry::BucketNear: return "bucket-near";
    case OracleGeometry::BucketFar: return "bucket-far";
    case OracleGeometry::ConvolutionFar: return "convolution";
  }
  return "unknown";
}

}  // namespace ghost
