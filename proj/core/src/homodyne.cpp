#include "ghost/homodyne.hpp"

#include <cmath>
#include <numbers>

#include "ghost/errors.hpp"

namespace ghost {

namespace {
constexpr double kPi = std::numbers::pi;

void require_shift(bool optimized, bool focal_shift_active) {
  if (optimized && !focal_shift_active)
    throw ConfigError("optimized LO phases need the focal shift in the idler arm");
}
}  // namespace

double LocalOscillator::modulus(double x, double y) const {
  if (waist <= 0.0) return amplitude;
  const double dx = x - center;
  return amplitude * std::exp(-(dx * dx + y * y) / (waist * waist));
}

double LocalOscillator::envelope(double t) const {
  if (temporal == TemporalProfile::Cw) return 1.0;
  const double u = (t - delay) / duration;
  return std::exp(-u * u);
}

cplx LocalOscillator::temporal_spectrum(double omega) const {
  if (temporal == TemporalProfile::Cw) return cplx(0.0);
  const double tau = duration;
  const double mag = tau / std::sqrt(2.0) * std::exp(-omega * omega * tau * tau / 4.0);
  return std::polar(mag, omega * delay);
}

RealMap measure_quadrature(const FieldLattice& f, const LocalOscillator& lo) {
  if (f.domain != Domain::Position)
    throw ConfigError("measure_quadrature: field must be in the position domain");
  const Shape& s = f.shape();
  RealMap z(s.nx, s.ny, f.pitch, f.plane);
  std::vector<double> env(s.nt);
  for (std::size_t it = 0; it < s.nt; ++it) {
    const double t = s.nt > 1 ? static_cast<double>(fft_coord(it, s.nt)) * f.dt : 0.0;
    env[it] = 2.0 * lo.envelope(t) * f.dt;
  }
  for (std::size_t ix = 0; ix < s.nx; ++ix) {
    const double x = static_cast<double>(fft_coord(ix, s.nx)) * f.pitch;
    for (std::size_t iy = 0; iy < s.ny; ++iy) {
      const double y = static_cast<double>(fft_coord(iy, s.ny)) * f.pitch;
      const double mod = lo.modulus(x, y);
      const cplx rot = std::polar(1.0, -lo.phase(x));
      const cplx* c = f.data() + f.index(ix, iy, 0);
      const std::size_t slab = s.transverse();
      double acc = 0.0;
      for (std::size_t it = 0; it < s.nt; ++it) acc += env[it] * (c[it * slab] * rot).real();
      z(ix, iy) = mod * acc;
    }
  }
  return z;
}

PhaseLaw lo_phase_farfield(const PhaseExpansion& e, double phi_g_center, double signal_phase,
                           bool optimized, bool focal_shift_active) {
  require_shift(optimized, focal_shift_active);
  if (!optimized) return {phi_g_center - signal_phase + kPi, 0.0};
  return {e.phi0 - signal_phase + kPi, -e.phi1_x};
}

PhaseLaw lo_phase_nearfield(const PhaseExpansion& e, double phi_g_x1, double x1,
                            double signal_phase, bool optimized, bool focal_shift_active) {
  require_shift(optimized, focal_shift_active);
  if (!optimized) return {phi_g_x1 - signal_phase - 0.5 * kPi, -x1};
  return {e.phi0 - signal_phase + x1 * e.phi1_x - 0.5 * kPi, -x1};
}

PhaseLaw lo_phase_bucket(const PhaseExpansion& e, double phi_g_center, BucketVariant v,
                         const LocalOscillator& signal, bool optimized, bool focal_shift_active) {
  require_shift(optimized, focal_shift_active);
  const double phi = optimized ? e.phi0 : phi_g_center;
  if (v == BucketVariant::Near) {
    // phi_1^LO(-x2) = psi_1 - tilt_1 x2
    const double tilt = (optimized ? -e.phi1_x : 0.0) + signal.tilt;
    return {phi - signal.psi + kPi, tilt};
  }
  return {phi - signal.psi - 0.5 * kPi, 0.0};
}

double lo_temporal_delay(const PhaseExpansion& e) { return e.phi1_omega; }

}  // namespace ghost
