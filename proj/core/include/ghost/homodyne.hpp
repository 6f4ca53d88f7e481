#pragma once

#include "ghost/gain.hpp"
#include "ghost/lattice.hpp"

namespace ghost {

enum class TemporalProfile { Cw, Gaussian };

// Classical local oscillator. Spatial quantities are in the units of the
// plane it illuminates (x_coh near field, x_f far field); time in tau_coh.
struct LocalOscillator {
  Beam beam = Beam::Signal;
  double amplitude = 1.0;
  double waist = 0.0;     // 0: plane wave
  double center = 0.0;    // x position of the modulus peak
  double psi = 0.0;       // reference phase
  double tilt = 0.0;      // phase law psi + tilt * x
  TemporalProfile temporal = TemporalProfile::Cw;
  double duration = 1.0;  // Gaussian 1/e amplitude half width
  double delay = 0.0;

  double modulus(double x, double y) const;
  double phase(double x) const { return psi + tilt * x; }
  double envelope(double t) const;
  cplx spatial(double x, double y) const { return std::polar(modulus(x, y), phase(x)); }
  // Spectrum of the temporal profile, (2pi)^{-1/2} \int dt env(t) e^{i W t}.
  cplx temporal_spectrum(double omega) const;
};

// Z(x) = sum_t dt 2 |alpha(x,t)| Re[c(x,t) e^{-i phi(x)}].
RealMap measure_quadrature(const FieldLattice& field, const LocalOscillator& lo);

// Idler phase law psi + tilt * x2.
struct PhaseLaw {
  double psi = 0.0;
  double tilt = 0.0;
};

// Far-field idler (f-f) for a point-like signal detector. phi_g_center is
// the exact phi_G(-q_C, 0) used by the non-optimized recipe; signal_phase is
// phi_1^LO at the fixed signal pixel. Optimized mode requires the focal
// shift in the idler arm (ConfigError otherwise). Tilt in 1/x_f units.
PhaseLaw lo_phase_farfield(const PhaseExpansion& e, double phi_g_center, double signal_phase,
                           bool optimized, bool focal_shift_active);

// Near-field idler (telescope) for a signal pixel x1 (far-field x_f units).
// phi_g_x1 is the exact phi_G(x1, 0). Tilt in 1/x_coh units.
PhaseLaw lo_phase_nearfield(const PhaseExpansion& e, double phi_g_x1, double x1,
                            double signal_phase, bool optimized, bool focal_shift_active);

enum class BucketVariant { Near, Far };

// Joint constraint between the two LOs for bucket detection. The near
// variant couples to phi_1^LO(-x2): with a tilted signal LO the idler picks
// up the same tilt on top of the gain compensation.
PhaseLaw lo_phase_bucket(const PhaseExpansion& e, double phi_g_center, BucketVariant v,
                         const LocalOscillator& signal, bool optimized, bool focal_shift_active);

// Delay of the signal LO relative to the idler LO cancelling the linear
// temporal gain phase, tau_coh units.
double lo_temporal_delay(const PhaseExpansion& e);

}  // namespace ghost
