#pragma once

#include <cstddef>

namespace ghost {

// Physical crystal parameters, SI units. Indices and group parameters are
// inputs; nothing is computed from Sellmeier data.
struct CrystalConfig {
  double pump_wavelength = 352e-9;  // m
  double wavelength = 704e-9;       // m, degenerate signal/idler
  double length = 4e-3;             // m
  double n1 = 1.0;                  // signal (ordinary)
  double n2 = 1.0;                  // idler (extraordinary)
  double n0 = 1.0;                  // pump
  double k1_prime = 0.0;            // s/m
  double k2_prime = 0.0;
  double k0_prime = 0.0;            // pump; sets the co-moving time frame
  double k1_second = 0.0;           // s^2/m
  double k2_second = 0.0;
  double k0_second = 0.0;
  double rho1 = 0.0;                // rad
  double rho2 = 0.0;
  double rho0 = 0.0;
  double delta0 = 0.0;              // 1/m, k1 + k2 - k0
  double gain = 0.0;                // sigma_p * l_c

  double k_vacuum() const;  // 2 pi / wavelength
  double k1() const;
  double k2() const;
  double k0() const;
  void validate() const;
};

struct PumpConfig {
  double waist = 660e-6;     // m
  double duration = 1.5e-12; // s
  double amplitude = 1.0;    // A_p, reporting only; absorbed into the gain
  bool plane_wave = false;
  bool cw = false;
  bool propagate = false;    // full linear pump propagation instead of quasi-static
  void validate() const;
};

struct GridConfig {
  std::size_t nx = 512;
  std::size_t ny = 1;
  std::size_t nt = 32;
  std::size_t nz = 200;
  double extent_x = 115.0;          // x_coh
  double extent_t = 16.0;           // tau_coh
  double detection_window = 16.0;   // tau_coh

  bool time_off() const { return nt == 1; }
  int transverse_dims() const { return ny > 1 ? 2 : 1; }
  std::size_t points() const { return nx * ny * nt; }
  double dx() const { return extent_x / static_cast<double>(nx); }
  double dt() const { return time_off() ? 1.0 : extent_t / static_cast<double>(nt); }
  void validate() const;
};

// Secondary scales plus the dimensionless coefficients every kernel uses.
// Internal unit convention: x in x_coh, t in tau_coh, z in l_c, q in q0,
// Omega in Omega0. Far-field plane coordinates are in units of x_f.
struct DerivedScales {
  double k_v = 0.0;           // 1/m
  double q0 = 0.0;            // 1/m
  double omega0 = 0.0;        // 1/s
  double x_coh = 0.0;         // m
  double tau_coh = 0.0;       // s
  double q_c = 0.0;           // 1/m, along x
  double psi_g = 0.5;
  double focal_shift = 0.0;   // m
  double focal_length = 0.0;  // m
  double x_f = 0.0;           // m

  // dimensionless model coefficients
  double sigma = 0.0;         // sigma_p l_c
  double delta0 = 0.0;        // Delta0 l_c
  double q_c_hat = 0.0;       // q_c / q0
  double tau1 = 0.0;          // (k1' - k0') Omega0 l_c
  double tau2 = 0.0;
  double beta1 = 0.0;         // k1'' Omega0^2 l_c
  double beta2 = 0.0;
  double beta0 = 0.0;
  double r1 = 0.0;            // rho1 l_c q0
  double r2 = 0.0;
  double r0 = 0.0;
  double kappa1 = 0.0;        // l_c q0^2 / (2 k1); kappa1 + kappa2 = 1
  double kappa2 = 0.0;
  double kappa0 = 0.0;
  double fresnel = 0.0;       // l_c q0^2 / (2 k_v)
  double focal_shift_hat = 0.0;  // focal_shift / l_c
  double near_far_ratio = 0.0;   // x_coh / x_f
};

// Fails with ConfigError on non-positive length or degenerate k1 + k2.
DerivedScales derive_scales(const CrystalConfig& crystal, double focal_length);

// tanh(s) / (2 s), with the s -> 0 limit 1/2.
double psi_g(double sigma_lc);

}  // namespace ghost
