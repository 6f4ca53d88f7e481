#include "ghost/config.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ghost/errors.hpp"

namespace ghost {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

double CrystalConfig::k_vacuum() const { return 2.0 * std::numbers::pi / wavelength; }
double CrystalConfig::k1() const { return n1 * k_vacuum(); }
double CrystalConfig::k2() const { return n2 * k_vacuum(); }
double CrystalConfig::k0() const { return n0 * 2.0 * std::numbers::pi / pump_wavelength; }

void CrystalConfig::validate() const {
  require(length > 0.0, "crystal.length must be positive");
  require(wavelength > 0.0 && pump_wavelength > 0.0, "wavelengths must be positive");
  require(n1 >= 1.0 && n2 >= 1.0, "refractive indices n1, n2 must be >= 1");
  require(gain >= 0.0, "crystal.gain (sigma_p l_c) must be non-negative");
  require(std::isfinite(delta0) && std::isfinite(rho2) && std::isfinite(k1_prime) &&
              std::isfinite(k2_prime),
          "crystal parameters must be finite");
}

void PumpConfig::validate() const {
  require(plane_wave || waist > 0.0, "pump.waist must be positive unless plane_wave");
  require(cw || duration > 0.0, "pump.duration must be positive unless cw");
}

void GridConfig::validate() const {
  require(is_pow2(nx) && is_pow2(ny) && is_pow2(nt), "grid sizes must be powers of two");
  require(nz >= 1, "grid.nz must be >= 1");
  require(ny == 1 || ny == nx, "3+1D grids must be square (ny == nx)");
  require(extent_x > 0.0, "grid.extent_x must be positive");
  require(time_off() || extent_t > 0.0, "grid.extent_t must be positive");
  require(time_off() || detection_window >= extent_t * (1.0 - 1e-12),
          "grid.detection_window must cover the simulated time window");
}

double psi_g(double s) {
  if (std::abs(s) < 1e-4) return 0.5 * (1.0 - s * s / 3.0);
  return std::tanh(s) / (2.0 * s);
}

DerivedScales derive_scales(const CrystalConfig& c, double focal_length) {
  c.validate();
  require(focal_length > 0.0, "optics.focal_length must be positive");
  const double k1 = c.k1();
  const double k2 = c.k2();
  const double inv_sum = 1.0 / k1 + 1.0 / k2;
  require(std::isfinite(inv_sum) && inv_sum > 0.0, "degenerate k1 + k2");

  DerivedScales d;
  const double lc = c.length;
  d.k_v = c.k_vacuum();
  d.q0 = std::sqrt(2.0 / (lc * inv_sum));
  const double dk = std::abs(c.k1_prime - c.k2_prime);
  if (dk > 0.0) {
    d.omega0 = 1.0 / (dk * lc);
  } else if (c.k1_second + c.k2_second != 0.0) {
    // no temporal walk-off: fall back to the dispersion-limited bandwidth
    d.omega0 = 1.0 / std::sqrt(std::abs(c.k1_second + c.k2_second) * lc);
  } else {
    d.omega0 = 1e12;
  }
  d.x_coh = 1.0 / d.q0;
  d.tau_coh = 1.0 / d.omega0;
  d.q_c = 0.5 * c.rho2 * lc * d.q0 * d.q0;
  d.psi_g = psi_g(c.gain);
  d.focal_shift = -(1.0 / c.n1 + 1.0 / c.n2) * d.psi_g * lc;
  d.focal_length = focal_length;
  d.x_f = focal_length * d.q0 / d.k_v;

  d.sigma = c.gain;
  d.delta0 = c.delta0 * lc;
  d.q_c_hat = d.q_c / d.q0;
  d.tau1 = (c.k1_prime - c.k0_prime) * d.omega0 * lc;
  d.tau2 = (c.k2_prime - c.k0_prime) * d.omega0 * lc;
  const double w2 = d.omega0 * d.omega0 * lc;
  d.beta1 = c.k1_second * w2;
  d.beta2 = c.k2_second * w2;
  d.beta0 = c.k0_second * w2;
  d.r1 = c.rho1 * lc * d.q0;
  d.r2 = c.rho2 * lc * d.q0;
  d.r0 = c.rho0 * lc * d.q0;
  const double q2l = lc * d.q0 * d.q0;
  d.kappa1 = q2l / (2.0 * k1);
  d.kappa2 = q2l / (2.0 * k2);
  d.kappa0 = c.n0 > 0.0 ? q2l / (2.0 * c.k0()) : 0.0;
  d.fresnel = q2l / (2.0 * d.k_v);
  d.focal_shift_hat = d.focal_shift / lc;
  d.near_far_ratio = d.x_coh / d.x_f;
  return d;
}

}  // namespace ghost
