#pragma once

#include <cstddef>

#include "ghost/config.hpp"
#include "ghost/lattice.hpp"

namespace ghost {

// All functions take dimensionless arguments (q in q0, Omega in Omega0) and
// return dimensionless results (phase rates in units of 1/l_c).

// delta_j(q, Omega) l_c in the pump co-moving frame, branch j in {1, 2}.
double delta_j(const DerivedScales& d, int j, double qx, double qy, double omega);

// Same quantity in SI units (1/m) straight from the crystal parameters, with
// no frame shift: k_j' Omega + k_j'' Omega^2 / 2 + rho_j q_x - |q|^2 / 2 k_j.
double delta_j_si(const CrystalConfig& c, int j, double qx, double qy, double omega);

// Delta_12(q, Omega) l_c = Delta0 l_c + delta_1(q, Omega) + delta_2(-q, -Omega).
double mismatch(const DerivedScales& d, double qx, double qy, double omega);

struct GainUV {
  cplx u1, v1, u2, v2;
};

GainUV gain_uv(const DerivedScales& d, double qx, double qy, double omega);

// G(q, Omega) = U1(q, Omega) V2(-q, -Omega).
cplx gain_G(const DerivedScales& d, double qx, double qy, double omega);

// Closed-form phase of G when Gamma is real:
//   phi_G + Delta0 l_c = atan(Delta tanh(Gamma) / (2 Gamma)).
double gain_phase_closed_form(const DerivedScales& d, double qx, double qy, double omega);

// Quadratic model of phi_G around q = 0, Omega = 0.
struct PhaseExpansion {
  // dimensionless: rad, 1/q0, 1/q0^2, 1/Omega0, 1/Omega0^2
  double phi0 = 0.0;
  double phi1_x = 0.0;
  double phi2_q = 0.0;
  double phi1_omega = 0.0;
  double phi2_omega = 0.0;
  // SI: rad, m, m^2, s, s^2
  double phi1_x_si = 0.0;
  double phi2_q_si = 0.0;
  double phi1_omega_si = 0.0;
  double phi2_omega_si = 0.0;

  double evaluate(double qx, double qy, double omega) const {
    return phi0 + phi1_x * qx + phi2_q * (qx * qx + qy * qy) + phi1_omega * omega +
           phi2_omega * omega * omega;
  }
};

PhaseExpansion phase_expansion(const CrystalConfig& c, const DerivedScales& d);

// U, V, G on the Fourier lattice (FFT order, q = fft_coord * dq,
// Omega = -fft_coord * dOmega), with the intermediate quantities cached.
class GainTable {
 public:
  GainTable(const DerivedScales& d, Shape shape, double dq, double domega);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return g_.size(); }
  double dq() const { return dq_; }
  double domega() const { return domega_; }
  double qx(std::size_t ix) const { return static_cast<double>(fft_coord(ix, shape_.nx)) * dq_; }
  double qy(std::size_t iy) const { return static_cast<double>(fft_coord(iy, shape_.ny)) * dq_; }
  double omega(std::size_t it) const {
    return -static_cast<double>(fft_coord(it, shape_.nt)) * domega_;
  }
  std::size_t index(std::size_t ix, std::size_t iy, std::size_t it) const {
    return lattice_index(shape_, ix, iy, it);
  }
  // Flat index of (-q, -Omega).
  std::size_t mirror(std::size_t i) const;

  const cvec& u1() const { return u1_; }
  const cvec& v1() const { return v1_; }
  const cvec& u2() const { return u2_; }
  const cvec& v2() const { return v2_; }
  const cvec& g() const { return g_; }
  const rvec& mismatch() const { return delta_; }
  const rvec& gamma_sq() const { return gamma2_; }
  const rvec& d12() const { return d12_; }

  // arg G along q_x at q_y = 0, Omega = 0, unwrapped outwards from the pixel
  // nearest -q_C. Indexed by ix.
  const rvec& phase_x() const { return phase_x_; }
  std::size_t center_index() const { return center_ix_; }

 private:
  Shape shape_;
  double dq_;
  double domega_;
  cvec u1_, v1_, u2_, v2_, g_;
  rvec delta_, gamma2_, d12_;
  rvec phase_x_;
  std::size_t center_ix_ = 0;
};

}  // namespace ghost
