#include "ghost/gain.hpp"

#include <cmath>
#include <algorithm>
#include <numbers>

namespace ghost {

namespace {

// cosh(Gamma) and sinh(Gamma)/Gamma as functions of Gamma^2, continued to
// cos/sin for Gamma^2 < 0 and expanded in series near Gamma = 0.
struct HyperPair {
  double c;
  double s;
};

HyperPair hyper(double g2) {
  if (g2 > 1e-10) {
    const double g = std::sqrt(g2);
    return {std::cosh(g), std::sinh(g) / g};
  }
  if (g2 < -1e-10) {
    const double g = std::sqrt(-g2);
    return {std::cos(g), std::sin(g) / g};
  }
  return {1.0 + g2 / 2.0 + g2 * g2 / 24.0, 1.0 + g2 / 6.0 + g2 * g2 / 120.0};
}

struct BranchValues {
  cplx u, v;
  double delta, gamma2, d;
};

// Gain functions of branch j; the partner branch is evaluated at (-q, -Omega).
BranchValues branch(const DerivedScales& p, int j, double qx, double qy, double omega) {
  const int k = 3 - j;
  const double dj = delta_j(p, j, qx, qy, omega);
  const double dk = delta_j(p, k, -qx, -qy, -omega);
  BranchValues b;
  b.delta = p.delta0 + dj + dk;
  b.d = dj - dk - p.delta0;
  b.gamma2 = p.sigma * p.sigma - 0.25 * b.delta * b.delta;
  const HyperPair h = hyper(b.gamma2);
  const cplx rot = std::polar(1.0, 0.5 * b.d);
  b.u = rot * cplx(h.c, 0.5 * b.delta * h.s);
  b.v = rot * (p.sigma * h.s);
  return b;
}

}  // namespace

double delta_j(const DerivedScales& d, int j, double qx, double qy, double omega) {
  const double q2 = qx * qx + qy * qy;
  if (j == 1) return d.tau1 * omega + 0.5 * d.beta1 * omega * omega + d.r1 * qx - d.kappa1 * q2;
  return d.tau2 * omega + 0.5 * d.beta2 * omega * omega + d.r2 * qx - d.kappa2 * q2;
}

double delta_j_si(const CrystalConfig& c, int j, double qx, double qy, double omega) {
  const double q2 = qx * qx + qy * qy;
  const bool one = j == 1;
  const double kp = one ? c.k1_prime : c.k2_prime;
  const double kpp = one ? c.k1_second : c.k2_second;
  const double rho = one ? c.rho1 : c.rho2;
  const double k = one ? c.k1() : c.k2();
  return kp * omega + 0.5 * kpp * omega * omega + rho * qx - q2 / (2.0 * k);
}

double mismatch(const DerivedScales& d, double qx, double qy, double omega) {
  return d.delta0 + delta_j(d, 1, qx, qy, omega) + delta_j(d, 2, -qx, -qy, -omega);
}

GainUV gain_uv(const DerivedScales& d, double qx, double qy, double omega) {
  const BranchValues b1 = branch(d, 1, qx, qy, omega);
  const BranchValues b2 = branch(d, 2, qx, qy, omega);
  return {b1.u, b1.v, b2.u, b2.v};
}

cplx gain_G(const DerivedScales& d, double qx, double qy, double omega) {
  const BranchValues b1 = branch(d, 1, qx, qy, omega);
  const BranchValues b2 = branch(d, 2, -qx, -qy, -omega);
  return b1.u * b2.v;
}

double gain_phase_closed_form(const DerivedScales& d, double qx, double qy, double omega) {
  const double delta = mismatch(d, qx, qy, omega);
  const double g2 = d.sigma * d.sigma - 0.25 * delta * delta;
  const HyperPair h = hyper(g2);
  return -d.delta0 + std::atan(0.5 * delta * h.s / h.c);
}

PhaseExpansion phase_expansion(const CrystalConfig& c, const DerivedScales& d) {
  PhaseExpansion e;
  const double psi = d.psi_g;
  const double lc = c.length;
  e.phi0 = d.delta0 * (psi - 1.0);
  e.phi1_x_si = -c.rho2 * lc * psi;
  e.phi2_q_si = -(c.n1 + c.n2) * lc * psi / (2.0 * c.n1 * c.n2 * d.k_v);
  e.phi1_omega_si = (c.k1_prime - c.k2_prime) * lc * psi;
  e.phi2_omega_si = (c.k1_second + c.k2_second) * lc * psi / 2.0;
  e.phi1_x = e.phi1_x_si * d.q0;
  e.phi2_q = e.phi2_q_si * d.q0 * d.q0;
  e.phi1_omega = e.phi1_omega_si * d.omega0;
  e.phi2_omega = e.phi2_omega_si * d.omega0 * d.omega0;
  return e;
}

GainTable::GainTable(const DerivedScales& d, Shape shape, double dq, double domega)
    : shape_(shape), dq_(dq), domega_(shape.nt > 1 ? domega : 0.0) {
  const std::size_t n = shape.size();
  u1_.resize(n);
  v1_.resize(n);
  u2_.resize(n);
  v2_.resize(n);
  g_.resize(n);
  delta_.resize(n);
  gamma2_.resize(n);
  d12_.resize(n);
  for (std::size_t ix = 0; ix < shape.nx; ++ix) {
    for (std::size_t iy = 0; iy < shape.ny; ++iy) {
      for (std::size_t it = 0; it < shape.nt; ++it) {
        const std::size_t i = index(ix, iy, it);
        const BranchValues b1 = branch(d, 1, qx(ix), qy(iy), omega(it));
        const BranchValues b2 = branch(d, 2, qx(ix), qy(iy), omega(it));
        u1_[i] = b1.u;
        v1_[i] = b1.v;
        u2_[i] = b2.u;
        v2_[i] = b2.v;
        delta_[i] = b1.delta;
        gamma2_[i] = b1.gamma2;
        d12_[i] = b1.d;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) g_[i] = u1_[i] * v2_[mirror(i)];

  // unwrap arg G along q_x, seeded at the gain center -q_C
  phase_x_.assign(shape.nx, 0.0);
  const long c = std::lround(-d.q_c_hat / dq);
  center_ix_ = fft_index(c, shape.nx);
  const long half = static_cast<long>(shape.nx / 2);
  const long lo = -half;
  const long hi = static_cast<long>(shape.nx) - half - 1;
  const long c0 = std::clamp(c, lo, hi);
  auto arg_at = [&](long coord) { return std::arg(g_[index(fft_index(coord, shape.nx), 0, 0)]); };
  phase_x_[fft_index(c0, shape.nx)] = arg_at(c0);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (int dir : {+1, -1}) {
    double prev = arg_at(c0);
    for (long k = c0 + dir; k >= lo && k <= hi; k += dir) {
      double a = arg_at(k);
      a += two_pi * std::round((prev - a) / two_pi);
      phase_x_[fft_index(k, shape.nx)] = a;
      prev = a;
    }
  }
}

std::size_t GainTable::mirror(std::size_t i) const {
  const std::size_t iy = i % shape_.ny;
  const std::size_t ix = (i / shape_.ny) % shape_.nx;
  const std::size_t it = i / (shape_.nx * shape_.ny);
  return index(mirror_index(ix, shape_.nx), mirror_index(iy, shape_.ny),
               mirror_index(it, shape_.nt));
}

}  // namespace ghost
