#include "ghost/wigner.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ghost/errors.hpp"

namespace ghost {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

FieldLattice make_lattice(const GridConfig& g, Beam beam) {
  return FieldLattice(Shape{g.nx, g.ny, g.nt}, g.dx(), g.dt(), beam);
}

double coord(std::size_t i, std::size_t n, double pitch) {
  return static_cast<double>(fft_coord(i, n)) * pitch;
}

const double kPump32 = std::pow(2.0 * std::numbers::pi, 1.5);

}  // namespace

std::uint64_t shot_seed(std::uint64_t master, std::size_t shot) {
  return splitmix64(splitmix64(master) ^ splitmix64(0x5851f42d4c957f2dULL + shot));
}

ShotState sample_vacuum(const GridConfig& grid, std::uint64_t master, std::size_t shot) {
  ShotState s;
  s.shot = shot;
  s.seed = shot_seed(master, shot);
  s.signal = make_lattice(grid, Beam::Signal);
  s.idler = make_lattice(grid, Beam::Idler);
  std::mt19937_64 rng(s.seed);
  // per real component: <re^2> = <im^2> = 1 / (4 V_cell)
  std::normal_distribution<double> normal(0.0, 0.5 / std::sqrt(s.signal.cell_volume()));
  for (FieldLattice* f : {&s.signal, &s.idler}) {
    for (std::size_t i = 0; i < f->size(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      (*f)[i] = cplx(re, im);
    }
  }
  return s;
}

FieldLattice pump_field(double z, const PumpConfig& pump, const DerivedScales& d,
                        const GridConfig& grid) {
  FieldLattice p = make_lattice(grid, Beam::Signal);
  const double peak = kPump32 * pump.amplitude;
  const double w = pump.waist / d.x_coh;
  const double tau = pump.duration / d.tau_coh;
  const Shape& s = p.shape();
  for (std::size_t ix = 0; ix < s.nx; ++ix) {
    const double x = coord(ix, s.nx, p.pitch);
    for (std::size_t iy = 0; iy < s.ny; ++iy) {
      const double y = coord(iy, s.ny, p.pitch);
      for (std::size_t it = 0; it < s.nt; ++it) {
        const double t = s.nt > 1 ? coord(it, s.nt, p.dt) : 0.0;
        double e = 0.0;
        if (!pump.plane_wave) e -= (x * x + y * y) / (w * w);
        if (!pump.cw) e -= t * t / (tau * tau);
        p[p.index(ix, iy, it)] = peak * std::exp(e);
      }
    }
  }
  if (pump.propagate && z != 0.0) {
    p.to_fourier();
    const double dq = p.dq();
    const double dw = p.domega();
    for (std::size_t ix = 0; ix < s.nx; ++ix) {
      const double qx = static_cast<double>(fft_coord(ix, s.nx)) * dq;
      for (std::size_t iy = 0; iy < s.ny; ++iy) {
        const double qy = static_cast<double>(fft_coord(iy, s.ny)) * dq;
        for (std::size_t it = 0; it < s.nt; ++it) {
          const double om = -static_cast<double>(fft_coord(it, s.nt)) * dw;
          const double d0 =
              0.5 * d.beta0 * om * om + d.r0 * qx - d.kappa0 * (qx * qx + qy * qy);
          p[p.index(ix, iy, it)] *= std::polar(1.0, d0 * z);
        }
      }
    }
    p.to_position();
  }
  return p;
}

CrystalPropagator::CrystalPropagator(const DerivedScales& d, const PumpConfig& pump,
                                     const GridConfig& grid)
    : d_(d), pump_(pump), grid_(grid), shape_{grid.nx, grid.ny, grid.nt}, nz_(grid.nz),
      h_(1.0 / static_cast<double>(grid.nz)) {
  const FieldLattice probe = make_lattice(grid, Beam::Signal);
  const double dq = probe.dq();
  const double dw = probe.domega();
  const double inv_n = 1.0 / static_cast<double>(shape_.size());
  // Unscaled FFT pairs are used inside the loop; the 1/N goes into the phases.
  // Work variable b_j = a_j e^{i Delta0 z / 2}, linear rate delta_j + Delta0 / 2.
  const cplx undo = std::polar(1.0, -0.5 * d.delta0);
  for (int j = 0; j < 2; ++j) {
    half_[j].resize(shape_.size());
    full_[j].resize(shape_.size());
    last_[j].resize(shape_.size());
    for (std::size_t ix = 0; ix < shape_.nx; ++ix) {
      const double qx = static_cast<double>(fft_coord(ix, shape_.nx)) * dq;
      for (std::size_t iy = 0; iy < shape_.ny; ++iy) {
        const double qy = static_cast<double>(fft_coord(iy, shape_.ny)) * dq;
        for (std::size_t it = 0; it < shape_.nt; ++it) {
          const double om = -static_cast<double>(fft_coord(it, shape_.nt)) * dw;
          const double rate = delta_j(d, j + 1, qx, qy, om) + 0.5 * d.delta0;
          const std::size_t i = lattice_index(shape_, ix, iy, it);
          half_[j][i] = std::polar(inv_n, 0.5 * rate * h_);
          full_[j][i] = std::polar(inv_n, rate * h_);
          last_[j][i] = half_[j][i] * undo;
        }
      }
    }
  }
  if (!pump_.propagate) static_coupling_ = coupling_at(0.0);
}

CrystalPropagator::Coupling CrystalPropagator::coupling_at(double z) const {
  const FieldLattice p = pump_field(z, pump_, d_, grid_);
  Coupling c;
  c.ch.resize(p.size());
  c.sh.resize(p.size());
  const double norm = d_.sigma / (kPump32 * pump_.amplitude);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const cplx g = norm * p[i];
    const double m = std::abs(g);
    c.ch[i] = std::cosh(m * h_);
    c.sh[i] = m > 0.0 ? (std::sinh(m * h_) / m) * g : cplx(0.0);
  }
  return c;
}

void CrystalPropagator::nonlinear_step(ShotState& s, const Coupling& c) const {
  cplx* b1 = s.signal.data();
  cplx* b2 = s.idler.data();
  const std::size_t n = shape_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const cplx x1 = b1[i];
    const cplx x2 = b2[i];
    b1[i] = c.ch[i] * x1 + c.sh[i] * std::conj(x2);
    b2[i] = c.ch[i] * x2 + c.sh[i] * std::conj(x1);
  }
}

void CrystalPropagator::propagate(ShotState& s) const {
  if (s.signal.domain != Domain::Position || s.idler.domain != Domain::Position)
    throw NumericError("propagate: state must be in the position domain");
  FieldLattice* beams[2] = {&s.signal, &s.idler};
  auto linear = [&](const cvec* phase) {
    for (int j = 0; j < 2; ++j) {
      cplx* a = beams[j]->data();
      fft_full(a, shape_, -1);
      const cplx* ph = phase[j].data();
      for (std::size_t i = 0; i < shape_.size(); ++i) a[i] *= ph[i];
      fft_full(a, shape_, +1);
    }
  };
  linear(half_);
  for (std::size_t m = 0; m < nz_; ++m) {
    if (pump_.propagate) {
      nonlinear_step(s, coupling_at((static_cast<double>(m) + 0.5) * h_));
    } else {
      nonlinear_step(s, static_coupling_);
    }
    linear(m + 1 < nz_ ? full_ : last_);
  }
  s.signal.z = s.idler.z = 1.0;
  check_finite(s);
}

void propagate_crystal(ShotState& state, const PumpConfig& pump, const DerivedScales& d,
                       const GridConfig& grid) {
  CrystalPropagator(d, pump, grid).propagate(state);
}

void spwpa_output(ShotState& s, const GainTable& gain, const PumpConfig& pump) {
  if (!(pump.plane_wave && pump.cw))
    throw ConfigError("spwpa_output requires a plane-wave cw pump");
  if (!(s.signal.shape() == gain.shape()))
    throw ConfigError("spwpa_output: gain table does not match the lattice");
  const Domain original = s.signal.domain;
  s.signal.to_fourier();
  s.idler.to_fourier();
  const std::size_t n = gain.size();
  cvec a1(s.signal.data(), s.signal.data() + n);
  cvec a2(s.idler.data(), s.idler.data() + n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t m = gain.mirror(i);
    s.signal[i] = gain.u1()[i] * a1[i] + gain.v1()[i] * std::conj(a2[m]);
    s.idler[i] = gain.u2()[i] * a2[i] + gain.v2()[i] * std::conj(a1[m]);
  }
  if (original == Domain::Position) {
    s.signal.to_position();
    s.idler.to_position();
  }
  s.signal.z = s.idler.z = 1.0;
  check_finite(s);
}

void check_finite(const ShotState& s) {
  for (const FieldLattice* f : {&s.signal, &s.idler}) {
    for (std::size_t i = 0; i < f->size(); ++i) {
      if (!std::isfinite((*f)[i].real()) || !std::isfinite((*f)[i].imag())) {
        std::ostringstream os;
        os << "non-finite amplitude in " << (f->beam == Beam::Signal ? "signal" : "idler")
           << " at flat index " << i << ", shot " << s.shot << " (seed " << s.seed << ")";
        throw NumericError(os.str());
      }
    }
  }
}

std::vector<std::string> preflight_warnings(const GridConfig& grid, const DerivedScales& d,
                                            const PumpConfig& pump) {
  std::vector<std::string> w;
  const double walk = std::abs(d.r2);
  if (walk > grid.extent_x / 4.0) {
    std::ostringstream os;
    os << "walk-off displacement " << walk << " x_coh exceeds a quarter of the window ("
       << grid.extent_x / 4.0 << " x_coh)";
    w.push_back(os.str());
  }
  if (!pump.plane_wave && pump.waist / d.x_coh + walk > grid.extent_x / 2.0) {
    w.push_back("pump waist plus walk-off exceeds the half window; expect wrap-around");
  }
  const double qmax = std::numbers::pi / grid.dx();
  if (d.q_c_hat + 3.0 > qmax) {
    w.push_back("transverse grid does not resolve the gain band around -q_C");
  }
  return w;
}

}  // namespace ghost
