#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ghost/config.hpp"
#include "ghost/gain.hpp"
#include "ghost/lattice.hpp"

namespace ghost {

struct ShotState {
  FieldLattice signal;
  FieldLattice idler;
  std::uint64_t seed = 0;
  std::size_t shot = 0;
};

// Per-shot seed, a pure function of the master seed and the shot index.
std::uint64_t shot_seed(std::uint64_t master, std::size_t shot);

// Independent circular complex Gaussian vacuum on every lattice cell of both
// beams, <|a|^2> = 1/2 per mode, i.e. 1/(2 dx [dy] dt) per cell.
ShotState sample_vacuum(const GridConfig& grid, std::uint64_t master, std::size_t shot);

// (2pi)^{3/2} A_p exp(-|x|^2/w0^2 - t^2/tau0^2) at depth z (units of l_c).
// The z dependence is the pump's own linear propagation when pump.propagate
// is set; otherwise the envelope is quasi-static.
FieldLattice pump_field(double z, const PumpConfig& pump, const DerivedScales& d,
                        const GridConfig& grid);

// Split-step integrator of the coupled signal/idler equations with a
// classical pump. Phase factors and the coupling lattice are built once and
// shared read-only by concurrent shots.
class CrystalPropagator {
 public:
  CrystalPropagator(const DerivedScales& d, const PumpConfig& pump, const GridConfig& grid);
  // Advances a position-domain state from z = 0 to z = l_c.
  void propagate(ShotState& state) const;
  std::size_t steps() const { return nz_; }

 private:
  struct Coupling {
    rvec ch;
    cvec sh;
  };
  Coupling coupling_at(double z) const;
  void nonlinear_step(ShotState& s, const Coupling& c) const;

  DerivedScales d_;
  PumpConfig pump_;
  GridConfig grid_;
  Shape shape_;
  std::size_t nz_;
  double h_;
  cvec half_[2], full_[2], last_[2];
  Coupling static_coupling_;
};

void propagate_crystal(ShotState& state, const PumpConfig& pump, const DerivedScales& d,
                       const GridConfig& grid);

// Exact per-mode input-output relation of the plane-wave cw limit,
//   a_i^out(q,W) = U_i a_i^in(q,W) + V_i conj(a_j^in(-q,-W)).
// Refuses (ConfigError) unless the pump is plane-wave and cw.
void spwpa_output(ShotState& state, const GainTable& gain, const PumpConfig& pump);

// Throws NumericError when any amplitude of the state is not finite.
void check_finite(const ShotState& state);

// Human-readable warnings about grid adequacy (walk-off vs window, etc.).
std::vector<std::string> preflight_warnings(const GridConfig& grid, const DerivedScales& d,
                                            const PumpConfig& pump);

}  // namespace ghost
