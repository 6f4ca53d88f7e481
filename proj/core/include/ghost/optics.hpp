#pragma once

#include <string>
#include <vector>

#include "ghost/config.hpp"
#include "ghost/lattice.hpp"

namespace ghost {

enum class MaskKind { None, AmplitudeSlit, PhaseSlit, Bitmap };

// How a continuous slit edge maps onto lattice cells.
//   Point: pixel n is open when A <= n < B (values stay in {0,1} / {-1,1}).
//   Coverage: pixel n carries the open fraction of [n - 1/2, n + 1/2).
enum class MaskSampling { Point, Coverage };

// Double slit in lattice pixels: width a, center separation d, shift of the
// pair center from the origin.
struct SlitParams {
  double a = 9.0;
  double d = 33.0;
  double shift = 23.0;
  bool phase = false;
  MaskSampling sampling = MaskSampling::Point;
};

struct ObjectMask {
  ComplexMap t;
  MaskKind kind = MaskKind::None;
  SlitParams slit;
};

// Fails with ConfigError when a >= d or a slit leaves the grid. Slits run
// along x; in 3+1D they are stripes constant in y.
ObjectMask make_double_slit(std::size_t nx, std::size_t ny, double pitch, Plane plane,
                            const SlitParams& p);

ObjectMask make_open_mask(std::size_t nx, std::size_t ny, double pitch, Plane plane);

// Continuum spectrum of the amplitude double slit,
//   a sqrt(2/pi) e^{-i shift q} cos(q d / 2) sinc(q a / 2),
// with a, d, shift in plane units and q in reciprocal plane units.
cplx slit_spectrum(double q, double a, double d, double shift);

// Closed-form unitary DFT of the sampled 1-D slit produced by
// make_double_slit, at arbitrary q. Equals the FFT of the mask on grid points.
cplx slit_spectrum_lattice(double q, const SlitParams& p, double pitch, std::size_t nx);

// Grayscale PGM (P2/P5) or PNG mask, normalised to [0,1], centered on the
// origin and zero padded. threshold < 0 keeps the gray levels, otherwise
// pixels >= threshold become 1 and the rest 0.
ObjectMask load_bitmap_mask(const std::string& path, double threshold, std::size_t nx,
                            std::size_t ny, double pitch, Plane plane);

// Unitary Fourier spectrum of any mask, evaluated at arbitrary q by direct
// summation (trigonometric polynomial of the lattice samples). 1-D masks.
cplx mask_spectrum(const ComplexMap& t, double q);

// Lens f-f: c(k) = -i (2pi)^{-d/2} \int dx a(x) e^{-i k x}; plane toggles
// between near (x_coh) and far (x_f) coordinates with reciprocal pitch.
void apply_ff(FieldLattice& field);

// Telescope relay: identity.
void apply_telescope(FieldLattice& field);

// 2f-2f imaging: a(x) -> e^{-i r |x|^2 / 2} a(-x) with r = x_coh / x_f.
void apply_2f2f(FieldLattice& field, double near_far_ratio);

void apply_object(FieldLattice& field, const ObjectMask& mask);

// Fresnel factor e^{-i dz_hat fresnel |q|^2} on a Fourier-domain field; with
// dz_hat from derive_scales it cancels the quadratic gain phase.
void apply_focal_shift(FieldLattice& field, double dz_hat, double fresnel);

enum class ElementKind { FF, TwoF, Telescope, Object, FocalShift };

struct OpticalElement {
  ElementKind kind;
  double focal_shift = 0.0;  // l_c units, FocalShift only
};

struct OpticalPath {
  Beam beam = Beam::Signal;
  std::vector<OpticalElement> elements;
  double fresnel = 0.0;
  double near_far_ratio = 0.0;

  bool has_focal_shift() const;
  Plane output_plane() const;
  // Checks the element order against the supported arm layouts.
  void validate() const;
  // Runs the elements in order on a position-domain crystal-exit field.
  void apply(FieldLattice& field, const ObjectMask* mask) const;
};

OpticalPath pointlike_test_arm(const DerivedScales& d);
OpticalPath bucket_test_arm(const DerivedScales& d);
OpticalPath reference_arm_ff(const DerivedScales& d, bool focal_shift);
OpticalPath reference_arm_telescope(const DerivedScales& d, bool focal_shift);
OpticalPath reference_arm_2f(const DerivedScales& d);

}  // namespace ghost
