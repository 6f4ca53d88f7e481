#pragma once

#include <string>
#include <vector>

#include "ghost/config.hpp"
#include "ghost/gain.hpp"
#include "ghost/homodyne.hpp"
#include "ghost/lattice.hpp"

namespace ghost {

enum class TemporalMode { Cw, Pulsed };

// Weight W(q) that replaces G(q, 0) once the two LOs are integrated over
// time: T_d G(q, 0) for cw LOs, and
//   sum_W dW alpha1~(-W) alpha2~(W) G(q, W)
// over the supplied detuning grid for pulsed LOs.
class TemporalFactor {
 public:
  // Throws ConfigError when t_d <= 1 (detection window shorter than tau_coh).
  static TemporalFactor cw(const DerivedScales& d, double t_d);
  static TemporalFactor pulsed(const DerivedScales& d, const LocalOscillator& lo1,
                               const LocalOscillator& lo2, std::vector<double> omegas,
                               double domega);
  // Detuning grid of a lattice with nt points and temporal extent extent_t.
  static std::vector<double> lattice_omegas(std::size_t nt, double extent_t);

  cplx weight(double qx) const;
  TemporalMode mode() const { return mode_; }

 private:
  TemporalMode mode_ = TemporalMode::Cw;
  DerivedScales d_;
  double t_d_ = 1.0;
  std::vector<double> omegas_;
  std::vector<cplx> lo_weights_;  // dW alpha1~(-W) alpha2~(W)
};

enum class OracleMode { Exact, Plateau };
enum class OracleGeometry { PointFar, PointNear, Point2f, BucketNear, BucketFar, ConvolutionFar };

// Optional Gaussian factor exp(-(x - center)^2 / waist^2); waist <= 0 is off.
struct GaussianWeight {
  double center = 0.0;
  double waist = 0.0;
  double operator()(double x) const;
};

struct OracleInputs {
  DerivedScales scales;
  TemporalFactor temporal;
  LocalOscillator signal;
  LocalOscillator idler;
  double focal_shift = 0.0;       // idler focal shift, l_c units
  ComplexMap object;              // near-field (point-like) or far-field (bucket) mask
  GaussianWeight object_weight;   // multiplies the object (finite illumination)
  GaussianWeight scan_weight;     // multiplies the curve along the scanned coordinate
  // Near-field envelope w(x) of the pair amplitude (finite pump). Bucket-near
  // pairs q1 with q2 through exp(-p^2 w^2/4 - i p c), p = q1 + q2, instead of
  // the plane-wave q1 = -q2.
  GaussianWeight pair_envelope;
  OracleMode mode = OracleMode::Exact;
  double refine_tolerance = 1e-8;
};

struct OracleCurve {
  RealMap values;
  std::vector<cplx> amplitude;   // complex correlation before taking 2 Re[...]
  OracleGeometry geometry = OracleGeometry::PointFar;
  OracleMode mode = OracleMode::Exact;
  bool focal_shift = false;
  bool tilt = false;
  double quadrature_error = 0.0;  // relative change under q-grid halving
  bool converged = true;
};

// Scan over the far-field idler lattice for a signal pixel at far coordinate x1.
OracleCurve oracle_pointlike_far(const OracleInputs& in, double x1, std::size_t nx,
                                 double far_pitch);
// Same correlation scanned over the signal pixel x1 for a fixed idler pixel x2.
OracleCurve oracle_pointlike_far_scan(const OracleInputs& in, double x2, std::size_t nx,
                                      double far_pitch);
// Scan over the near-field idler lattice (telescope).
OracleCurve oracle_pointlike_near(const OracleInputs& in, double x1, std::size_t nx,
                                  double near_pitch);
// 2f-2f idler: telescope result evaluated at -x2 with the lens phase folded in.
OracleCurve oracle_pointlike_2f(const OracleInputs& in, double x1, std::size_t nx,
                                double near_pitch);
// Bucket signal detector, object at the signal far-field plane.
OracleCurve oracle_bucket_near(const OracleInputs& in, std::size_t nx, double far_pitch);
OracleCurve oracle_bucket_far(const OracleInputs& in, std::size_t nx, double near_pitch);
// Sum of the far-field point-like curves over the signal pixel at fixed
// x = x1 + x2 (the spatial-average estimator), on the far lattice.
OracleCurve oracle_convolution_far(const OracleInputs& in, std::size_t nx, double far_pitch);

// Moment fit of a Gaussian exp(-(x - c)^2 / w^2) to a non-negative 1-D
// profile, using the samples above 5% of its maximum.
GaussianWeight fit_gaussian(const RealMap& profile);

std::string to_string(OracleGeometry g);

}  // namespace ghost
