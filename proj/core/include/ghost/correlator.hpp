#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "ghost/lattice.hpp"

namespace ghost {

enum class Geometry { FixedX1, ScanX1, Bucket, Convolution };
enum class Quadrature { Real, Imag };
enum class Padding { Periodic, Zero };

// Pixelwise running mean and M2 of per-shot correlation samples.
class CorrelationEstimate {
 public:
  CorrelationEstimate() = default;
  CorrelationEstimate(std::size_t nx, std::size_t ny, double pitch, Plane plane, Geometry g,
                      Quadrature q);

  void push(const rvec& sample);
  // Parallel combination of two independent estimates (Chan et al.).
  void merge(const CorrelationEstimate& other);

  std::size_t count() const { return n_; }
  const rvec& mean() const { return mean_; }
  const rvec& m2() const { return m2_; }
  // Standard error of the mean per pixel; NaN while count < 2.
  rvec standard_error() const;
  RealMap mean_map() const;
  RealMap error_map() const;

  std::size_t nx = 0;
  std::size_t ny = 1;
  double pitch = 1.0;
  Plane plane = Plane::Far;
  Geometry geometry = Geometry::FixedX1;
  Quadrature quadrature = Quadrature::Real;

 private:
  std::size_t n_ = 0;
  rvec mean_;
  rvec m2_;
};

// Z1(x1) Z2(x2) over x2 (FixedX1), or Z2(x2) Z1(x1) over x1 (ScanX1, with
// `pixel` naming the fixed idler pixel).
rvec fixed_sample(const RealMap& z1, const RealMap& z2, std::size_t pixel, bool scan_x1 = false);
// [sum_x1 Z1(x1) dx^d] Z2(x2).
rvec bucket_sample(const RealMap& z1, const RealMap& z2);
// sum_x1 Z1(x1) Z2(x - x1) dx^d over x = x1 + x2, by FFT. Periodic keeps
// the lattice's wrap-around; Zero pads to 2N and keeps the central window.
rvec convolution_sample(const RealMap& z1, const RealMap& z2, Padding padding);

void accumulate_fixed(CorrelationEstimate& est, const RealMap& z1, const RealMap& z2,
                      std::size_t pixel);
void accumulate_bucket(CorrelationEstimate& est, const RealMap& z1, const RealMap& z2);
void accumulate_convolution(CorrelationEstimate& est, const RealMap& z1, const RealMap& z2,
                            Padding padding = Padding::Periodic);

// Unitary inverse transform of p_re + i p_im from far-field (x_f) to
// near-field (x_coh) coordinates.
ComplexMap reconstruct_nearfield(const RealMap& p_re, const RealMap& p_im);

// Region of interest: pixel mask over a map, empty meaning the full grid.
using Region = std::vector<bool>;

struct Comparison {
  double rel_l2 = 0.0;       // ||a/na - b/nb|| / ||b/nb|| over the region
  double max_abs_z = 0.0;    // when standard errors are available
  double scale_estimate = 1.0;
  double scale_reference = 1.0;
  std::size_t pixels = 0;
};

// Peak normalisation: each curve divided by its own max |value| in the region.
Comparison compare_peak(const rvec& estimate, const rvec& reference, const Region& region,
                        const rvec* standard_error = nullptr);
// Quadrature pair: both components of a curve share the peak of the modulus.
Comparison compare_pair_peak(const rvec& est_re, const rvec& est_im, const rvec& ref_re,
                             const rvec& ref_im, const Region& region);

struct ConvergenceReport {
  std::size_t shots = 0;
  bool defined = false;       // false for fewer than two shots
  rvec standard_error;
  double rms_standard_error = std::numeric_limits<double>::quiet_NaN();
  bool has_reference = false;
  double rel_error = std::numeric_limits<double>::quiet_NaN();
  double noise_fraction = std::numeric_limits<double>::quiet_NaN();
  double bias_fraction = std::numeric_limits<double>::quiet_NaN();
  // shots at which rel_error would reach `threshold` assuming 1/sqrt(N) noise
  double shots_to_threshold = std::numeric_limits<double>::quiet_NaN();
};

ConvergenceReport convergence_report(const CorrelationEstimate& est, const rvec* reference,
                                     const Region& region, double threshold);

}  // namespace ghost
