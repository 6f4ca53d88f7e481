#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ghost/config_file.hpp"
#include "ghost/correlator.hpp"
#include "ghost/errors.hpp"
#include "ghost/optics.hpp"
#include "ghost/oracle.hpp"

using namespace ghost;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kN = 512;

struct Bench {
  ExperimentConfig cfg = reference_config();
  DerivedScales d = derive_scales(cfg.crystal, cfg.optics.focal_length);
  PhaseExpansion e = phase_expansion(cfg.crystal, d);
  double near_pitch = cfg.grid.dx();
  double far_pitch = 2.0 * kPi / cfg.grid.extent_x;
  double x1 = std::round(-d.q_c_hat / far_pitch) * far_pitch;

  OracleInputs inputs(const ObjectMask& m) const {
    OracleInputs in;
    in.scales = d;
    in.temporal = TemporalFactor::cw(d, cfg.grid.detection_window);
    in.object = m.t;
    in.signal.beam = Beam::Signal;
    in.idler.beam = Beam::Idler;
    return in;
  }
  ObjectMask slit(bool phase = false) const {
    SlitParams p;
    p.phase = phase;
    return make_double_slit(kN, 1, near_pitch, Plane::Near, p);
  }
};

double rel_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

// reconstruct(pf pair) equals the pT pair when psi_T = psi_f + pi/2 and no tilts.
TEST(Oracle, InverseTransformDuality) {
  Bench b;
  for (bool shift : {false, true})
    for (bool weight : {false, true}) {
      OracleInputs in = b.inputs(b.slit());
      if (shift) in.focal_shift = b.d.focal_shift_hat;
      if (weight) in.object_weight = {1.0, 30.0};
      in.signal.psi = 0.3;
      const double psi_f = 1.1;
      in.idler.psi = psi_f;
      const RealMap fr = oracle_pointlike_far(in, b.x1, kN, b.far_pitch).values;
      in.idler.psi = psi_f + 0.5 * kPi;
      const RealMap fi = oracle_pointlike_far(in, b.x1, kN, b.far_pitch).values;
      const RealMap nr = oracle_pointlike_near(in, b.x1, kN, b.near_pitch).values;
      in.idler.psi = psi_f + kPi;
      const RealMap ni = oracle_pointlike_near(in, b.x1, kN, b.near_pitch).values;
      const ComplexMap r = reconstruct_nearfield(fr, fi);
      ASSERT_NEAR(r.pitch, b.near_pitch, 1e-12);
      std::vector<cplx> got(kN), want(kN);
      for (std::size_t i = 0; i < kN; ++i) {
        got[i] = r(i);
        want[i] = cplx(nr(i), ni(i));
      }
      EXPECT_LT(rel_diff(got, want), 1e-6) << shift << weight;
    }
}

TEST(Oracle, OpenObjectIsDeltaAtAntiDiagonal) {
  Bench b;
  const ObjectMask open = make_open_mask(kN, 1, b.near_pitch, Plane::Near);
  const OracleCurve c = oracle_pointlike_far(b.inputs(open), b.x1, kN, b.far_pitch);
  std::size_t best = 0;
  for (std::size_t i = 0; i < kN; ++i)
    if (std::abs(c.amplitude[i]) > std::abs(c.amplitude[best])) best = i;
  EXPECT_EQ(best, fft_index(std::lround(-b.x1 / b.far_pitch), kN));
  double rest = 0.0;
  for (std::size_t i = 0; i < kN; ++i)
    if (i != best) rest = std::max(rest, std::abs(c.amplitude[i]));
  EXPECT_LT(rest, 1e-9 * std::abs(c.amplitude[best]));
}

// With the phase forced flat the far-field curve is |G| Re T~ up to constants.
TEST(Oracle, FlatPhaseReducesToModulusTimesSpectrum) {
  Bench b;
  OracleInputs in = b.inputs(b.slit());
  const OracleCurve c = oracle_pointlike_far(in, b.x1, kN, b.far_pitch);
  const ObjectMask m = b.slit();
  for (std::size_t i = 0; i < kN; i += 7) {
    const double q2 = fft_coord(i, kN) * b.far_pitch;
    const cplx expect = -std::abs(in.temporal.weight(-q2)) / std::sqrt(2.0 * kPi) *
                        mask_spectrum(m.t, b.x1 + q2) *
                        std::polar(1.0, std::arg(in.temporal.weight(-q2)));
    EXPECT_NEAR(std::abs(c.amplitude[i] - expect), 0.0, 1e-9 * (1.0 + std::abs(expect)));
  }
  EXPECT_EQ(c.geometry, OracleGeometry::PointFar);
  EXPECT_FALSE(c.focal_shift);
  EXPECT_FALSE(c.tilt);
}

TEST(Oracle, LinearInLoAmplitudesAndWindow) {
  Bench b;
  OracleInputs in = b.inputs(b.slit());
  const RealMap base = oracle_pointlike_far(in, b.x1, kN, b.far_pitch).values;
  in.signal.amplitude = 2.0;
  in.idler.amplitude = 1.5;
  const RealMap scaled = oracle_pointlike_far(in, b.x1, kN, b.far_pitch).values;
  in.temporal = TemporalFactor::cw(b.d, 2.0 * b.cfg.grid.detection_window);
  const RealMap longer = oracle_pointlike_far(in, b.x1, kN, b.far_pitch).values;
  for (std::size_t i = 0; i < kN; ++i) {
    EXPECT_NEAR(scaled(i), 3.0 * base(i), 1e-9 * (1.0 + std::abs(base(i))));
    EXPECT_NEAR(longer(i), 6.0 * base(i), 1e-9 * (1.0 + std::abs(base(i))));
  }
}

TEST(Oracle, ShortWindowIsUnsupported) {
  Bench b;
  EXPECT_THROW(TemporalFactor::cw(b.d, 0.5), ConfigError);
}

// Long Gaussian LOs: sum dW a1(-W) a2(W) G(q, W) -> G(q, 0) \int e1 e2 dt.
TEST(Oracle, PulsedFactorLongPulseLimit) {
  Bench b;
  LocalOscillator lo;
  lo.temporal = TemporalProfile::Gaussian;
  lo.duration = 200.0;
  const std::size_t nt = 4096;
  const double extent = 4000.0;
  const TemporalFactor f = TemporalFactor::pulsed(b.d, lo, lo, TemporalFactor::lattice_omegas(nt, extent),
                                                  2.0 * kPi / extent);
  EXPECT_EQ(f.mode(), TemporalMode::Pulsed);
  const double overlap = lo.duration * std::sqrt(kPi / 2.0);
  for (double q : {-b.d.q_c_hat, -8.0, -9.5}) {
    const cplx g = gain_G(b.d, q, 0.0, 0.0) * overlap;
    EXPECT_LT(std::abs(f.weight(q) - g), 2e-3 * std::abs(g)) << q;
  }
}

TEST(Oracle, PulsedFactorWithoutOverlapVanishes) {
  Bench b;
  LocalOscillator a, c;
  a.temporal = c.temporal = TemporalProfile::Gaussian;
  a.duration = c.duration = 1.0;
  c.delay = 12.0;
  const TemporalFactor f = TemporalFactor::pulsed(b.d, a, c, TemporalFactor::lattice_omegas(256, 64.0),
                                                  2.0 * kPi / 64.0);
  LocalOscillator same = c;
  same.delay = 0.0;
  const TemporalFactor g = TemporalFactor::pulsed(b.d, a, same, TemporalFactor::lattice_omegas(256, 64.0),
                                                  2.0 * kPi / 64.0);
  EXPECT_LT(std::abs(f.weight(-b.d.q_c_hat)), 1e-6 * std::abs(g.weight(-b.d.q_c_hat)));
  LocalOscillator cw;
  EXPECT_THROW(TemporalFactor::pulsed(b.d, a, cw, {0.0}, 1.0), ConfigError);
}

// Near-field quadrature: halving the q spacing leaves the curve unchanged.
TEST(Oracle, NearFieldRefinement) {
  Bench b;
  OracleInputs in = b.inputs(b.slit());
  in.focal_shift = b.d.focal_shift_hat;
  in.idler.tilt = -b.x1;
  const OracleCurve c = oracle_pointlike_near(in, b.x1, kN, b.near_pitch);
  EXPECT_EQ(c.mode, OracleMode::Exact);
  EXPECT_LE(c.quadrature_error, 1e-8);
  EXPECT_TRUE(c.converged);
}

TEST(Oracle, BucketFarRefinement) {
  Bench b;
  SlitParams p;
  p.phase = true;
  p.shift = std::round(-b.d.q_c_hat / b.far_pitch);
  const ObjectMask m = make_double_slit(kN, 1, b.far_pitch, Plane::Far, p);
  OracleInputs in = b.inputs(m);
  in.signal.waist = 2.0;
  in.signal.center = -b.d.q_c_hat;
  const OracleCurve c = oracle_bucket_far(in, kN, b.near_pitch);
  EXPECT_LE(c.quadrature_error, 1e-8);
  EXPECT_TRUE(c.converged);
}

// Open far-field object: the bucket-near curve is the |G| envelope times the LO moduli.
TEST(Oracle, BucketNearOpenObjectIsGainEnvelope) {
  Bench b;
  const ObjectMask open = make_open_mask(kN, 1, b.far_pitch, Plane::Far);
  OracleInputs in = b.inputs(open);
  in.signal.waist = 2.0;
  in.signal.center = -b.d.q_c_hat;
  const OracleCurve c = oracle_bucket_near(in, kN, b.far_pitch);
  for (std::size_t i = 0; i < kN; i += 5) {
    const double q2 = fft_coord(i, kN) * b.far_pitch;
    const double env = std::abs(in.temporal.weight(-q2)) * in.signal.modulus(-q2, 0.0);
    EXPECT_NEAR(std::abs(c.amplitude[i]), env, 1e-9 * (1.0 + env));
  }
}

// One open far pixel at q1: the finite-pump curve is the pairing kernel
// exp(-p^2 w^2/4 - i p c) around q2 = -q1, times the pixel's own weight.
TEST(Oracle, BucketNearPairEnvelopeKernel) {
  Bench b;
  ObjectMask dot = make_open_mask(kN, 1, b.far_pitch, Plane::Far);
  const long k1 = -150;
  for (std::size_t i = 0; i < kN; ++i) dot.t(i) = i == fft_index(k1, kN) ? 1.0 : 0.0;
  OracleInputs in = b.inputs(dot);
  in.pair_envelope = {-3.6, 16.6};
  const OracleCurve c = oracle_bucket_near(in, kN, b.far_pitch);
  const double q1 = k1 * b.far_pitch;
  const cplx s = -std::conj(in.signal.spatial(q1, 0.0)) * in.temporal.weight(q1);
  const double norm = b.far_pitch * 16.6 / (2.0 * std::sqrt(kPi));
  for (long k2 = 130; k2 <= 170; ++k2) {
    const double p = q1 + k2 * b.far_pitch;
    const cplx want = s * norm * std::polar(std::exp(-0.25 * p * p * 16.6 * 16.6), 3.6 * p);
    EXPECT_LT(std::abs(c.amplitude[fft_index(k2, kN)] - want), 1e-12 * std::abs(s)) << k2;
  }
  // no envelope: plane-wave pairing q2 = -q1 only
  in.pair_envelope = {};
  const OracleCurve flat = oracle_bucket_near(in, kN, b.far_pitch);
  EXPECT_NEAR(std::abs(flat.amplitude[fft_index(-k1, kN)] - s), 0.0, 1e-12 * std::abs(s));
  EXPECT_EQ(flat.amplitude[fft_index(-k1 + 1, kN)], cplx(0.0));
}

// Plateau forms agree with the exact integrals inside the gain plateau.
TEST(Oracle, PlateauModeAgreesInsidePlateau) {
  Bench b;
  SlitParams p;
  p.shift = std::round(-b.d.q_c_hat / b.far_pitch);
  p.a = 5.0;
  p.d = 11.0;
  const ObjectMask m = make_double_slit(kN, 1, b.far_pitch, Plane::Far, p);
  OracleInputs in = b.inputs(m);
  // optimised setup: focal shift removes the quadratic gain phase, the signal
  // LO tilt the linear one
  in.focal_shift = b.d.focal_shift_hat;
  in.signal.tilt = b.e.phi1_x;
  const OracleCurve exact = oracle_bucket_far(in, kN, b.near_pitch);
  in.mode = OracleMode::Plateau;
  const OracleCurve plateau = oracle_bucket_far(in, kN, b.near_pitch);
  EXPECT_EQ(plateau.mode, OracleMode::Plateau);
  const Comparison cmp = compare_pair_peak(exact.values.values, rvec(kN, 0.0),
                                           plateau.values.values, rvec(kN, 0.0), {});
  EXPECT_LT(cmp.rel_l2, 0.25);
}

TEST(Oracle, ConvolutionEqualsSumOfPointCurves) {
  Bench b;
  OracleInputs in = b.inputs(b.slit());
  in.signal.waist = 3.0;
  in.signal.center = b.x1;
  in.idler.psi = 0.7;
  // direct: sum over x1 of the point-like amplitude at x2 = x - x1
  ObjectMask small = make_double_slit(64, 1, b.near_pitch, Plane::Near, SlitParams{4, 9, 5});
  in.object = small.t;
  const OracleCurve conv_small = oracle_convolution_far(in, 64, 2.0 * kPi / (64 * b.near_pitch));
  const double fp = 2.0 * kPi / (64 * b.near_pitch);
  std::vector<cplx> direct(64, cplx(0.0));
  for (std::size_t i1 = 0; i1 < 64; ++i1) {
    const double x1 = fft_coord(i1, 64) * fp;
    const OracleCurve pc = oracle_pointlike_far(in, x1, 64, fp);
    for (std::size_t i2 = 0; i2 < 64; ++i2) direct[(i1 + i2) % 64] += fp * pc.amplitude[i2];
  }
  EXPECT_LT(rel_diff(conv_small.amplitude, direct), 1e-10);
  EXPECT_EQ(conv_small.geometry, OracleGeometry::ConvolutionFar);
}

TEST(Oracle, GaussianFitRecoversParameters) {
  RealMap p(512, 1, 0.25, Plane::Near);
  for (std::size_t i = 0; i < 512; ++i) {
    const double x = fft_coord(i, 512) * 0.25;
    p(i) = 3.0 * std::exp(-(x - 4.0) * (x - 4.0) / (20.0 * 20.0));
  }
  const GaussianWeight g = fit_gaussian(p);
  EXPECT_NEAR(g.center, 4.0, 1e-3);
  EXPECT_NEAR(g.waist, 20.0, 0.05);
  EXPECT_DOUBLE_EQ(g(4.0), 1.0);
  EXPECT_EQ(GaussianWeight{}(7.0), 1.0);
}

TEST(Oracle, RejectsTwoDimensionalObjects) {
  Bench b;
  const ObjectMask m = make_open_mask(16, 16, 1.0, Plane::Near);
  EXPECT_THROW(oracle_pointlike_far(b.inputs(m), 0.0, 16, 1.0), ConfigError);
  EXPECT_EQ(to_string(OracleGeometry::BucketFar), "bucket-far");
}
