#include "ghost/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>

#include <boost/version.hpp>
#include <fftw3.h>
#include <json.hpp>

#include "ghost/array_io.hpp"
#include "ghost/errors.hpp"

namespace ghost {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kEnvelopeShots = 8;
constexpr std::size_t kEnvelopeStream = std::size_t{1} << 40;

double lattice_x(std::size_t i, std::size_t n, double pitch) {
  return static_cast<double>(fft_coord(i, n)) * pitch;
}

LocalOscillator make_lo(Beam beam, const LoSettings& s, double tau_pump) {
  LocalOscillator lo;
  lo.beam = beam;
  lo.amplitude = s.amplitude;
  lo.waist = s.waist;
  lo.center = s.center.value_or(0.0);
  lo.psi = s.psi;
  lo.tilt = s.tilt;
  lo.temporal = s.temporal;
  lo.duration = s.duration.value_or(tau_pump);
  return lo;
}

std::string quad_name(Quadrature q) { return q == Quadrature::Real ? "re" : "im"; }

std::string estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::Fixed: return "fixed";
    case EstimatorKind::ScanX1: return "scan";
    case EstimatorKind::Bucket: return "bucket";
    case EstimatorKind::Convolution: return "convolution";
  }
  return "?";
}

std::string plane_unit(Plane p) { return p == Plane::Near ? "x_coh" : "x_f"; }

}  // namespace

unsigned resolve_threads(unsigned requested) {
  if (const char* env = std::getenv("GHOSTSIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) throw ConfigError("GHOSTSIM_THREADS must be a count");
    requested = static_cast<unsigned>(v);
  }
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

Experiment::Experiment(const ExperimentConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  scales_ = derive_scales(cfg_.crystal, cfg_.optics.focal_length);
  expansion_ = phase_expansion(cfg_.crystal, scales_);
  if (cfg_.run.vacuum_only) return;
  if (cfg_.run.propagator == PropagatorKind::SplitStep) {
    propagator_ = std::make_unique<CrystalPropagator>(scales_, cfg_.pump, cfg_.grid);
  } else {
    const auto& g = cfg_.grid;
    gain_ = std::make_unique<GainTable>(scales_, Shape{g.nx, g.ny, g.nt}, far_pitch(),
                                        g.time_off() ? 0.0 : 2.0 * kPi / g.extent_t);
  }
}

double Experiment::far_pitch() const { return 2.0 * kPi / cfg_.grid.extent_x; }

std::size_t Experiment::far_index(double x) const {
  return fft_index(std::lround(x / far_pitch()), cfg_.grid.nx);
}

Setup Experiment::make_setup(const OpticsConfig& optics, const LoSettings& sig,
                             const LoSettings& idl) const {
  const auto& g = cfg_.grid;
  const DerivedScales& d = scales_;
  const PhaseExpansion& e = expansion_;
  const double fp = far_pitch();
  Setup s;
  s.geometry = optics.geometry;
  const bool bucket = is_bucket(s.geometry);

  const Plane object_plane = bucket ? Plane::Far : Plane::Near;
  const double object_pitch = bucket ? fp : near_pitch();
  s.object_shift =
      optics.shift.value_or(bucket ? static_cast<double>(std::lround(-d.q_c_hat / fp)) : 23.0);
  SlitParams slit = optics.slit;
  slit.shift = s.object_shift;
  switch (optics.object) {
    case ObjectKind::AmplitudeSlit:
      slit.phase = false;
      s.mask = make_double_slit(g.nx, g.ny, object_pitch, object_plane, slit);
      break;
    case ObjectKind::PhaseSlit:
      slit.phase = true;
      s.mask = make_double_slit(g.nx, g.ny, object_pitch, object_plane, slit);
      break;
    case ObjectKind::Open:
      s.mask = make_open_mask(g.nx, g.ny, object_pitch, object_plane);
      break;
    case ObjectKind::Bitmap:
      s.mask = load_bitmap_mask(optics.mask_path, optics.mask_threshold, g.nx, g.ny, object_pitch,
                                object_plane);
      break;
  }

  s.test = bucket ? bucket_test_arm(d) : pointlike_test_arm(d);
  switch (s.geometry) {
    case ArmGeometry::PointFar:
    case ArmGeometry::BucketNear:
      s.reference = reference_arm_ff(d, optics.focal_shift);
      break;
    case ArmGeometry::PointNear:
    case ArmGeometry::BucketFar:
      s.reference = reference_arm_telescope(d, optics.focal_shift);
      break;
    case ArmGeometry::Point2f:
      s.reference = reference_arm_2f(d);
      break;
  }

  const std::size_t ix1 = far_index(optics.x1.value_or(-d.q_c_hat));
  s.x1 = lattice_x(ix1, g.nx, fp);
  s.x1_pixel = ix1 * g.ny;

  const double tau_pump = cfg_.pump.duration / d.tau_coh;
  s.signal = make_lo(Beam::Signal, sig, tau_pump);
  if (bucket && sig.waist > 0.0 && !sig.center) s.signal.center = -d.q_c_hat;
  if (sig.temporal == TemporalProfile::Gaussian && sig.delay) s.signal.delay = lo_temporal_delay(e);

  s.idler_re = make_lo(Beam::Idler, idl, tau_pump);
  if (!idl.manual_phase) {
    const bool opt = optics.optimized;
    const bool shift = optics.focal_shift;
    const double phi_center = std::arg(gain_G(d, -d.q_c_hat, 0.0, 0.0));
    const double phi_x1 = std::arg(gain_G(d, s.x1, 0.0, 0.0));
    const double signal_phase = s.signal.phase(s.x1);
    PhaseLaw law;
    switch (s.geometry) {
      case ArmGeometry::PointFar:
        law = lo_phase_farfield(e, phi_center, signal_phase, opt, shift);
        break;
      case ArmGeometry::PointNear:
        law = lo_phase_nearfield(e, phi_x1, s.x1, signal_phase, opt, shift);
        break;
      case ArmGeometry::Point2f:
        // image inverted by the 2f-2f relay: the telescope law mirrored in x2
        law = lo_phase_nearfield(e, phi_x1, s.x1, signal_phase, false, false);
        law.tilt = -law.tilt;
        break;
      case ArmGeometry::BucketNear:
        law = lo_phase_bucket(e, phi_center, BucketVariant::Near, s.signal, opt, shift);
        break;
      case ArmGeometry::BucketFar: {
        law = lo_phase_bucket(e, phi_center, BucketVariant::Far, s.signal, opt, shift);
        // cancel the carrier e^{-i s x2} of an object centred at s in the far field
        const double center = s.object_shift * fp;
        law.tilt = -center;
        law.psi -= center * (s.signal.tilt - (opt ? e.phi1_x : 0.0));
        break;
      }
    }
    s.idler_re.psi = law.psi;
    s.idler_re.tilt = law.tilt;
  }
  s.idler_im = s.idler_re;
  s.idler_im.psi += 0.5 * kPi;
  return s;
}

ShotState Experiment::crystal_exit(std::size_t shot) const {
  ShotState state = sample_vacuum(cfg_.grid, cfg_.run.seed, shot);
  if (cfg_.run.vacuum_only) return state;
  if (propagator_) propagator_->propagate(state);
  else spwpa_output(state, *gain_, cfg_.pump);
  check_finite(state);
  return state;
}

Quadratures Experiment::detect(const ShotState& state, const Setup& setup) const {
  FieldLattice sig = state.signal;
  setup.test.apply(sig, &setup.mask);
  FieldLattice idl = state.idler;
  setup.reference.apply(idl, nullptr);
  return {measure_quadrature(sig, setup.signal), measure_quadrature(idl, setup.idler_re),
          measure_quadrature(idl, setup.idler_im)};
}

rvec Experiment::sample(const Quadratures& q, const Setup& setup, EstimatorKind kind,
                        Quadrature quad, Padding padding) const {
  const RealMap& z2 = quad == Quadrature::Real ? q.z2_re : q.z2_im;
  switch (kind) {
    case EstimatorKind::Fixed:
      return fixed_sample(q.z1, z2, setup.x1_pixel);
    case EstimatorKind::ScanX1:
      return fixed_sample(q.z1, z2, mirror_index(setup.x1_pixel / cfg_.grid.ny, cfg_.grid.nx) * cfg_.grid.ny,
                          true);
    case EstimatorKind::Bucket:
      return bucket_sample(q.z1, z2);
    case EstimatorKind::Convolution:
      return convolution_sample(q.z1, z2, padding);
  }
  throw ConfigError("unknown estimator");
}

CorrelationEstimate Experiment::make_estimate(const Setup& setup, EstimatorKind kind,
                                              Quadrature quad) const {
  const auto& g = cfg_.grid;
  Plane plane = setup.reference.output_plane();
  if (kind == EstimatorKind::ScanX1) plane = setup.test.output_plane();
  const double pitch = plane == Plane::Far ? far_pitch() : near_pitch();
  Geometry geom = Geometry::FixedX1;
  if (kind == EstimatorKind::ScanX1) geom = Geometry::ScanX1;
  if (kind == EstimatorKind::Bucket) geom = Geometry::Bucket;
  if (kind == EstimatorKind::Convolution) geom = Geometry::Convolution;
  return CorrelationEstimate(g.nx, g.ny, pitch, plane, geom, quad);
}

void Experiment::fit_envelopes() const {
  std::call_once(envelope_once_, [this] {
    if (cfg_.pump.plane_wave || cfg_.run.vacuum_only) return;
    const auto& g = cfg_.grid;
    RealMap i1(g.nx, 1, near_pitch(), Plane::Near);
    RealMap i2 = i1;
    for (std::size_t k = 0; k < kEnvelopeShots; ++k) {
      const ShotState s = crystal_exit(kEnvelopeStream + k);
      for (std::size_t ix = 0; ix < g.nx; ++ix)
        for (std::size_t it = 0; it < g.nt; ++it) {
          const std::size_t idx = s.signal.index(ix, 0, it);
          i1(ix) += std::norm(s.signal[idx]);
          i2(ix) += std::norm(s.idler[idx]);
        }
    }
    for (RealMap* m : {&i1, &i2}) {
      const double floor = *std::min_element(m->values.begin(), m->values.end());
      for (double& v : m->values) v -= floor;
    }
    signal_env_ = fit_gaussian(i1);
    idler_env_ = fit_gaussian(i2);
  });
}

GaussianWeight Experiment::signal_envelope() const {
  fit_envelopes();
  return signal_env_;
}

GaussianWeight Experiment::idler_envelope() const {
  fit_envelopes();
  return idler_env_;
}

OracleInputs Experiment::oracle_inputs(const Setup& setup, Quadrature quad) const {
  const auto& g = cfg_.grid;
  OracleInputs in;
  in.scales = scales_;
  in.signal = setup.signal;
  in.idler = quad == Quadrature::Real ? setup.idler_re : setup.idler_im;
  const bool pulsed = cfg_.run.pulsed_oracle && !g.time_off() &&
                      in.signal.temporal == TemporalProfile::Gaussian &&
                      in.idler.temporal == TemporalProfile::Gaussian;
  in.temporal = pulsed ? TemporalFactor::pulsed(scales_, in.signal, in.idler,
                                                TemporalFactor::lattice_omegas(g.nt, g.extent_t),
                                                2.0 * kPi / g.extent_t)
                       : TemporalFactor::cw(scales_, g.detection_window);
  for (const auto& e : setup.reference.elements)
    if (e.kind == ElementKind::FocalShift) in.focal_shift = e.focal_shift;
  in.object = setup.mask.t;
  if (!is_bucket(setup.geometry)) in.object_weight = signal_envelope();
  if (setup.geometry == ArmGeometry::BucketFar) in.scan_weight = idler_envelope();
  // same finite-pump pairing, seen from the far field
  if (setup.geometry == ArmGeometry::BucketNear) in.pair_envelope = idler_envelope();
  return in;
}

OracleCurve Experiment::oracle(const Setup& setup, EstimatorKind kind, Quadrature quad,
                               OracleMode mode) const {
  const auto& g = cfg_.grid;
  if (g.ny > 1) throw ConfigError("oracle curves are available for 2+1D runs only");
  OracleInputs in = oracle_inputs(setup, quad);
  in.mode = mode;
  switch (setup.geometry) {
    case ArmGeometry::PointFar:
      if (kind == EstimatorKind::Convolution) return oracle_convolution_far(in, g.nx, far_pitch());
      if (kind == EstimatorKind::ScanX1)
        return oracle_pointlike_far_scan(in, -setup.x1, g.nx, far_pitch());
      return oracle_pointlike_far(in, setup.x1, g.nx, far_pitch());
    case ArmGeometry::PointNear:
      return oracle_pointlike_near(in, setup.x1, g.nx, near_pitch());
    case ArmGeometry::Point2f:
      return oracle_pointlike_2f(in, setup.x1, g.nx, near_pitch());
    case ArmGeometry::BucketNear:
      return oracle_bucket_near(in, g.nx, far_pitch());
    case ArmGeometry::BucketFar:
      return oracle_bucket_far(in, g.nx, near_pitch());
  }
  throw ConfigError("unknown geometry");
}

Region Experiment::plateau_region() const {
  const auto& g = cfg_.grid;
  const double fp = far_pitch();
  rvec mod(g.nx * g.ny);
  for (std::size_t ix = 0; ix < g.nx; ++ix)
    for (std::size_t iy = 0; iy < g.ny; ++iy)
      mod[ix * g.ny + iy] =
          std::abs(gain_G(scales_, -lattice_x(ix, g.nx, fp), -lattice_x(iy, g.ny, fp), 0.0));
  const double peak = *std::max_element(mod.begin(), mod.end());
  Region r(mod.size());
  for (std::size_t i = 0; i < mod.size(); ++i) r[i] = mod[i] >= 0.5 * peak;
  return r;
}

Region Experiment::comparison_region(const Setup& setup, EstimatorKind kind) const {
  if (!cfg_.estimator.plateau_region) return {};
  if ((setup.geometry == ArmGeometry::PointFar && kind == EstimatorKind::Fixed) ||
      setup.geometry == ArmGeometry::BucketNear)
    return plateau_region();
  return {};
}

std::string version_string() {
  return std::string("ghostsim 0.1.0; fftw ") + fftw_version + "; boost " +
         std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
         "; " + "gcc " + __VERSION__;
}

namespace {

struct Writer {
  fs::path dir;
  ArrayMeta base;
  std::vector<std::string> files;

  std::string path(const std::string& name) {
    const std::string p = (dir / name).string();
    files.push_back(p);
    return p;
  }
  void map(const std::string& name, const RealMap& m, const std::string& kind,
           std::map<std::string, std::string> tags = {}) {
    ArrayMeta meta = map_meta(m, plane_unit(m.plane));
    meta.tags.insert(base.tags.begin(), base.tags.end());
    meta.tags.insert(tags.begin(), tags.end());
    meta.tags["kind"] = kind;
    meta.shots = base.shots;
    meta.seed = base.seed;
    meta.config_hash = base.config_hash;
    write_array(path(name), meta, centered(m));
  }
};

rvec axis_values(std::size_t n, double pitch) {
  rvec x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = (static_cast<double>(k) - static_cast<double>(n / 2)) * pitch;
  return x;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  Experiment ex(cfg);
  const EstimatorKind kind = cfg.estimator.kind;
  const Setup setup = ex.make_setup();
  const unsigned threads = resolve_threads(cfg.run.threads);
  for (const auto& w : preflight_warnings(cfg.grid, ex.scales(), cfg.pump))
    if (log) *log << "warning: " << w << '\n';

  CorrelationEstimate est_re = ex.make_estimate(setup, kind, Quadrature::Real);
  CorrelationEstimate est_im = ex.make_estimate(setup, kind, Quadrature::Imag);
  using Pair = std::pair<rvec, rvec>;
  std::size_t done = 0;
  for_each_shot_ordered<Pair>(
      0, cfg.run.shots, threads,
      [&](std::size_t shot) {
        const Quadratures q = ex.detect(ex.crystal_exit(shot), setup);
        return Pair{ex.sample(q, setup, kind, Quadrature::Real, cfg.estimator.padding),
                    ex.sample(q, setup, kind, Quadrature::Imag, cfg.estimator.padding)};
      },
      [&](std::size_t, Pair& p) {
        est_re.push(p.first);
        est_im.push(p.second);
        ++done;
        if (log && cfg.run.shots >= 10 && done % (cfg.run.shots / 10) == 0)
          *log << "shots " << done << '/' << cfg.run.shots << '\n';
      });

  fs::create_directories(cfg.run.out);
  Writer w;
  w.dir = cfg.run.out;
  w.base.shots = cfg.run.shots;
  w.base.seed = cfg.run.seed;
  w.base.config_hash = config_hash(cfg);
  w.base.tags = {{"geometry", to_string(setup.geometry)}, {"estimator", estimator_name(kind)}};

  RunSummary summary;
  summary.shots = cfg.run.shots;
  const bool have_estimate = cfg.run.shots > 0;
  if (have_estimate) {
    w.map("estimate_re.gha", est_re.mean_map(), "estimate", {{"quadrature", "re"}});
    w.map("estimate_im.gha", est_im.mean_map(), "estimate", {{"quadrature", "im"}});
    if (est_re.count() >= 2) {
      w.map("stderr_re.gha", est_re.error_map(), "stderr", {{"quadrature", "re"}});
      w.map("stderr_im.gha", est_im.error_map(), "stderr", {{"quadrature", "im"}});
    }
  }

  const bool one_d = cfg.grid.ny == 1;
  std::optional<OracleCurve> or_re, or_im;
  if (cfg.run.oracle && one_d) {
    or_re = ex.oracle(setup, kind, Quadrature::Real);
    or_im = ex.oracle(setup, kind, Quadrature::Imag);
    w.map("oracle_re.gha", or_re->values, "oracle", {{"quadrature", "re"}});
    w.map("oracle_im.gha", or_im->values, "oracle", {{"quadrature", "im"}});
    if (!or_re->converged && log)
      *log << "warning: oracle quadrature not converged (" << or_re->quadrature_error << ")\n";
  } else if (cfg.run.oracle && log) {
    *log << "note: no oracle for 3+1D grids\n";
  }

  nlohmann::json report;
  report["geometry"] = to_string(setup.geometry);
  report["estimator"] = estimator_name(kind);
  report["shots"] = cfg.run.shots;
  const Region region = ex.comparison_region(setup, kind);
  if (have_estimate && or_re) {
    const rvec se_re = est_re.standard_error();
    const rvec se_im = est_im.standard_error();
    const bool se_ok = est_re.count() >= 2;
    summary.comparison =
        compare_pair_peak(est_re.mean(), est_im.mean(), or_re->values.values, or_im->values.values, region);
    const Comparison c_re = compare_peak(est_re.mean(), or_re->values.values, region, se_ok ? &se_re : nullptr);
    const Comparison c_im = compare_peak(est_im.mean(), or_im->values.values, region, se_ok ? &se_im : nullptr);
    summary.has_comparison = true;
    summary.passed = summary.comparison.rel_l2 <= cfg.run.tolerance;
    report["region"] = region.empty() ? "full" : "plateau";
    report["pixels"] = summary.comparison.pixels;
    report["rel_l2_pair"] = summary.comparison.rel_l2;
    report["rel_l2_re"] = c_re.rel_l2;
    report["rel_l2_im"] = c_im.rel_l2;
    report["max_abs_z_re"] = c_re.max_abs_z;
    report["max_abs_z_im"] = c_im.max_abs_z;
    report["tolerance"] = cfg.run.tolerance;
    report["pass"] = summary.passed;
    const ConvergenceReport conv =
        convergence_report(est_re, &or_re->values.values, region, cfg.estimator.threshold);
    report["rms_standard_error_re"] = conv.rms_standard_error;
    report["noise_fraction_re"] = conv.noise_fraction;
    report["bias_fraction_re"] = conv.bias_fraction;
    report["shots_to_threshold_re"] = conv.shots_to_threshold;
    report["oracle_quadrature_error"] = or_re->quadrature_error;
  }

  if (one_d) {
    const CorrelationEstimate& like = est_re;
    const rvec x = axis_values(like.nx, like.pitch);
    std::vector<std::string> names = {"x"};
    std::vector<rvec> cols = {x};
    std::vector<PlotSeries> plot_re, plot_im;
    if (have_estimate) {
      names.insert(names.end(), {"estimate_re", "estimate_im"});
      cols.push_back(centered(est_re.mean_map()));
      cols.push_back(centered(est_im.mean_map()));
      plot_re.push_back({"estimate", cols[1], true});
      plot_im.push_back({"estimate", cols[2], true});
      if (est_re.count() >= 2) {
        names.insert(names.end(), {"stderr_re", "stderr_im"});
        cols.push_back(centered(est_re.error_map()));
        cols.push_back(centered(est_im.error_map()));
      }
    }
    if (or_re) {
      names.insert(names.end(), {"oracle_re", "oracle_im"});
      rvec a = centered(or_re->values);
      rvec b = centered(or_im->values);
      // oracle drawn on the estimate's peak scale
      if (have_estimate && summary.comparison.scale_reference > 0.0) {
        const double k = summary.comparison.scale_estimate / summary.comparison.scale_reference;
        rvec as = a, bs = b;
        for (auto& v : as) v *= k;
        for (auto& v : bs) v *= k;
        plot_re.push_back({"oracle", as});
        plot_im.push_back({"oracle", bs});
      } else {
        plot_re.push_back({"oracle", a});
        plot_im.push_back({"oracle", b});
      }
      cols.push_back(a);
      cols.push_back(b);
    }
    write_csv(w.path("cut.csv"), names, cols);
    const std::string xl = "x (" + plane_unit(like.plane) + ")";
    write_svg_plot(w.path("plot_re.svg"), "real quadrature", xl, x, plot_re);
    write_svg_plot(w.path("plot_im.svg"), "imaginary quadrature", xl, x, plot_im);
    if (have_estimate && kind == EstimatorKind::Convolution) {
      const ComplexMap r = reconstruct_nearfield(est_re.mean_map(), est_im.mean_map());
      const cvec rc = centered(r);
      rvec re(rc.size()), im(rc.size()), ab(rc.size());
      for (std::size_t i = 0; i < rc.size(); ++i) re[i] = rc[i].real(), im[i] = rc[i].imag(), ab[i] = std::abs(rc[i]);
      const rvec xr = axis_values(r.nx, r.pitch);
      write_csv(w.path("reconstruction.csv"), {"x", "re", "im", "abs"}, {xr, re, im, ab});
      write_svg_plot(w.path("reconstruction.svg"), "near-field reconstruction", "x (x_coh)", xr,
                     {{"re", re}, {"im", im}, {"abs", ab}});
    }
  } else if (have_estimate) {
    write_pgm(w.path("estimate_re.pgm"), est_re.mean_map());
    write_pgm(w.path("estimate_im.pgm"), est_im.mean_map());
    if (kind == EstimatorKind::Convolution) {
      const ComplexMap r = reconstruct_nearfield(est_re.mean_map(), est_im.mean_map());
      RealMap re(r.nx, r.ny, r.pitch, r.plane), ab = re;
      for (std::size_t i = 0; i < r.size(); ++i) re.values[i] = r.values[i].real(), ab.values[i] = std::abs(r.values[i]);
      w.map("reconstruction_re.gha", re, "reconstruction");
      write_pgm(w.path("reconstruction_re.pgm"), re);
      write_pgm(w.path("reconstruction_abs.pgm"), ab);
    }
  }

  {
    std::ofstream out(w.path("report.json"));
    out << report.dump(2) << '\n';
  }
  {
    std::ofstream out(w.path("config.ini"));
    out << canonical_ini(cfg);
  }
  nlohmann::json manifest;
  manifest["config_hash"] = w.base.config_hash;
  manifest["seed"] = cfg.run.seed;
  manifest["shots"] = cfg.run.shots;
  manifest["threads"] = threads;
  manifest["version"] = version_string();
  manifest["config"] = canonical_ini(cfg);
  const auto& s = ex.scales();
  manifest["scales"] = {{"q0", s.q0}, {"omega0", s.omega0}, {"x_coh", s.x_coh}, {"tau_coh", s.tau_coh},
                        {"x_f", s.x_f}, {"q_c_hat", s.q_c_hat}, {"focal_shift", s.focal_shift}};
  manifest["x1"] = setup.x1;
  manifest["idler_lo"] = {{"psi", setup.idler_re.psi}, {"tilt", setup.idler_re.tilt}};
  manifest["signal_lo_delay"] = setup.signal.delay;
  manifest["files"] = w.files;
  {
    std::ofstream out((w.dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
  }
  w.files.push_back((w.dir / "manifest.json").string());
  summary.files = w.files;
  return summary;
}

std::vector<std::string> write_oracle(const ExperimentConfig& cfg) {
  Experiment ex(cfg);
  const Setup setup = ex.make_setup();
  fs::create_directories(cfg.run.out);
  Writer w;
  w.dir = cfg.run.out;
  w.base.seed = cfg.run.seed;
  w.base.config_hash = config_hash(cfg);
  w.base.tags = {{"geometry", to_string(setup.geometry)},
                 {"estimator", estimator_name(cfg.estimator.kind)}};
  std::vector<rvec> cols;
  for (Quadrature q : {Quadrature::Real, Quadrature::Imag}) {
    const OracleCurve c = ex.oracle(setup, cfg.estimator.kind, q);
    w.map("oracle_" + quad_name(q) + ".gha", c.values, "oracle",
          {{"quadrature", quad_name(q)}, {"quadrature_error", std::to_string(c.quadrature_error)}});
    cols.push_back(centered(c.values));
  }
  const rvec x = axis_values(cfg.grid.nx, setup.reference.output_plane() == Plane::Far ? ex.far_pitch() : ex.near_pitch());
  write_csv(w.path("oracle.csv"), {"x", "oracle_re", "oracle_im"}, {x, cols[0], cols[1]});
  write_svg_plot(w.path("oracle.svg"), "oracle " + to_string(setup.geometry), "x", x,
                 {{"re", cols[0]}, {"im", cols[1]}});
  return w.files;
}

CompareResult compare_files(const std::string& estimate, const std::string& reference,
                            const std::string& region_file, double tolerance, bool force,
                            const std::string& error_file) {
  const ArrayFile a = read_array(estimate);
  const ArrayFile b = read_array(reference);
  if (a.meta.shape != b.meta.shape || a.meta.dtype != "f64" || b.meta.dtype != "f64")
    throw ComparisonError("grid mismatch between " + estimate + " and " + reference);
  for (std::size_t k = 0; k < a.meta.axes.size() && k < b.meta.axes.size(); ++k)
    if (std::abs(a.meta.axes[k].step - b.meta.axes[k].step) > 1e-12 * std::abs(b.meta.axes[k].step))
      throw ComparisonError("grid spacing differs between " + estimate + " and " + reference);
  if (!force && a.meta.config_hash != b.meta.config_hash)
    throw ComparisonError("config hashes differ (" + a.meta.config_hash + " vs " + b.meta.config_hash +
                          "); pass --force to compare anyway");
  Region region;
  if (!region_file.empty()) {
    const ArrayFile r = read_array(region_file);
    if (r.meta.shape != a.meta.shape) throw ComparisonError("region grid mismatch");
    region.resize(r.real.size());
    for (std::size_t i = 0; i < r.real.size(); ++i) region[i] = r.real[i] != 0.0;
  }
  rvec se;
  if (!error_file.empty()) {
    const ArrayFile e = read_array(error_file);
    if (e.meta.shape != a.meta.shape) throw ComparisonError("error grid mismatch");
    se = e.real;
  }
  CompareResult res;
  res.comparison = compare_peak(a.real, b.real, region, se.empty() ? nullptr : &se);
  res.passed = res.comparison.rel_l2 <= tolerance;
  return res;
}

std::vector<std::string> write_gain(const ExperimentConfig& cfg) {
  cfg.validate();
  const DerivedScales d = derive_scales(cfg.crystal, cfg.optics.focal_length);
  const auto& g = cfg.grid;
  const double dq = 2.0 * kPi / g.extent_x;
  const double dw = g.time_off() ? 0.0 : 2.0 * kPi / g.extent_t;
  const GainTable table(d, Shape{g.nx, 1, g.nt}, dq, dw);
  fs::create_directories(cfg.run.out);
  Writer w;
  w.dir = cfg.run.out;
  w.base.config_hash = config_hash(cfg);
  // (q, Omega) arrays in increasing coordinate order
  auto unrolled = [&](auto value) {
    rvec out(g.nx * g.nt);
    for (std::size_t a = 0; a < g.nx; ++a)
      for (std::size_t b = 0; b < g.nt; ++b) {
        const std::size_t ix = fft_index(static_cast<long>(a) - static_cast<long>(g.nx / 2), g.nx);
        const std::size_t it = fft_index(static_cast<long>(g.nt / 2) - static_cast<long>(b), g.nt);
        out[a * g.nt + b] = value(table.index(ix, 0, it));
      }
    return out;
  };
  ArrayMeta meta;
  meta.shape = {g.nx, g.nt};
  meta.axes = {{"q", "q0", -static_cast<double>(g.nx / 2) * dq, dq},
               {"omega", "omega0", -static_cast<double>(g.nt / 2) * dw, dw}};
  meta.config_hash = w.base.config_hash;
  auto put = [&](const std::string& name, auto value) {
    ArrayMeta m = meta;
    m.tags = {{"kind", "gain"}, {"quantity", name}};
    write_array(w.path("gain_" + name + ".gha"), m, unrolled(value));
  };
  put("abs_G", [&](std::size_t i) { return std::abs(table.g()[i]); });
  put("phi_G", [&](std::size_t i) { return std::arg(table.g()[i]); });
  put("abs_U1", [&](std::size_t i) { return std::abs(table.u1()[i]); });
  put("abs_V1", [&](std::size_t i) { return std::abs(table.v1()[i]); });
  put("abs_U2", [&](std::size_t i) { return std::abs(table.u2()[i]); });
  put("abs_V2", [&](std::size_t i) { return std::abs(table.v2()[i]); });

  const PhaseExpansion e = phase_expansion(cfg.crystal, d);
  rvec q(g.nx), mod(g.nx), phase(g.nx), approx(g.nx);
  for (std::size_t a = 0; a < g.nx; ++a) {
    const std::size_t ix = fft_index(static_cast<long>(a) - static_cast<long>(g.nx / 2), g.nx);
    q[a] = table.qx(ix);
    const std::size_t i = table.index(ix, 0, 0);
    mod[a] = std::abs(table.g()[i]);
    phase[a] = table.phase_x()[ix];
    approx[a] = e.evaluate(q[a], 0.0, 0.0);
  }
  write_csv(w.path("gain_cut.csv"), {"q", "abs_G", "phi_G_unwrapped", "phi_G_expansion"},
            {q, mod, phase, approx});
  write_svg_plot(w.path("gain_cut.svg"), "|G(q, 0)|", "q (q0)", q, {{"|G|", mod}});
  return w.files;
}

std::vector<std::string> write_reconstruction(const std::string& re_file, const std::string& im_file,
                                              const std::string& out_dir) {
  const ArrayFile a = read_array(re_file);
  const ArrayFile b = read_array(im_file);
  if (a.meta.shape != b.meta.shape) throw ComparisonError("quadrature files have different grids");
  const RealMap re = map_from_file(a, Plane::Far);
  const RealMap im = map_from_file(b, Plane::Far);
  const ComplexMap r = reconstruct_nearfield(re, im);
  fs::create_directories(out_dir);
  Writer w;
  w.dir = out_dir;
  ArrayMeta meta = map_meta(RealMap(r.nx, r.ny, r.pitch, Plane::Near), "x_coh");
  meta.tags = {{"kind", "reconstruction"}};
  meta.config_hash = a.meta.config_hash;
  meta.shots = a.meta.shots;
  meta.seed = a.meta.seed;
  write_array(w.path("reconstruction.gha"), meta, centered(r));
  if (r.ny == 1) {
    const cvec c = centered(r);
    rvec x = axis_values(r.nx, r.pitch), vr(c.size()), vi(c.size()), ab(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) vr[i] = c[i].real(), vi[i] = c[i].imag(), ab[i] = std::abs(c[i]);
    write_csv(w.path("reconstruction.csv"), {"x", "re", "im", "abs"}, {x, vr, vi, ab});
    write_svg_plot(w.path("reconstruction.svg"), "near-field reconstruction", "x (x_coh)", x,
                   {{"re", vr}, {"im", vi}, {"abs", ab}});
  } else {
    RealMap ab(r.nx, r.ny, r.pitch, Plane::Near);
    for (std::size_t i = 0; i < r.size(); ++i) ab.values[i] = std::abs(r.values[i]);
    write_pgm(w.path("reconstruction_abs.pgm"), ab);
  }
  return w.files;
}

}  // namespace ghost
