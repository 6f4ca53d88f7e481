#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ghost/config_file.hpp"
#include "ghost/correlator.hpp"
#include "ghost/gain.hpp"
#include "ghost/homodyne.hpp"
#include "ghost/optics.hpp"
#include "ghost/oracle.hpp"
#include "ghost/wigner.hpp"

namespace ghost {

// One arm layout with its object and LOs. The idler LO comes in the two
// settings that select the real and imaginary quadratures.
struct Setup {
  ArmGeometry geometry = ArmGeometry::PointFar;
  ObjectMask mask;
  OpticalPath test;
  OpticalPath reference;
  LocalOscillator signal;
  LocalOscillator idler_re;
  LocalOscillator idler_im;
  double x1 = 0.0;            // fixed signal pixel, x_f units
  std::size_t x1_pixel = 0;   // its flat index on the far lattice
  double object_shift = 0.0;  // pixels
};

struct Quadratures {
  RealMap z1;
  RealMap z2_re;
  RealMap z2_im;
};

// Thread count: GHOSTSIM_THREADS wins over the requested value; 0 means
// hardware concurrency.
unsigned resolve_threads(unsigned requested);

// Computes shots [first, first + count) on `threads` workers in batches and
// hands the results to `consume` strictly in shot order, so the consumer
// sees the same sequence whatever the thread count.
template <class T>
void for_each_shot_ordered(std::size_t first, std::size_t count, unsigned threads,
                           const std::function<T(std::size_t)>& compute,
                           const std::function<void(std::size_t, T&)>& consume) {
  threads = std::max(1u, threads);
  const std::size_t batch = std::max<std::size_t>(1, 4 * threads);
  for (std::size_t b = 0; b < count; b += batch) {
    const std::size_t n = std::min(batch, count - b);
    std::vector<std::optional<T>> slots(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          slots[i].emplace(compute(first + b + i));
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    };
    if (threads == 1 || n == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < std::min<std::size_t>(threads, n); ++t) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    for (std::size_t i = 0; i < n; ++i) consume(first + b + i, *slots[i]);
  }
}

class Experiment {
 public:
  explicit Experiment(const ExperimentConfig& cfg);

  const ExperimentConfig& config() const { return cfg_; }
  const DerivedScales& scales() const { return scales_; }
  const PhaseExpansion& expansion() const { return expansion_; }
  double near_pitch() const { return cfg_.grid.dx(); }
  double far_pitch() const;
  std::size_t far_index(double x) const;  // nearest far-lattice pixel along x

  Setup make_setup() const { return make_setup(cfg_.optics, cfg_.lo_signal, cfg_.lo_idler); }
  Setup make_setup(const OpticsConfig& optics, const LoSettings& signal,
                   const LoSettings& idler) const;

  // Crystal-exit state of one shot (position domain). Pure function of the
  // master seed and the shot index.
  ShotState crystal_exit(std::size_t shot) const;
  Quadratures detect(const ShotState& state, const Setup& setup) const;
  rvec sample(const Quadratures& q, const Setup& setup, EstimatorKind kind, Quadrature quad,
              Padding padding = Padding::Periodic) const;
  CorrelationEstimate make_estimate(const Setup& setup, EstimatorKind kind, Quadrature quad) const;

  // Semi-analytic reference for an estimator on this setup (2+1D only).
  OracleCurve oracle(const Setup& setup, EstimatorKind kind, Quadrature quad,
                     OracleMode mode = OracleMode::Exact) const;
  OracleInputs oracle_inputs(const Setup& setup, Quadrature quad) const;
  // Far lattice pixels with |G(-x2, 0)| >= max/2.
  Region plateau_region() const;
  Region comparison_region(const Setup& setup, EstimatorKind kind) const;

  // Gaussian fits of the mean crystal-exit intensity (finite pump only).
  GaussianWeight signal_envelope() const;
  GaussianWeight idler_envelope() const;

 private:
  void fit_envelopes() const;

  ExperimentConfig cfg_;
  DerivedScales scales_;
  PhaseExpansion expansion_;
  std::unique_ptr<CrystalPropagator> propagator_;
  std::unique_ptr<GainTable> gain_;
  mutable std::once_flag envelope_once_;
  mutable GaussianWeight signal_env_;
  mutable GaussianWeight idler_env_;
};

struct RunSummary {
  std::size_t shots = 0;
  bool has_comparison = false;
  Comparison comparison;
  bool passed = true;
  std::vector<std::string> files;
};

// Full pipeline: shots, estimates, optional oracle, comparison report,
// manifest. Writes into cfg.run.out.
RunSummary run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Oracle curves only (re and im) for the configured setup and estimator.
std::vector<std::string> write_oracle(const ExperimentConfig& cfg);

struct CompareResult {
  Comparison comparison;
  bool passed = false;
};

// Compares two array files on a common grid. Refuses mismatched config
// hashes unless `force`. `region_file`, when not empty, is a 0/1 array.
CompareResult compare_files(const std::string& estimate, const std::string& reference,
                            const std::string& region_file, double tolerance, bool force,
                            const std::string& error_file = "");

// Writes U, V, G and phi_G over the (q, Omega) lattice of the config.
std::vector<std::string> write_gain(const ExperimentConfig& cfg);

// Inverse transform of a real/imaginary estimate pair to the near field.
std::vector<std::string> write_reconstruction(const std::string& re_file,
                                              const std::string& im_file,
                                              const std::string& out_dir);

std::string version_string();

}  // namespace ghost
