#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ghost/config.hpp"
#include "ghost/correlator.hpp"
#include "ghost/homodyne.hpp"
#include "ghost/optics.hpp"

namespace ghost {

enum class ArmGeometry { PointFar, PointNear, Point2f, BucketNear, BucketFar };
enum class ObjectKind { AmplitudeSlit, PhaseSlit, Open, Bitmap };
enum class EstimatorKind { Fixed, ScanX1, Bucket, Convolution };
enum class PropagatorKind { SplitStep, Spwpa };

ArmGeometry parse_geometry(const std::string& s);  // pf | pT | p2f | bucket-near | bucket-far
std::string to_string(ArmGeometry g);
bool is_bucket(ArmGeometry g);

struct OpticsConfig {
  double focal_length = 0.05;  // m
  ArmGeometry geometry = ArmGeometry::PointFar;
  ObjectKind object = ObjectKind::AmplitudeSlit;
  SlitParams slit;
  // Slit shift in pixels; unset means 23 for point-like geometries and the
  // pixel nearest -q_C for bucket geometries.
  std::optional<double> shift;
  std::string mask_path;
  double mask_threshold = 0.5;
  bool focal_shift = true;
  bool optimized = true;
  std::optional<double> x1;  // signal pixel, x_f units; unset: nearest to -q_C
};

struct LoSettings {
  double amplitude = 1.0;
  double waist = 0.0;                // plane units, 0 = plane wave
  std::optional<double> center;      // plane units; bucket signal LO defaults to -q_C
  TemporalProfile temporal = TemporalProfile::Gaussian;
  std::optional<double> duration;    // tau_coh units; unset: pump duration
  bool manual_phase = false;         // idler: use psi/tilt below instead of the recipe
  double psi = 0.0;
  double tilt = 0.0;
  bool delay = true;                 // signal: apply the temporal gain-phase delay
};

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::Fixed;
  Padding padding = Padding::Periodic;
  double threshold = 0.1;
  bool plateau_region = true;  // compare over |G| >= max/2 instead of the full grid
};

struct RunConfig {
  std::size_t shots = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  std::string out = "out";
  PropagatorKind propagator = PropagatorKind::SplitStep;
  bool vacuum_only = false;
  bool oracle = true;
  bool pulsed_oracle = true;  // temporal factor from the LO spectra, else cw
  double tolerance = 0.1;     // pass threshold of the comparison report
};

struct ExperimentConfig {
  CrystalConfig crystal;
  PumpConfig pump;
  GridConfig grid;
  OpticsConfig optics;
  LoSettings lo_signal;
  LoSettings lo_idler;
  EstimatorConfig estimator;
  RunConfig run;

  void validate() const;
};

// Reference BBO configuration used throughout the tests.
ExperimentConfig reference_config();

// INI file with sections [crystal] [pump] [grid] [optics] [lo.signal]
// [lo.idler] [estimator] [run]; missing keys keep the reference values.
// Unknown sections/keys and malformed values raise ConfigError.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& ini_text);

// "section.key=value", split at the last dot before '='.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);
void set_value(ExperimentConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value);

// Canonical INI text of every field, and its hash. Two configs with equal
// physics and run settings have equal hashes whatever file they came from.
std::string canonical_ini(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace ghost
