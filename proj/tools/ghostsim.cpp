// ghostsim: command line front end of the ghost imaging simulator.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ghost/array_io.hpp"
#include "ghost/errors.hpp"
#include "ghost/experiment.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumeric = 2, kCompare = 3 };

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::size_t> shots;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
  std::string geometry;
};

void add_common(CLI::App* app, Common& c, bool with_shots) {
  app->add_option("--config", c.config, "INI configuration file")->check(CLI::ExistingFile);
  app->add_option("--set", c.sets, "override, section.key=value (repeatable)");
  if (with_shots) app->add_option("--shots", c.shots, "number of pump shots");
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--threads", c.threads, "worker threads (GHOSTSIM_THREADS overrides)");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--geometry", c.geometry, "pf | pT | p2f | bucket-near | bucket-far");
}

ghost::ExperimentConfig build(const Common& c) {
  ghost::ExperimentConfig cfg = c.config.empty() ? ghost::reference_config() : ghost::load_config(c.config);
  if (!c.geometry.empty()) {
    cfg.optics.geometry = ghost::parse_geometry(c.geometry);
    // keep the estimator consistent with the geometry unless set explicitly
    if (ghost::is_bucket(cfg.optics.geometry)) cfg.estimator.kind = ghost::EstimatorKind::Bucket;
    else if (cfg.estimator.kind == ghost::EstimatorKind::Bucket) cfg.estimator.kind = ghost::EstimatorKind::Fixed;
    if (cfg.optics.geometry != ghost::ArmGeometry::PointFar &&
        cfg.estimator.kind == ghost::EstimatorKind::Convolution)
      cfg.estimator.kind = ghost::EstimatorKind::Fixed;
  }
  for (const auto& s : c.sets) ghost::apply_override(cfg, s);
  if (c.shots) cfg.run.shots = *c.shots;
  if (c.seed) cfg.run.seed = *c.seed;
  if (c.threads) cfg.run.threads = *c.threads;
  if (!c.out.empty()) cfg.run.out = c.out;
  cfg.validate();
  return cfg;
}

void print_files(const std::vector<std::string>& files) {
  for (const auto& f : files) std::cout << "wrote " << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ghostsim: homodyne ghost imaging with twin beams"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ghost::version_string());

  Common run_opts, oracle_opts, gain_opts;
  auto* run = app.add_subcommand("run", "simulate shots, estimate correlations, compare to the oracle");
  add_common(run, run_opts, true);
  auto* oracle = app.add_subcommand("oracle", "write the semi-analytic reference curves");
  add_common(oracle, oracle_opts, false);
  auto* gain = app.add_subcommand("gain", "write U, V, G over the (q, Omega) lattice");
  add_common(gain, gain_opts, false);

  std::string est_file, ref_file, region_file, err_file;
  double tolerance = 0.1;
  bool force = false;
  auto* compare = app.add_subcommand("compare", "compare an estimate file against a reference file");
  compare->add_option("estimate", est_file, "estimate array")->required()->check(CLI::ExistingFile);
  compare->add_option("reference", ref_file, "reference array")->required()->check(CLI::ExistingFile);
  compare->add_option("--region", region_file, "0/1 region array")->check(CLI::ExistingFile);
  compare->add_option("--stderr", err_file, "standard error array for z-scores")->check(CLI::ExistingFile);
  compare->add_option("--tolerance", tolerance, "pass threshold on relative L2");
  compare->add_flag("--force", force, "compare even if config hashes differ");

  std::string re_file, im_file, rec_out = "out";
  auto* reconstruct = app.add_subcommand("reconstruct", "inverse transform a quadrature pair to the near field");
  reconstruct->add_option("re", re_file, "real-quadrature array")->required()->check(CLI::ExistingFile);
  reconstruct->add_option("im", im_file, "imaginary-quadrature array")->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--out", rec_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      const auto cfg = build(run_opts);
      const auto summary = ghost::run_experiment(cfg, &std::cerr);
      print_files(summary.files);
      if (summary.has_comparison)
        std::cout << "rel_l2 " << summary.comparison.rel_l2 << (summary.passed ? " pass" : " fail") << '\n';
    } else if (*oracle) {
      print_files(ghost::write_oracle(build(oracle_opts)));
    } else if (*gain) {
      print_files(ghost::write_gain(build(gain_opts)));
    } else if (*compare) {
      const auto r = ghost::compare_files(est_file, ref_file, region_file, tolerance, force, err_file);
      std::cout << "rel_l2 " << r.comparison.rel_l2 << "\nmax_abs_z " << r.comparison.max_abs_z
                << "\npixels " << r.comparison.pixels << '\n'
                << (r.passed ? "pass" : "fail") << '\n';
      return r.passed ? kOk : kCompare;
    } else if (*reconstruct) {
      print_files(ghost::write_reconstruction(re_file, im_file, rec_out));
    }
  } catch (const ghost::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ghost::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const ghost::ComparisonError& e) {
    std::cerr << "comparison failure: " << e.what() << '\n';
    return kCompare;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
