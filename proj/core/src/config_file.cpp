#include "ghost/config_file.hpp"

#include <charconv>
#include <fstream>
#include <cmath>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ghost/array_io.hpp"
#include "ghost/errors.hpp"

namespace ghost {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

double to_double(const std::string& s, const std::string& key) {
  double v = 0.0;
  const std::string t = trim(s);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v))
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  return v;
}

std::uint64_t to_uint(const std::string& s, const std::string& key) {
  std::uint64_t v = 0;
  const std::string t = trim(s);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& s, const std::string& key) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + s + "'");
}

// Binds one key of the file to one field of the config.
struct Field {
  std::string section;
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class Get>
Field num(std::string sec, std::string key, Get ref) {
  const std::string name = sec + "." + key;
  return {sec, key,
          [=](ExperimentConfig& c, const std::string& v) { ref(c) = to_double(v, name); },
          [=](const ExperimentConfig& c) { return fmt(ref(const_cast<ExperimentConfig&>(c))); }};
}

template <class Get>
Field uint(std::string sec, std::string key, Get ref) {
  const std::string name = sec + "." + key;
  return {sec, key,
          [=](ExperimentConfig& c, const std::string& v) {
            ref(c) = static_cast<std::remove_reference_t<decltype(ref(c))>>(to_uint(v, name));
          },
          [=](const ExperimentConfig& c) {
            return std::to_string(ref(const_cast<ExperimentConfig&>(c)));
          }};
}

template <class Get>
Field flag(std::string sec, std::string key, Get ref) {
  const std::string name = sec + "." + key;
  return {sec, key, [=](ExperimentConfig& c, const std::string& v) { ref(c) = to_bool(v, name); },
          [=](const ExperimentConfig& c) {
            return std::string(ref(const_cast<ExperimentConfig&>(c)) ? "true" : "false");
          }};
}

// Optional number: "auto" (or empty) leaves it unset.
template <class Get>
Field opt(std::string sec, std::string key, Get ref) {
  const std::string name = sec + "." + key;
  return {sec, key,
          [=](ExperimentConfig& c, const std::string& v) {
            const std::string t = trim(v);
            if (t.empty() || t == "auto") ref(c).reset();
            else ref(c) = to_double(t, name);
          },
          [=](const ExperimentConfig& c) {
            const auto& o = ref(const_cast<ExperimentConfig&>(c));
            return o ? fmt(*o) : std::string("auto");
          }};
}

template <class E>
struct Choice {
  const char* name;
  E value;
};

template <class E, class Get, std::size_t N>
Field choice(std::string sec, std::string key, Get ref, const Choice<E> (&opts)[N]) {
  const std::string name = sec + "." + key;
  std::vector<Choice<E>> list(opts, opts + N);
  return {sec, key,
          [=](ExperimentConfig& c, const std::string& v) {
            const std::string t = trim(v);
            for (const auto& o : list)
              if (t == o.name) {
                ref(c) = o.value;
                return;
              }
            std::string allowed;
            for (const auto& o : list) allowed += std::string(allowed.empty() ? "" : "|") + o.name;
            throw ConfigError(name + ": expected " + allowed + ", got '" + v + "'");
          },
          [=](const ExperimentConfig& c) {
            for (const auto& o : list)
              if (ref(const_cast<ExperimentConfig&>(c)) == o.value) return std::string(o.name);
            return std::string("?");
          }};
}

constexpr Choice<ArmGeometry> kGeometries[] = {{"pf", ArmGeometry::PointFar},
                                               {"pT", ArmGeometry::PointNear},
                                               {"p2f", ArmGeometry::Point2f},
                                               {"bucket-near", ArmGeometry::BucketNear},
                                               {"bucket-far", ArmGeometry::BucketFar}};
constexpr Choice<ObjectKind> kObjects[] = {{"slit", ObjectKind::AmplitudeSlit},
                                           {"phase-slit", ObjectKind::PhaseSlit},
                                           {"open", ObjectKind::Open},
                                           {"bitmap", ObjectKind::Bitmap}};
constexpr Choice<MaskSampling> kSampling[] = {{"point", MaskSampling::Point},
                                              {"coverage", MaskSampling::Coverage}};
constexpr Choice<TemporalProfile> kTemporal[] = {{"cw", TemporalProfile::Cw},
                                                 {"gaussian", TemporalProfile::Gaussian}};
constexpr Choice<EstimatorKind> kEstimators[] = {{"fixed", EstimatorKind::Fixed},
                                                 {"scan", EstimatorKind::ScanX1},
                                                 {"bucket", EstimatorKind::Bucket},
                                                 {"convolution", EstimatorKind::Convolution}};
constexpr Choice<Padding> kPadding[] = {{"periodic", Padding::Periodic}, {"zero", Padding::Zero}};
constexpr Choice<PropagatorKind> kPropagators[] = {{"split-step", PropagatorKind::SplitStep},
                                                   {"spwpa", PropagatorKind::Spwpa}};

void lo_fields(std::vector<Field>& f, const std::string& sec, LoSettings ExperimentConfig::*lo) {
  auto L = [lo](ExperimentConfig& c) -> LoSettings& { return c.*lo; };
  f.push_back(num(sec, "amplitude", [L](ExperimentConfig& c) -> double& { return L(c).amplitude; }));
  f.push_back(num(sec, "waist", [L](ExperimentConfig& c) -> double& { return L(c).waist; }));
  f.push_back(opt(sec, "center", [L](ExperimentConfig& c) -> std::optional<double>& { return L(c).center; }));
  f.push_back(choice(sec, "temporal", [L](ExperimentConfig& c) -> TemporalProfile& { return L(c).temporal; }, kTemporal));
  f.push_back(opt(sec, "duration", [L](ExperimentConfig& c) -> std::optional<double>& { return L(c).duration; }));
  f.push_back(flag(sec, "manual_phase", [L](ExperimentConfig& c) -> bool& { return L(c).manual_phase; }));
  f.push_back(num(sec, "psi", [L](ExperimentConfig& c) -> double& { return L(c).psi; }));
  f.push_back(num(sec, "tilt", [L](ExperimentConfig& c) -> double& { return L(c).tilt; }));
  f.push_back(flag(sec, "delay", [L](ExperimentConfig& c) -> bool& { return L(c).delay; }));
}

#define F(member) [](ExperimentConfig& c) -> auto& { return c.member; }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(num("crystal", "pump_wavelength", F(crystal.pump_wavelength)));
    f.push_back(num("crystal", "wavelength", F(crystal.wavelength)));
    f.push_back(num("crystal", "length", F(crystal.length)));
    f.push_back(num("crystal", "n1", F(crystal.n1)));
    f.push_back(num("crystal", "n2", F(crystal.n2)));
    f.push_back(num("crystal", "n0", F(crystal.n0)));
    f.push_back(num("crystal", "k1_prime", F(crystal.k1_prime)));
    f.push_back(num("crystal", "k2_prime", F(crystal.k2_prime)));
    f.push_back(num("crystal", "k0_prime", F(crystal.k0_prime)));
    f.push_back(num("crystal", "k1_second", F(crystal.k1_second)));
    f.push_back(num("crystal", "k2_second", F(crystal.k2_second)));
    f.push_back(num("crystal", "k0_second", F(crystal.k0_second)));
    f.push_back(num("crystal", "rho1", F(crystal.rho1)));
    f.push_back(num("crystal", "rho2", F(crystal.rho2)));
    f.push_back(num("crystal", "rho0", F(crystal.rho0)));
    f.push_back(num("crystal", "delta0", F(crystal.delta0)));
    f.push_back(num("crystal", "gain", F(crystal.gain)));

    f.push_back(num("pump", "waist", F(pump.waist)));
    f.push_back(num("pump", "duration", F(pump.duration)));
    f.push_back(num("pump", "amplitude", F(pump.amplitude)));
    f.push_back(flag("pump", "plane_wave", F(pump.plane_wave)));
    f.push_back(flag("pump", "cw", F(pump.cw)));
    f.push_back(flag("pump", "propagate", F(pump.propagate)));

    f.push_back(uint("grid", "nx", F(grid.nx)));
    f.push_back(uint("grid", "ny", F(grid.ny)));
    f.push_back(uint("grid", "nt", F(grid.nt)));
    f.push_back(uint("grid", "nz", F(grid.nz)));
    f.push_back(num("grid", "extent_x", F(grid.extent_x)));
    f.push_back(num("grid", "extent_t", F(grid.extent_t)));
    f.push_back(num("grid", "detection_window", F(grid.detection_window)));

    f.push_back(num("optics", "focal_length", F(optics.focal_length)));
    f.push_back(choice("optics", "geometry", F(optics.geometry), kGeometries));
    f.push_back(choice("optics", "object", F(optics.object), kObjects));
    f.push_back(num("optics", "slit_a", F(optics.slit.a)));
    f.push_back(num("optics", "slit_d", F(optics.slit.d)));
    f.push_back(opt("optics", "slit_shift", F(optics.shift)));
    f.push_back(choice("optics", "sampling", F(optics.slit.sampling), kSampling));
    f.push_back({"optics", "mask",
                 [](ExperimentConfig& c, const std::string& v) { c.optics.mask_path = trim(v); },
                 [](const ExperimentConfig& c) { return c.optics.mask_path; }});
    f.push_back(num("optics", "mask_threshold", F(optics.mask_threshold)));
    f.push_back(flag("optics", "focal_shift", F(optics.focal_shift)));
    f.push_back(flag("optics", "optimized", F(optics.optimized)));
    f.push_back(opt("optics", "x1", F(optics.x1)));

    lo_fields(f, "lo.signal", &ExperimentConfig::lo_signal);
    lo_fields(f, "lo.idler", &ExperimentConfig::lo_idler);

    f.push_back(choice("estimator", "kind", F(estimator.kind), kEstimators));
    f.push_back(choice("estimator", "padding", F(estimator.padding), kPadding));
    f.push_back(num("estimator", "threshold", F(estimator.threshold)));
    f.push_back(flag("estimator", "plateau_region", F(estimator.plateau_region)));

    f.push_back(uint("run", "shots", F(run.shots)));
    f.push_back(uint("run", "seed", F(run.seed)));
    f.push_back(uint("run", "threads", F(run.threads)));
    f.push_back({"run", "out", [](ExperimentConfig& c, const std::string& v) { c.run.out = trim(v); },
                 [](const ExperimentConfig& c) { return c.run.out; }});
    f.push_back(choice("run", "propagator", F(run.propagator), kPropagators));
    f.push_back(flag("run", "vacuum_only", F(run.vacuum_only)));
    f.push_back(flag("run", "oracle", F(run.oracle)));
    f.push_back(flag("run", "pulsed_oracle", F(run.pulsed_oracle)));
    f.push_back(num("run", "tolerance", F(run.tolerance)));
    return f;
  }();
  return table;
}

#undef F

// Keys that do not change the physics or the estimate; excluded from the hash.
bool hash_neutral(const Field& f) {
  return f.section == "run" && (f.key == "threads" || f.key == "out");
}

}  // namespace

ArmGeometry parse_geometry(const std::string& s) {
  for (const auto& g : kGeometries)
    if (s == g.name) return g.value;
  throw ConfigError("unknown geometry '" + s + "' (pf|pT|p2f|bucket-near|bucket-far)");
}

std::string to_string(ArmGeometry g) {
  for (const auto& c : kGeometries)
    if (c.value == g) return c.name;
  return "?";
}

bool is_bucket(ArmGeometry g) { return g == ArmGeometry::BucketNear || g == ArmGeometry::BucketFar; }

void ExperimentConfig::validate() const {
  crystal.validate();
  pump.validate();
  grid.validate();
  if (!(optics.focal_length > 0.0)) throw ConfigError("optics.focal_length must be positive");
  if (optics.object == ObjectKind::Bitmap && optics.mask_path.empty())
    throw ConfigError("optics.object = bitmap needs optics.mask");
  const bool bucket = is_bucket(optics.geometry);
  if (bucket != (estimator.kind == EstimatorKind::Bucket))
    throw ConfigError("bucket geometries and the bucket estimator go together");
  if (estimator.kind == EstimatorKind::Convolution && optics.geometry != ArmGeometry::PointFar)
    throw ConfigError("the convolution estimator needs the far-field point-like geometry (pf)");
  if (optics.optimized && !optics.focal_shift && optics.geometry != ArmGeometry::Point2f)
    throw ConfigError("optimized LO phases need optics.focal_shift = true");
  if (lo_signal.waist < 0.0 || lo_idler.waist < 0.0) throw ConfigError("LO waist must be >= 0");
  if (run.propagator == PropagatorKind::Spwpa && !(pump.plane_wave && pump.cw))
    throw ConfigError("run.propagator = spwpa needs pump.plane_wave and pump.cw");
  if (!(estimator.threshold > 0.0)) throw ConfigError("estimator.threshold must be positive");
}

ExperimentConfig reference_config() {
  ExperimentConfig c;
  auto& k = c.crystal;
  k.pump_wavelength = 352e-9;
  k.wavelength = 704e-9;
  k.length = 4e-3;
  k.n1 = 1.6638893503592775;
  k.n2 = 1.5958280279639192;
  k.n0 = 1.6308790605366887;
  k.k1_prime = 5.645462977500281e-9;
  k.k2_prime = 5.4051353146334474e-9;
  k.k0_prime = 5.773060884470359e-9;
  k.k1_second = 9.0829e-26;
  k.k2_second = 7.2465e-26;
  k.k0_second = 2.2006e-25;
  k.rho1 = 0.0;
  k.rho2 = 0.071650477852115;
  k.rho0 = 0.07742;
  k.delta0 = -18213.586454;
  k.gain = 4.0;
  return c;
}

void set_value(ExperimentConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
  for (const auto& f : fields())
    if (f.section == section && f.key == key) {
      f.set(cfg, value);
      return;
    }
  throw ConfigError("unknown setting " + section + "." + key);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set expects section.key=value: " + assignment);
  const std::string path = trim(assignment.substr(0, eq));
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
    throw ConfigError("--set expects section.key=value: " + assignment);
  set_value(cfg, path.substr(0, dot), path.substr(dot + 1), assignment.substr(eq + 1));
}

ExperimentConfig parse_config(const std::string& ini_text) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg = reference_config();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body) set_value(cfg, section, key, value.data());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

std::string canonical_ini(const ExperimentConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      out << (section.empty() ? "" : "\n") << '[' << f.section << "]\n";
      section = f.section;
    }
    out << f.key << " = " << f.get(cfg) << '\n';
  }
  return out.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::string text;
  for (const auto& f : fields())
    if (!hash_neutral(f)) text += f.section + "." + f.key + "=" + f.get(cfg) + "\n";
  return fnv1a_hex(text);
}

}  // namespace ghost
