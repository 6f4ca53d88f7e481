#include "ghost/lattice.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

namespace ghost {

namespace {

// Plans are made with FFTW_ESTIMATE so the chosen algorithm, and therefore the
// rounding, does not depend on timing measurements: reruns stay bit-identical.
struct PlanCache {
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, int, bool>;
  std::mutex mu;
  std::map<Key, fftw_plan> plans;

  fftw_plan get(const Shape& s, int sign, bool spatial) {
    const Key key{s.nx, s.ny, s.nt, sign, spatial};
    std::lock_guard<std::mutex> lock(mu);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    cvec scratch(s.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int dir = sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD;
    // size-1 axes are dropped from the transform rank
    std::vector<int> dims;
    if (!spatial && s.nt > 1) dims.push_back(static_cast<int>(s.nt));
    dims.push_back(static_cast<int>(s.nx));
    if (s.ny > 1) dims.push_back(static_cast<int>(s.ny));
    const int rank = static_cast<int>(dims.size());
    const int howmany = spatial ? static_cast<int>(s.nt) : 1;
    const int dist = static_cast<int>(s.transverse());
    fftw_plan p = fftw_plan_many_dft(rank, dims.data(), howmany, buf, nullptr, 1, dist, buf,
                                     nullptr, 1, dist, dir, FFTW_ESTIMATE);
    plans.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& kv : plans) fftw_destroy_plan(kv.second);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(fftw_plan p, cplx* data) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, buf, buf);
}

}  // namespace

void fft_full(cplx* data, const Shape& s, int sign) { execute(cache().get(s, sign, false), data); }

void fft_spatial(cplx* data, const Shape& s, int sign) {
  execute(cache().get(s, sign, true), data);
}

FieldLattice::FieldLattice(Shape shape, double pitch_, double dt_, Beam beam_)
    : beam(beam_), pitch(pitch_), dt(shape.nt > 1 ? dt_ : 1.0), shape_(shape),
      data_(shape.size(), cplx(0.0)) {}

double FieldLattice::dq() const {
  return 2.0 * std::numbers::pi / (static_cast<double>(shape_.nx) * pitch);
}

double FieldLattice::domega() const {
  if (shape_.nt == 1) return 0.0;
  return 2.0 * std::numbers::pi / (static_cast<double>(shape_.nt) * dt);
}

double FieldLattice::cell_volume() const {
  double v = pitch * dt;
  if (shape_.ny > 1) v *= pitch;
  return v;
}

double FieldLattice::mode_volume() const {
  const double q = dq();
  double v = q * (shape_.nt > 1 ? domega() : 1.0);
  if (shape_.ny > 1) v *= 2.0 * std::numbers::pi / (static_cast<double>(shape_.ny) * pitch);
  return v;
}

namespace {
double transform_dims(const Shape& s) {
  return static_cast<double>(s.dims() + (s.nt > 1 ? 1 : 0));
}
}  // namespace

void FieldLattice::to_fourier() {
  if (domain == Domain::Fourier) return;
  fft_full(data(), shape_, -1);
  const double scale =
      cell_volume() / std::pow(2.0 * std::numbers::pi, 0.5 * transform_dims(shape_));
  for (auto& v : data_) v *= scale;
  domain = Domain::Fourier;
}

void FieldLattice::to_position() {
  if (domain == Domain::Position) return;
  fft_full(data(), shape_, +1);
  const double scale =
      mode_volume() / std::pow(2.0 * std::numbers::pi, 0.5 * transform_dims(shape_));
  for (auto& v : data_) v *= scale;
  domain = Domain::Position;
}

void FieldLattice::fill(cplx v) {
  for (auto& x : data_) x = v;
}

void unitary_dft(ComplexMap& m, int sign) {
  const Shape s{m.nx, m.ny, 1};
  fft_spatial(m.values.data(), s, sign);
  const int d = m.dims();
  const double scale = std::pow(m.pitch / std::sqrt(2.0 * std::numbers::pi), d);
  for (auto& v : m.values) v *= scale;
  m.pitch = 2.0 * std::numbers::pi / (static_cast<double>(m.nx) * m.pitch);
}

}  // namespace ghost
