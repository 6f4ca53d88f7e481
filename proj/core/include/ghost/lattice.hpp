#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace ghost {

using cplx = std::complex<double>;

// Allocator returning 64-byte aligned storage so every buffer can be handed
// to the cached FFT plans through the new-array execute interface.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{64}));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{64}); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using cvec = std::vector<cplx, AlignedAllocator<cplx>>;
using rvec = std::vector<double>;

// Lattice extents. Layout is row-major [t][x][y]: every time slice is one
// contiguous transverse slab.
struct Shape {
  std::size_t nx = 1;
  std::size_t ny = 1;
  std::size_t nt = 1;
  std::size_t size() const { return nx * ny * nt; }
  std::size_t transverse() const { return nx * ny; }
  int dims() const { return ny > 1 ? 2 : 1; }
  bool operator==(const Shape&) const = default;
};

inline std::size_t lattice_index(const Shape& s, std::size_t ix, std::size_t iy, std::size_t it) {
  return (it * s.nx + ix) * s.ny + iy;
}

// Signed FFT-order coordinate of index n on an N-point axis: 0..N/2-1 map to
// themselves, N/2..N-1 to negative values.
inline long fft_coord(std::size_t n, std::size_t N) {
  return n < (N + 1) / 2 ? static_cast<long>(n) : static_cast<long>(n) - static_cast<long>(N);
}
// Index of the coordinate c (any integer) on an N-point periodic axis.
inline std::size_t fft_index(long c, std::size_t N) {
  const long m = static_cast<long>(N);
  return static_cast<std::size_t>(((c % m) + m) % m);
}
// Index of -c given the index of c.
inline std::size_t mirror_index(std::size_t n, std::size_t N) { return (N - n) % N; }

enum class Domain { Position, Fourier };
enum class Plane { Near, Far };
enum class Beam { Signal, Idler };

// Transforms over the lattice. sign = -1 applies e^{-i k n}, +1 applies e^{+i k n};
// no scaling. Plans are created once per shape and reused from any thread.
void fft_full(cplx* data, const Shape& s, int sign);
void fft_spatial(cplx* data, const Shape& s, int sign);

// Complex amplitude of one beam on the lattice.
// Position domain: index (ix, iy, it) holds a(x, y, t) with x = fft_coord(ix) * pitch.
// Fourier domain: holds a(q, Omega) in the continuum normalisation
//   a(q, Omega) = (2pi)^{-(d+1)/2} \int dx dt a(x, t) e^{-i q x + i Omega t},
// with q = fft_coord(ix) * dq and Omega = -fft_coord(it) * dOmega.
class FieldLattice {
 public:
  FieldLattice() = default;
  FieldLattice(Shape shape, double pitch, double dt, Beam beam);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  cplx& operator[](std::size_t i) { return data_[i]; }
  const cplx& operator[](std::size_t i) const { return data_[i]; }
  std::size_t index(std::size_t ix, std::size_t iy, std::size_t it) const {
    return lattice_index(shape_, ix, iy, it);
  }

  Domain domain = Domain::Position;
  Plane plane = Plane::Near;
  Beam beam = Beam::Signal;
  double z = 0.0;       // units of l_c
  double pitch = 1.0;   // transverse pitch in plane units (x_coh near, x_f far)
  double dt = 1.0;      // tau_coh; 1 in time-off mode

  double dq() const;      // reciprocal pitch, 2 pi / (N pitch)
  double domega() const;  // 0 in time-off mode
  double cell_volume() const;  // pitch^d dt
  double mode_volume() const;  // dq^d dOmega

  void to_fourier();
  void to_position();
  void fill(cplx v);

 private:
  Shape shape_{};
  cvec data_;
};

// Real scalar field over the transverse lattice, used for time-integrated
// quadratures, estimates, masks and oracle curves. Index layout [x][y].
struct RealMap {
  std::size_t nx = 0;
  std::size_t ny = 1;
  double pitch = 1.0;
  Plane plane = Plane::Near;
  rvec values;

  RealMap() = default;
  RealMap(std::size_t nx_, std::size_t ny_, double pitch_, Plane plane_)
      : nx(nx_), ny(ny_), pitch(pitch_), plane(plane_), values(nx_ * ny_, 0.0) {}
  std::size_t size() const { return values.size(); }
  double& operator()(std::size_t ix, std::size_t iy = 0) { return values[ix * ny + iy]; }
  double operator()(std::size_t ix, std::size_t iy = 0) const { return values[ix * ny + iy]; }
  int dims() const { return ny > 1 ? 2 : 1; }
};

// Complex counterpart of RealMap (masks, reconstructions).
struct ComplexMap {
  std::size_t nx = 0;
  std::size_t ny = 1;
  double pitch = 1.0;
  Plane plane = Plane::Near;
  cvec values;

  ComplexMap() = default;
  ComplexMap(std::size_t nx_, std::size_t ny_, double pitch_, Plane plane_)
      : nx(nx_), ny(ny_), pitch(pitch_), plane(plane_), values(nx_ * ny_, cplx(0.0)) {}
  std::size_t size() const { return values.size(); }
  cplx& operator()(std::size_t ix, std::size_t iy = 0) { return values[ix * ny + iy]; }
  const cplx& operator()(std::size_t ix, std::size_t iy = 0) const { return values[ix * ny + iy]; }
  int dims() const { return ny > 1 ? 2 : 1; }
};

// Unitary transverse DFT of a map in place:
//   out(k) = (pitch / sqrt(2pi))^d sum_x in(x) e^{sign i k x},
// and the pitch is replaced by the reciprocal pitch.
void unitary_dft(ComplexMap& m, int sign);

// Transverse coordinate value of index (ix, iy) along x or y in plane units.
inline double map_x(const RealMap& m, std::size_t ix) {
  return static_cast<double>(fft_coord(ix, m.nx)) * m.pitch;
}

}  // namespace ghost
