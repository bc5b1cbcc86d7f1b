#pragma once

#include <array>
#include <cstdint>
#include <cstddef>

namespace kpz {

inline constexpr int kMaxDim = 3;

// Lattice site. Coordinates beyond the active dimension are kept at zero so
// sites of different dimensions can share the same value type.
using Site = std::array<long long, kMaxDim>;

inline Site make_site(long long x0 = 0, long long x1 = 0, long long x2 = 0) {
  return Site{x0, x1, x2};
}

int coordinate_sum_parity(const Site& s, int dim);

// Floor that snaps to the nearest integer when the argument sits within a
// relative 1e-9 of it. Parabolic rescaling computes t/eps^2 and x/eps, whose
// exact values are often integers that land just below them in binary.
long long guarded_floor(double v);

// Greatest even integer <= v and that plus one, with the same snap guard.
long long guarded_floor_even(double v);
long long guarded_floor_odd(double v);

// Componentwise guarded floor of a real point.
Site floor_site(const double* x, int dim);

// Floor variants that adjust the first coordinate so the coordinate sum of
// the result has the requested parity (0 even, 1 odd). Coordinates beyond the
// first are the plain floors.
Site parity_floor(const double* x, int dim, int want_parity);

// Axis-aligned integer box, both bounds inclusive. Heights and kernel masses
// are stored densely in row-major order over such boxes.
struct Box {
  int dim = 1;
  Site lo{};
  Site hi{};

  static Box cube(int dim, long long lo, long long hi);
  static Box centered(int dim, const Site& center, long long radius);

  bool empty() const;
  long long side(int axis) const { return hi[axis] - lo[axis] + 1; }
  long long volume() const;
  bool contains(const Site& s) const;
  Box shrunk(long long by) const;
  Box dilated(long long by) const;

  std::size_t index_of(const Site& s) const;
  Site site_at(std::size_t index) const;
};

bool operator==(const Box& a, const Box& b);

// Visits the box in row-major (lexicographic) order. The fixed order is what
// makes every reduction in the library deterministic.
template <typename F>
void for_each_site(const Box& box, F&& f) {
  if (box.empty()) return;
  Site s = box.lo;
  while (true) {
    f(s);
    int axis = box.dim - 1;
    while (axis >= 0) {
      if (++s[axis] <= box.hi[axis]) break;
      s[axis] = box.lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
}

}  // namespace kpz
