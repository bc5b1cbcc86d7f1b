#include "kpz/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace kpz {

namespace {
constexpr double kSnapRelTol = 1e-9;
}

int coordinate_sum_parity(const Site& s, int dim) {
  long long sum = 0;
  for (int i = 0; i < dim; ++i) sum += s[i];
  return static_cast<int>(((sum % 2) + 2) % 2);
}

long long guarded_floor(double v) {
  const double snapped = std::nearbyint(v);
  const double scale = std::fmax(1.0, std::fabs(snapped));
  if (std::fabs(v - snapped) <= kSnapRelTol * scale) {
    return static_cast<long long>(snapped);
  }
  return static_cast<long long>(std::floor(v));
}

long long guarded_floor_even(double v) {
  return 2 * guarded_floor(v / 2.0);
}

long long guarded_floor_odd(double v) {
  return guarded_floor_even(v) + 1;
}

Site floor_site(const double* x, int dim) {
  Site s{};
  for (int i = 0; i < dim; ++i) s[i] = guarded_floor(x[i]);
  return s;
}

Site parity_floor(const double* x, int dim, int want_parity) {
  Site s{};
  long long rest = 0;
  for (int i = 1; i < dim; ++i) {
    s[i] = guarded_floor(x[i]);
    rest += s[i];
  }
  const int rest_parity = static_cast<int>(((rest % 2) + 2) % 2);
  if (rest_parity == (want_parity % 2)) {
    s[0] = guarded_floor_even(x[0]);
  } else {
    s[0] = guarded_floor_odd(x[0]);
  }
  return s;
}

Box Box::cube(int dim, long long lo, long long hi) {
  Box b;
  b.dim = dim;
  for (int i = 0; i < dim; ++i) {
    b.lo[i] = lo;
    b.hi[i] = hi;
  }
  return b;
}

Box Box::centered(int dim, const Site& center, long long radius) {
  Box b;
  b.dim = dim;
  for (int i = 0; i < dim; ++i) {
    b.lo[i] = center[i] - radius;
    b.hi[i] = center[i] + radius;
  }
  return b;
}

bool Box::empty() const {
  for (int i = 0; i < dim; ++i) {
    if (lo[i] > hi[i]) return true;
  }
  return false;
}

long long Box::volume() const {
  if (empty()) return 0;
  long long v = 1;
  for (int i = 0; i < dim; ++i) v *= side(i);
  return v;
}

bool Box::contains(const Site& s) const {
  for (int i = 0; i < dim; ++i) {
    if (s[i] < lo[i] || s[i] > hi[i]) return false;
  }
  return true;
}

Box Box::shrunk(long long by) const {
  Box b = *this;
  for (int i = 0; i < dim; ++i) {
    b.lo[i] += by;
    b.hi[i] -= by;
  }
  return b;
}

Box Box::dilated(long long by) const {
  return shrunk(-by);
}

std::size_t Box::index_of(const Site& s) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim; ++i) {
    idx = idx * static_cast<std::size_t>(side(i)) +
          static_cast<std::size_t>(s[i] - lo[i]);
  }
  return idx;
}

Site Box::site_at(std::size_t index) const {
  Site s{};
  for (int i = dim - 1; i >= 0; --i) {
    const auto len = static_cast<std::size_t>(side(i));
    s[i] = lo[i] + static_cast<long long>(index % len);
    index /= len;
  }
  return s;
}

bool operator==(const Box& a, const Box& b) {
  if (a.dim != b.dim) return false;
  for (int i = 0; i < a.dim; ++i) {
    if (a.lo[i] != b.lo[i] || a.hi[i] != b.hi[i]) return false;
  }
  return true;
}

}  // namespace kpz
