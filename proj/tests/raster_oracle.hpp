#pragma once

// Scanline rasterizer used as an independent area/centroid oracle. Cells are
// counted when their centre lies inside; it shares no code with the region
// algebra.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

struct P {
  double x, y;
};
using RingD = std::vector<P>;
using Shape = std::vector<RingD>;  // even-odd over its rings

struct Raster {
  double count = 0, sx = 0, sy = 0, cell = 0;
  double area() const { return count * cell * cell; }
  double cx() const { return sx / count; }
  double cy() const { return sy / count; }
};

inline std::vector<std::pair<double, double>> row_intervals(const Shape& s, double y) {
  std::vector<double> xs;
  for (const auto& r : s) {
    const std::size_t n = r.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const P a = r[j], b = r[i];
      if ((a.y > y) != (b.y > y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
  }
  std::sort(xs.begin(), xs.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2) out.push_back({xs[i], xs[i + 1]});
  return out;
}

inline bool inside(const std::vector<std::pair<double, double>>& iv, double x) {
  for (const auto& [a, b] : iv)
    if (x >= a && x <= b) return true;
  return false;
}

// pred receives per-shape membership and decides membership of the result.
inline Raster rasterize(const std::vector<Shape>& shapes, const std::function<bool(const std::vector<bool>&)>& pred,
                        double cell) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const auto& s : shapes)
    for (const auto& r : s)
      for (const auto& p : r) x0 = std::min(x0, p.x), y0 = std::min(y0, p.y), x1 = std::max(x1, p.x), y1 = std::max(y1, p.y);
  Raster out;
  out.cell = cell;
  if (x0 > x1) return out;
  const long rows = static_cast<long>(std::ceil((y1 - y0) / cell)) + 1;
  std::vector<std::vector<std::pair<double, double>>> iv(shapes.size());
  std::vector<bool> mem(shapes.size());
  for (long rI = 0; rI < rows; ++rI) {
    const double y = y0 + (rI + 0.5) * cell;
    std::vector<double> cuts;
    for (std::size_t k = 0; k < shapes.size(); ++k) {
      iv[k] = row_intervals(shapes[k], y);
      for (const auto& [a, b] : iv[k]) cuts.push_back(a), cuts.push_back(b);
    }
    if (cuts.empty()) continue;
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a = cuts[c], b = cuts[c + 1];
      if (b <= a) continue;
      const double mid = 0.5 * (a + b);
      for (std::size_t k = 0; k < shapes.size(); ++k) mem[k] = inside(iv[k], mid);
      if (!pred(mem)) continue;
      // cell centres x0 + (i + 0.5) * cell inside [a, b)
      const long i0 = static_cast<long>(std::ceil((a - x0) / cell - 0.5));
      const long i1 = static_cast<long>(std::ceil((b - x0) / cell - 0.5)) - 1;
      if (i1 < i0) continue;
      const double n = static_cast<double>(i1 - i0 + 1);
      out.count += n;
      out.sy += n * y;
      out.sx += n * (x0 + cell * (0.5 * (i0 + i1) + 0.5));
    }
  }
  return out;
}

inline Raster rasterize_one(const Shape& s, double cell) {
  return rasterize({s}, [](const std::vector<bool>& m) { return m[0]; }, cell);
}

}  // namespace oracle
