#include "smsearch/synthetic_cvs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace smsearch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNear = 1e-3;       // metres in front of the camera
constexpr double kPixelSlack = 1e-4;  // pixels

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Solid {
  Prism prism;
  HitClass cls;
  int id;
};

struct Span {
  int solid;
  int c0, c1;
};

double cross2(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

std::vector<Point2> hull(std::vector<Point2> p) {
  std::sort(p.begin(), p.end(), [](const Point2& a, const Point2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (p.size() < 3) return p;
  std::vector<Point2> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

// Image-plane silhouette of the part of a prism in front of the camera.
std::vector<Point2> silhouette(const Prism& pr, const Mat3& R, const Vec3& c, const CameraIntrinsics& intr) {
  const std::size_t n = pr.footprint.v.size();
  std::vector<Vec3> q(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& g = pr.footprint.v[i];
    q[i] = R * (Vec3(g.x(), g.y(), pr.z0) - c);
    q[n + i] = R * (Vec3(g.x(), g.y(), pr.z1) - c);
  }
  std::vector<Vec3> keep;
  for (const auto& v : q)
    if (v.z() >= kNear) keep.push_back(v);
  if (keep.empty()) return {};
  if (keep.size() < q.size()) {
    auto edge = [&](std::size_t a, std::size_t b) {
      const Vec3 &u = q[a], &v = q[b];
      if ((u.z() < kNear) != (v.z() < kNear)) {
        const double t = (kNear - u.z()) / (v.z() - u.z());
        Vec3 x = u + t * (v - u);
        x.z() = kNear;
        keep.push_back(x);
      }
    };
    for (std::size_t i = 0; i < n; ++i) {
      edge(i, (i + 1) % n);
      edge(n + i, n + (i + 1) % n);
      edge(i, n + i);
    }
  }
  std::vector<Point2> img;
  img.reserve(keep.size());
  for (const auto& v : keep)
    img.emplace_back(-intr.f_c * v.x() / v.z() + 0.5 * intr.n_cols, -intr.f_r * v.y() / v.z() + 0.5 * intr.n_rows);
  return hull(std::move(img));
}

// x-extent of a convex polygon inside the strip a <= y <= b; false if empty.
bool strip_extent(const std::vector<Point2>& h, double a, double b, double& xmin, double& xmax) {
  xmin = kInf;
  xmax = -kInf;
  const std::size_t n = h.size();
  if (n == 1) {
    if (h[0].y() < a || h[0].y() > b) return false;
    xmin = xmax = h[0].x();
    return true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    Point2 p = h[i], q = h[(i + 1) % n];
    if (p.y() > q.y()) std::swap(p, q);
    if (q.y() < a || p.y() > b) continue;
    auto at = [&](double y) {
      if (q.y() == p.y()) return p.x();
      return p.x() + (q.x() - p.x()) * (y - p.y()) / (q.y() - p.y());
    };
    const double y0 = std::max(p.y(), a), y1 = std::min(q.y(), b);
    const double x0 = p.y() >= a ? p.x() : at(y0), x1 = q.y() <= b ? q.x() : at(y1);
    xmin = std::min({xmin, x0, x1});
    xmax = std::max({xmax, x0, x1});
    if (q.y() == p.y()) {
      xmin = std::min(xmin, q.x());
      xmax = std::max(xmax, q.x());
    }
  }
  return xmin <= xmax;
}

RayHit nearest(const std::vector<Solid>& solids, const Span* spans, std::size_t n_spans, int c, const Vec3& o,
               const Vec3& d) {
  RayHit best{kInf, HitClass::None, -1};
  if (d.z() < 0) best = {-o.z() / d.z(), HitClass::Ground, 0};
  for (std::size_t s = 0; s < n_spans; ++s) {
    if (c < spans[s].c0 || c > spans[s].c1) continue;
    const Solid& so = solids[spans[s].solid];
    const double t = ray_prism(so.prism, o, d);
    if (t > 0 && t < best.distance) best = {t, so.cls, so.id};
  }
  return best;
}

}  // namespace

const char* label_name(Label l) {
  switch (l) {
    case Label::Ground: return "ground";
    case Label::Target: return "target";
    case Label::Obstacle: return "obstacle";
    case Label::Unknown: return "unknown";
  }
  return "?";
}

UavPose uav_pose(const UavTruth& u) { return UavPose{u.position(), u.yaw, Vec3::Zero()}; }

double pixel_noise(std::uint64_t seed, std::uint64_t frame, int uav, int pixel, double lo, double hi) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ frame);
  h = splitmix(h ^ static_cast<std::uint64_t>(uav));
  h = splitmix(h ^ static_cast<std::uint64_t>(pixel));
  return lo + (hi - lo) * (static_cast<double>(h >> 11) * 0x1.0p-53);
}

CvsFrame render(const World& w, int uav, const CameraIntrinsics& intr, const CvsParams& p, std::uint64_t frame) {
  const int R_ = intr.n_rows, C_ = intr.n_cols;
  const UavPose pose = uav_pose(w.uavs.at(uav));
  const Mat3 R = world_to_camera_rotation(pose, intr);
  const Mat3 Rt = R.transpose();
  const Vec3 o = optical_center(pose);

  std::vector<Solid> solids;
  for (std::size_t i = 0; i < w.obstacles.size(); ++i)
    for (const auto& lv : w.obstacles[i].levels) solids.push_back({lv, HitClass::Obstacle, static_cast<int>(i)});
  for (std::size_t j = 0; j < w.targets.size(); ++j)
    solids.push_back({target_body(w.targets[j], w.tp), HitClass::Target, static_cast<int>(j)});
  for (std::size_t u = 0; u < w.uavs.size(); ++u)
    if (static_cast<int>(u) != uav) solids.push_back({uav_body(w.uavs[u], w.uav_body), HitClass::Uav, static_cast<int>(u)});

  // spans of touched pixels, per row
  std::vector<std::vector<Span>> rows(R_ + 1);
  for (std::size_t s = 0; s < solids.size(); ++s) {
    const auto h = silhouette(solids[s].prism, R, o, intr);
    if (h.empty()) continue;
    double ymin = kInf, ymax = -kInf;
    for (const auto& q : h) ymin = std::min(ymin, q.y()), ymax = std::max(ymax, q.y());
    const int r0 = std::max(1, static_cast<int>(std::ceil(ymin - kPixelSlack)));
    const int r1 = std::min(R_, static_cast<int>(std::floor(ymax + kPixelSlack)) + 1);
    for (int r = r0; r <= r1; ++r) {
      double x0, x1;
      if (!strip_extent(h, r - 1 - kPixelSlack, r + kPixelSlack, x0, x1)) continue;
      const double c0 = std::max(1.0, std::ceil(x0 - kPixelSlack));
      const double c1 = std::min(static_cast<double>(C_), std::floor(x1 + kPixelSlack) + 1);
      if (c0 <= c1) rows[r].push_back({static_cast<int>(s), static_cast<int>(c0), static_cast<int>(c1)});
    }
  }

  // world directions of the corner lattice (x = 0..C_, y = 0..R_)
  std::vector<Vec3> corner(static_cast<std::size_t>(R_ + 1) * (C_ + 1));
  for (int y = 0; y <= R_; ++y)
    for (int x = 0; x <= C_; ++x) corner[static_cast<std::size_t>(y) * (C_ + 1) + x] = Rt * pixel_ray(intr, x, y);
  auto cdir = [&](int x, int y) -> const Vec3& { return corner[static_cast<std::size_t>(y) * (C_ + 1) + x]; };

  CvsFrame f{DepthMap(R_, C_, kInf), LabelMap(R_, C_, Label::Unknown), Image<RayHit>(R_, C_, RayHit{})};
  for (int r = 1; r <= R_; ++r) {
    const auto& sp = rows[r];
    for (int c = 1; c <= C_; ++c) {
      const Vec3 dc = Rt * pixel_ray(intr, c - 0.5, r - 0.5);
      const Vec3* ds[4] = {&cdir(c, r), &cdir(c, r - 1), &cdir(c - 1, r - 1), &cdir(c - 1, r)};
      bool touched = false;
      for (const auto& s : sp) touched |= c >= s.c0 && c <= s.c1;
      RayHit centre;
      Label lab = Label::Unknown;
      if (!touched) {
        centre = dc.z() < 0 ? RayHit{-o.z() / dc.z(), HitClass::Ground, 0} : RayHit{0, HitClass::None, -1};
        bool down = dc.z() < 0;
        for (const Vec3* d : ds) down &= d->z() < 0;
        if (down) lab = Label::Ground;
      } else {
        centre = nearest(solids, sp.data(), sp.size(), c, o, dc);
        if (!std::isfinite(centre.distance)) centre = {0, HitClass::None, -1};
        HitClass cls = centre.cls;
        bool same = cls == HitClass::Obstacle || cls == HitClass::Target;
        for (int k = 0; k < 4 && same; ++k) same = nearest(solids, sp.data(), sp.size(), c, o, *ds[k]).cls == cls;
        if (same) lab = cls == HitClass::Obstacle ? Label::Obstacle : Label::Target;
      }
      f.truth.at(r, c) = centre;
      if (centre.cls != HitClass::None) {
        const int idx = (r - 1) * C_ + (c - 1);
        f.depth.at(r, c) = centre.distance * (1 + pixel_noise(p.seed, frame, uav, idx, p.noise_lo, p.noise_hi));
      }
      f.labels.at(r, c) = lab;
    }
  }

  if (p.strict_labels) {
    const LabelMap raw = f.labels;
    for (int r = 1; r <= R_; ++r)
      for (int c = 1; c <= C_; ++c) {
        const Label l = raw.at(r, c);
        if (l == Label::Unknown) continue;
        bool edge = false;
        for (int dr = -1; dr <= 1 && !edge; ++dr)
          for (int dc = -1; dc <= 1 && !edge; ++dc) {
            const int rr = r + dr, cc = c + dc;
            if (rr < 1 || rr > R_ || cc < 1 || cc > C_) continue;
            edge = raw.at(rr, cc) != l;
          }
        if (edge) f.labels.at(r, c) = Label::Unknown;
      }
  }
  return f;
}

Mask reliable_mask(const DepthMap& d, const CameraIntrinsics& intr, double noise_lo) {
  Mask m(d.rows, d.cols, 0);
  for (std::size_t i = 0; i < d.data.size(); ++i)
    m.data[i] = std::isfinite(d.data[i]) && d.data[i] / (1 + noise_lo) <= intr.d_max;
  return m;
}

std::vector<Detection> detect(const CvsFrame& f, const Mask& reliable, const CvsParams& p, int n_targets) {
  struct Acc {
    int n = 0;
    double nearest = kInf;
    int r_lo = 1 << 30, r_hi = -1, c_lo = 1 << 30, c_hi = -1;
  };
  std::vector<Acc> acc(n_targets);
  for (int r = 1; r <= f.labels.rows; ++r)
    for (int c = 1; c <= f.labels.cols; ++c) {
      if (f.labels.at(r, c) != Label::Target || !reliable.at(r, c)) continue;
      const RayHit& h = f.truth.at(r, c);
      if (h.cls != HitClass::Target || h.id < 0 || h.id >= n_targets) continue;
      Acc& a = acc[h.id];
      ++a.n;
      a.nearest = std::min(a.nearest, f.depth.at(r, c));
      a.r_lo = std::min(a.r_lo, r), a.r_hi = std::max(a.r_hi, r);
      a.c_lo = std::min(a.c_lo, c), a.c_hi = std::max(a.c_hi, c);
    }
  std::vector<Detection> out;
  for (int j = 0; j < n_targets; ++j) {
    const Acc& a = acc[j];
    if (a.n < p.min_pixels || !(a.nearest <= p.d_ident)) continue;
    out.push_back({j, std::max(1, a.r_lo - p.box_pad), std::min(f.labels.rows, a.r_hi + p.box_pad),
                   std::max(1, a.c_lo - p.box_pad), std::min(f.labels.cols, a.c_hi + p.box_pad)});
  }
  return out;
}

bool check_observation_assumption(const World& w, int uav, const CameraIntrinsics& intr, int j) {
  const UavPose pose = uav_pose(w.uavs.at(uav));
  const TargetTruth& t = w.targets.at(j);
  const Vec3 g(t.p.x(), t.p.y(), 0);
  const Vec3 c = optical_center(pose);
  const Vec3 q = world_to_camera(pose, intr, g);
  if (!(q.z() > 0) || !in_image(intr, project(pose, intr, g)) || (g - c).norm() > intr.d_max) return true;
  const double len = (g - c).norm();
  const double hit = ray_prism(target_body(t, w.tp), c, (g - c) / len);
  return hit < len;
}

void write_pgm(const std::string& path, const DepthMap& d, double metres_per_level) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "P5\n" << d.cols << " " << d.rows << "\n65535\n";
  for (double v : d.data) {
    const double q = std::isfinite(v) ? std::min(65535.0, std::round(v / metres_per_level)) : 65535.0;
    const auto u = static_cast<std::uint16_t>(q);
    os.put(static_cast<char>(u >> 8));
    os.put(static_cast<char>(u & 0xff));
  }
}

void write_pgm(const std::string& path, const LabelMap& l) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "P5\n" << l.cols << " " << l.rows << "\n255\n";
  // ground 0, target 255, obstacle 128, unknown 64
  for (Label v : l.data) {
    const unsigned char g = v == Label::Ground ? 0 : v == Label::Target ? 255 : v == Label::Obstacle ? 128 : 64;
    os.put(static_cast<char>(g));
  }
}

}  // namespace smsearch
