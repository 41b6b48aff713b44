#include "cresi/geometry.hpp"

#include "cresi/errors.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace cresi {

GeoTransform GeoTransform::window(int col_off, int row_off, int w, int h) const {
  GeoTransform t = *this;
  t.origin_x = origin_x + col_off * pixel_size;
  t.origin_y = origin_y - row_off * pixel_size;
  t.width = w;
  t.height = h;
  return t;
}

void GeoTransform::validate() const {
  if (!(pixel_size > 0.0) || !std::isfinite(pixel_size))
    throw DomainError("GeoTransform: pixel_size must be > 0");
  if (width < 1 || height < 1) throw DomainError("GeoTransform: width and height must be >= 1");
  if (!std::isfinite(origin_x) || !std::isfinite(origin_y))
    throw DomainError("GeoTransform: origin must be finite");
}

double polyline_length(std::span<const Point> line) {
  double total = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) total += (line[i] - line[i - 1]).norm();
  return total;
}

Point closest_on_segment(const Point& p, const Point& a, const Point& b, double* t) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  double u = 0.0;
  if (len2 > 0.0) u = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  if (t) *t = u;
  return a + u * ab;
}

double distance_to_segment(const Point& p, const Point& a, const Point& b) {
  return (p - closest_on_segment(p, a, b)).norm();
}

PolylineProjection project_onto_polyline(const Point& p, std::span<const Point> line) {
  PolylineProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  if (line.empty()) return best;
  if (line.size() == 1) {
    best.point = line[0];
    best.distance = (p - line[0]).norm();
    return best;
  }
  double walked = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    double t = 0.0;
    const Point q = closest_on_segment(p, line[i], line[i + 1], &t);
    const double seg_len = (line[i + 1] - line[i]).norm();
    const double d = (p - q).norm();
    if (d < best.distance) {
      best.point = q;
      best.distance = d;
      best.arc_position = walked + t * seg_len;
      best.segment = i;
    }
    walked += seg_len;
  }
  return best;
}

Point point_at(std::span<const Point> line, double s) {
  if (line.empty()) return Point::Zero();
  if (s <= 0.0) return line.front();
  double walked = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const double seg_len = (line[i + 1] - line[i]).norm();
    if (walked + seg_len >= s && seg_len > 0.0) {
      const double t = (s - walked) / seg_len;
      return line[i] + t * (line[i + 1] - line[i]);
    }
    walked += seg_len;
  }
  return line.back();
}

Polyline slice(std::span<const Point> line, double s0, double s1) {
  Polyline out;
  if (line.empty()) return out;
  if (s1 < s0) std::swap(s0, s1);
  out.push_back(point_at(line, s0));
  double walked = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    walked += (line[i] - line[i - 1]).norm();
    if (walked > s0 && walked < s1) out.push_back(line[i]);
  }
  out.push_back(point_at(line, s1));
  return out;
}

namespace {

void douglas_peucker(std::span<const Point> line, std::size_t first, std::size_t last,
                     double tolerance, std::vector<char>& keep) {
  // Explicit stack: pixel chains can be tens of thousands of points long.
  std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    if (hi <= lo + 1) continue;
    double worst = -1.0;
    std::size_t worst_i = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double d = distance_to_segment(line[i], line[lo], line[hi]);
      if (d > worst) {
        worst = d;
        worst_i = i;
      }
    }
    if (worst > tolerance) {
      keep[worst_i] = 1;
      stack.emplace_back(lo, worst_i);
      stack.emplace_back(worst_i, hi);
    }
  }
}

}  // namespace

Polyline simplify(std::span<const Point> line, double tolerance) {
  if (line.size() <= 2) return Polyline(line.begin(), line.end());
  std::vector<char> keep(line.size(), 0);
  keep.front() = keep.back() = 1;
  const bool closed = (line.front() - line.back()).norm() == 0.0;
  if (closed) {
    // A ring degenerates to a point under plain DP; anchor it at the farthest vertex.
    std::size_t far = 0;
    double best = -1.0;
    for (std::size_t i = 1; i + 1 < line.size(); ++i) {
      const double d = (line[i] - line.front()).norm();
      if (d > best) {
        best = d;
        far = i;
      }
    }
    keep[far] = 1;
    douglas_peucker(line, 0, far, tolerance, keep);
    douglas_peucker(line, far, line.size() - 1, tolerance, keep);
  } else {
    douglas_peucker(line, 0, line.size() - 1, tolerance, keep);
  }
  Polyline out;
  for (std::size_t i = 0; i < line.size(); ++i)
    if (keep[i]) out.push_back(line[i]);
  return out;
}

namespace {
double cross(const Eigen::Vector2d& u, const Eigen::Vector2d& v) { return u.x() * v.y() - u.y() * v.x(); }
}  // namespace

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_segment = [](const Point& p, const Point& q, const Point& r) {
    return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) &&
           std::min(p.y(), q.y()) <= r.y() && r.y() <= std::max(p.y(), q.y());
  };
  if (d1 == 0 && on_segment(a, b, c)) return true;
  if (d2 == 0 && on_segment(a, b, d)) return true;
  if (d3 == 0 && on_segment(c, d, a)) return true;
  if (d4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double angle_between_deg(const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 180.0;
  const double c = std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

}  // namespace cresi
