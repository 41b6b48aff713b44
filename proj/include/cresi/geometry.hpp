#pragma once

#include <Eigen/Core>

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace cresi {

/// Planar metric coordinate (x east, y north), meters.
using Point = Eigen::Vector2d;
using Polyline = std::vector<Point>;

/// Exact mph -> m/s factor.
inline constexpr double kMphToMps = 0.44704;

/// Pixel <-> world mapping of a north-up raster. The origin is the outer
/// corner of pixel (row 0, col 0); rows grow southward.
struct GeoTransform {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double pixel_size = 1.0;
  int width = 1;
  int height = 1;
  std::string crs_tag;

  /// World coordinate of the center of pixel (row, col).
  Point pixel_center(int row, int col) const {
    return {origin_x + (col + 0.5) * pixel_size, origin_y - (row + 0.5) * pixel_size};
  }
  /// Continuous pixel coordinates (col, row) of a world point.
  Eigen::Vector2d to_pixel(const Point& p) const {
    return {(p.x() - origin_x) / pixel_size, (origin_y - p.y()) / pixel_size};
  }
  /// Index of the pixel containing `p` (may lie outside the raster).
  Eigen::Vector2i pixel_of(const Point& p) const {
    const Eigen::Vector2d q = to_pixel(p);
    return {static_cast<int>(std::floor(q.x())), static_cast<int>(std::floor(q.y()))};
  }
  bool contains_pixel(int row, int col) const {
    return row >= 0 && col >= 0 && row < height && col < width;
  }
  /// Sub-window transform sharing this raster's pixel grid.
  GeoTransform window(int col_off, int row_off, int w, int h) const;

  void validate() const;
};

double polyline_length(std::span<const Point> line);

/// Closest point on segment [a, b] to p; `t` receives the segment parameter in [0, 1].
Point closest_on_segment(const Point& p, const Point& a, const Point& b, double* t = nullptr);

double distance_to_segment(const Point& p, const Point& a, const Point& b);

struct PolylineProjection {
  Point point;
  double distance = 0.0;
  double arc_position = 0.0;  ///< meters from the polyline start
  std::size_t segment = 0;
};

PolylineProjection project_onto_polyline(const Point& p, std::span<const Point> line);

/// Point at arc length `s` along the polyline (clamped to its ends).
Point point_at(std::span<const Point> line, double s);

/// Sub-polyline covering arc-length range [s0, s1].
Polyline slice(std::span<const Point> line, double s0, double s1);

/// Douglas-Peucker simplification; endpoints are always kept.
Polyline simplify(std::span<const Point> line, double tolerance);

/// True if the open segments (a,b) and (c,d) properly intersect or overlap.
bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d);

/// Unsigned angle between two vectors in degrees.
double angle_between_deg(const Eigen::Vector2d& u, const Eigen::Vector2d& v);

}  // namespace cresi
