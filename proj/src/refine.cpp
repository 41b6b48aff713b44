#include "cresi/refine.hpp"

#include "cresi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cresi {

std::vector<double> gaussian_kernel(double sigma_px) {
  if (!(sigma_px > 0.0)) throw DomainError("gaussian sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(4.0 * sigma_px));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-0.5 * (i * i) / (sigma_px * sigma_px));
    sum += taps[i + radius];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

RasterMask gaussian_smooth(const RasterMask& mask, double kernel_m) {
  if (!(kernel_m > 0.0)) throw DomainError("smoothing kernel must be > 0");
  const double sigma_px = kernel_m / mask.transform.pixel_size;
  RasterMask out = mask;
  for (auto& band : out.bands) band = gaussian_blur(band, sigma_px).cwiseMax(0.0f).cwiseMin(1.0f);
  return out;
}

BinaryMask binarize(const Band& band, double threshold) {
  return (band >= static_cast<float>(threshold)).cast<std::uint8_t>();
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Meijster et al. exact squared EDT; `emit(row, const int32_t* values)` receives one row at a time.
template <typename Emit>
void squared_edt_rows(const BinaryMask& mask, Emit&& emit) {
  const Eigen::Index rows = mask.rows();
  const Eigen::Index cols = mask.cols();
  if (rows == 0 || cols == 0) return;
  const std::int32_t inf = static_cast<std::int32_t>(rows + cols + 1);

  Grid<std::int32_t> g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) g(0, c) = mask(0, c) ? 0 : inf;
  for (Eigen::Index r = 1; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) g(r, c) = mask(r, c) ? 0 : std::min(inf, g(r - 1, c) + 1);
  for (Eigen::Index r = rows - 2; r >= 0; --r)
    for (Eigen::Index c = 0; c < cols; ++c) g(r, c) = std::min(g(r, c), g(r + 1, c) + 1);

  std::vector<std::int64_t> s(cols), t(cols);
  std::vector<std::int32_t> out(cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::int32_t* gr = &g(r, 0);
    auto f = [&](std::int64_t x, std::int64_t i) {
      const std::int64_t gi = gr[i];
      return (x - i) * (x - i) + gi * gi;
    };
    auto sep = [&](std::int64_t i, std::int64_t u) {
      const std::int64_t gi = gr[i], gu = gr[u];
      return floor_div(u * u - i * i + gu * gu - gi * gi, 2 * (u - i));
    };
    Eigen::Index q = 0;
    s[0] = 0;
    t[0] = 0;
    for (Eigen::Index u = 1; u < cols; ++u) {
      while (q >= 0 && f(t[q], s[q]) > f(t[q], u)) --q;
      if (q < 0) {
        q = 0;
        s[0] = u;
      } else {
        const std::int64_t w = 1 + sep(s[q], u);
        if (w < cols) {
          ++q;
          s[q] = u;
          t[q] = w;
        }
      }
    }
    for (Eigen::Index u = cols - 1; u >= 0; --u) {
      out[u] = static_cast<std::int32_t>(f(u, s[q]));
      if (u == t[q]) --q;
    }
    emit(r, out.data());
  }
}

}  // namespace

Grid<std::int32_t> squared_distance_to_foreground(const BinaryMask& mask) {
  Grid<std::int32_t> dist(mask.rows(), mask.cols());
  squared_edt_rows(mask, [&](Eigen::Index r, const std::int32_t* row) {
    std::copy(row, row + mask.cols(), &dist(r, 0));
  });
  return dist;
}

BinaryMask dilate_disk(const BinaryMask& mask, double radius_px) {
  if (!(radius_px >= 0.0)) throw DomainError("disk radius must be >= 0");
  const double r2 = radius_px * radius_px;
  BinaryMask out(mask.rows(), mask.cols());
  if (!mask.any()) {
    out.setZero();
    return out;
  }
  squared_edt_rows(mask, [&](Eigen::Index r, const std::int32_t* row) {
    for (Eigen::Index c = 0; c < mask.cols(); ++c) out(r, c) = row[c] <= r2 ? 1 : 0;
  });
  return out;
}

BinaryMask erode_disk(const BinaryMask& mask, double radius_px) {
  const BinaryMask complement = (mask == 0).cast<std::uint8_t>();
  return (dilate_disk(complement, radius_px) == 0).cast<std::uint8_t>();
}

BinaryMask morph_refine(const BinaryMask& mask, double pixel_size, double kernel_m) {
  if (!(pixel_size > 0.0)) throw DomainError("pixel size must be > 0");
  const double radius = kernel_m / pixel_size;
  BinaryMask closed = erode_disk(dilate_disk(mask, radius), radius);
  return dilate_disk(erode_disk(closed, radius), radius);
}

namespace {

struct Run {
  std::int32_t row, start, end;  // inclusive
};

struct RunLabels {
  std::vector<Run> runs;
  std::vector<std::size_t> component;  // per run
  std::vector<std::int64_t> area;      // per component
};

RunLabels label_runs(const BinaryMask& mask, std::uint8_t value, bool eight_connected) {
  RunLabels out;
  std::vector<std::size_t> row_begin(mask.rows() + 1, 0);
  for (Eigen::Index r = 0; r < mask.rows(); ++r) {
    row_begin[r] = out.runs.size();
    Eigen::Index c = 0;
    while (c < mask.cols()) {
      if (mask(r, c) != value) {
        ++c;
        continue;
      }
      const Eigen::Index start = c;
      while (c < mask.cols() && mask(r, c) == value) ++c;
      out.runs.push_back({static_cast<std::int32_t>(r), static_cast<std::int32_t>(start),
                          static_cast<std::int32_t>(c - 1)});
    }
  }
  row_begin[mask.rows()] = out.runs.size();

  std::vector<std::size_t> parent(out.runs.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const std::int32_t slack = eight_connected ? 1 : 0;
  for (Eigen::Index r = 1; r < mask.rows(); ++r) {
    std::size_t a = row_begin[r - 1];
    const std::size_t a_end = row_begin[r];
    for (std::size_t b = row_begin[r]; b < row_begin[r + 1]; ++b) {
      const Run& rb = out.runs[b];
      while (a < a_end && out.runs[a].end + slack < rb.start) ++a;
      for (std::size_t k = a; k < a_end && out.runs[k].start - slack <= rb.end; ++k) {
        const auto x = find(k), y = find(b);
        if (x != y) parent[std::max(x, y)] = std::min(x, y);
      }
    }
  }
  out.component.resize(out.runs.size());
  std::vector<std::size_t> root_id(out.runs.size(), SIZE_MAX);
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    const auto root = find(i);
    if (root_id[root] == SIZE_MAX) {
      root_id[root] = out.area.size();
      out.area.push_back(0);
    }
    out.component[i] = root_id[root];
    out.area[root_id[root]] += out.runs[i].end - out.runs[i].start + 1;
  }
  return out;
}

}  // namespace

ComponentSummary component_areas(const BinaryMask& mask, std::uint8_t value, bool eight_connected) {
  return {label_runs(mask, value, eight_connected).area};
}

BinaryMask remove_small(const BinaryMask& mask, double pixel_size, double min_area_m2) {
  if (!(pixel_size > 0.0)) throw DomainError("pixel size must be > 0");
  // area < min  <=>  pixels * ps^2 < min; compare in area units to keep the boundary exact.
  BinaryMask out = mask;
  const double px_area = pixel_size * pixel_size;
  auto below = [&](std::int64_t pixels) { return static_cast<double>(pixels) * px_area < min_area_m2; };
  for (std::uint8_t value : {std::uint8_t{1}, std::uint8_t{0}}) {
    const bool eight = value == 1;
    const RunLabels labels = label_runs(out, value, eight);
    for (std::size_t i = 0; i < labels.runs.size(); ++i) {
      if (!below(labels.area[labels.component[i]])) continue;
      const Run& run = labels.runs[i];
      out.row(run.row).segment(run.start, run.end - run.start + 1).setConstant(value ? 0 : 1);
    }
  }
  return out;
}

Band road_band(const RasterMask& mask, const RefineConfig& cfg) {
  if (mask.kind == MaskKind::continuous)
    return (mask.bands.front() * static_cast<float>(cfg.continuous_gain)).cwiseMin(1.0f);
  return flatten(mask);
}

BinaryMask refine_pipeline(const RasterMask& mask, const RefineConfig& cfg) {
  const double ps = mask.transform.pixel_size;
  if (!(cfg.smooth_kernel_m > 0.0)) throw DomainError("smooth_kernel_m must be > 0");
  mask.validate();
  Band smoothed = gaussian_blur(road_band(mask, cfg), cfg.smooth_kernel_m / ps);
  BinaryMask binary = binarize(smoothed, cfg.threshold);
  smoothed.resize(0, 0);
  binary = morph_refine(binary, ps, cfg.morph_kernel_m);
  return remove_small(binary, ps, cfg.min_area_m2);
}

}  // namespace cresi
