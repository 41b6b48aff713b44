#include "cresi/skeleton.hpp"

#include "cresi/errors.hpp"

#include <algorithm>
#include <bit>
#include <array>
#include <cmath>
#include <limits>

namespace cresi {

namespace {

// Neighbour order P2..P9 (N, NE, E, SE, S, SW, W, NW) -> bits 0..7.
constexpr std::array<int, 8> kDr = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr std::array<int, 8> kDc = {0, 1, 1, 1, 0, -1, -1, -1};

inline unsigned neighbor_code(const BinaryMask& m, Eigen::Index r, Eigen::Index c) {
  unsigned code = 0;
  const Eigen::Index rows = m.rows(), cols = m.cols();
  const bool interior = r > 0 && c > 0 && r + 1 < rows && c + 1 < cols;
  for (int k = 0; k < 8; ++k) {
    const Eigen::Index rr = r + kDr[k], cc = c + kDc[k];
    if (interior || (rr >= 0 && cc >= 0 && rr < rows && cc < cols))
      if (m(rr, cc)) code |= 1u << k;
  }
  return code;
}

inline bool bit(unsigned code, int k) { return (code >> k) & 1u; }

struct ThinningTables {
  std::array<std::uint8_t, 256> first{}, second{}, staircase{};

  ThinningTables() {
    for (unsigned code = 0; code < 256; ++code) {
      const int b = std::popcount(code);
      int a = 0;
      for (int k = 0; k < 8; ++k) a += !bit(code, k) && bit(code, (k + 1) % 8);
      const bool p2 = bit(code, 0), p4 = bit(code, 2), p6 = bit(code, 4), p8 = bit(code, 6);
      const bool base = b >= 2 && b <= 6 && a == 1;
      first[code] = base && !(p2 && p4 && p6) && !(p4 && p6 && p8);
      second[code] = base && !(p2 && p4 && p8) && !(p2 && p6 && p8);

      // Yokoi 8-connectivity number on the ring E, NE, N, NW, W, SW, S, SE.
      const std::array<int, 8> ring = {2, 1, 0, 7, 6, 5, 4, 3};
      auto xbar = [&](int i) { return bit(code, ring[i % 8]) ? 0 : 1; };
      int yokoi = 0;
      for (int k = 0; k < 8; k += 2) yokoi += xbar(k) - xbar(k) * xbar(k + 1) * xbar(k + 2);
      const bool corner = (p2 && p4) || (p4 && p6) || (p6 && p8) || (p8 && p2);
      staircase[code] = yokoi == 1 && b >= 2 && corner;
    }
  }
};

const ThinningTables& tables() {
  static const ThinningTables t;
  return t;
}

}  // namespace

Grid<std::uint8_t> neighbor_counts(const BinaryMask& mask) {
  Grid<std::uint8_t> out = Grid<std::uint8_t>::Zero(mask.rows(), mask.cols());
  for (Eigen::Index r = 0; r < mask.rows(); ++r)
    for (Eigen::Index c = 0; c < mask.cols(); ++c)
      if (mask(r, c)) out(r, c) = static_cast<std::uint8_t>(std::popcount(neighbor_code(mask, r, c)));
  return out;
}

BinaryMask skeletonize(const BinaryMask& mask) {
  const auto& lut = tables();
  BinaryMask img = (mask != 0).cast<std::uint8_t>();
  struct Px {
    std::int32_t r, c;
  };
  std::vector<Px> live;
  for (Eigen::Index r = 0; r < img.rows(); ++r)
    for (Eigen::Index c = 0; c < img.cols(); ++c)
      if (img(r, c)) live.push_back({static_cast<std::int32_t>(r), static_cast<std::int32_t>(c)});

  std::vector<std::size_t> doomed;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      const auto& table = pass == 0 ? lut.first : lut.second;
      doomed.clear();
      for (std::size_t i = 0; i < live.size(); ++i)
        if (table[neighbor_code(img, live[i].r, live[i].c)]) doomed.push_back(i);
      if (doomed.empty()) continue;
      changed = true;
      for (auto i : doomed) img(live[i].r, live[i].c) = 0;
      std::erase_if(live, [&](const Px& p) { return img(p.r, p.c) == 0; });
    }
  }

  // Staircase corners are removed sequentially; each removal is topology preserving.
  bool removed = true;
  while (removed) {
    removed = false;
    for (const auto& p : live) {
      if (!img(p.r, p.c)) continue;
      if (lut.staircase[neighbor_code(img, p.r, p.c)]) {
        img(p.r, p.c) = 0;
        removed = true;
      }
    }
    std::erase_if(live, [&](const Px& p) { return img(p.r, p.c) == 0; });
  }
  return img;
}

namespace {

class SkeletonIndex {
 public:
  SkeletonIndex(const BinaryMask& m) : mask_(m), cols_(m.cols()) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        if (m(r, c)) pixels_.push_back(r * cols_ + c);
  }
  std::size_t size() const { return pixels_.size(); }
  std::int64_t pixel(std::size_t i) const { return pixels_[i]; }
  Eigen::Index row(std::size_t i) const { return pixels_[i] / cols_; }
  Eigen::Index col(std::size_t i) const { return pixels_[i] % cols_; }
  /// Index of foreground pixel (r, c) in the sorted pixel list.
  std::size_t find(Eigen::Index r, Eigen::Index c) const {
    const std::int64_t key = r * cols_ + c;
    return static_cast<std::size_t>(std::lower_bound(pixels_.begin(), pixels_.end(), key) - pixels_.begin());
  }
  /// Foreground neighbours of pixel i in fixed order.
  int neighbors(std::size_t i, std::array<std::size_t, 8>& out) const {
    const Eigen::Index r = row(i), c = col(i);
    int n = 0;
    for (int k = 0; k < 8; ++k) {
      const Eigen::Index rr = r + kDr[k], cc = c + kDc[k];
      if (rr < 0 || cc < 0 || rr >= mask_.rows() || cc >= mask_.cols() || !mask_(rr, cc)) continue;
      out[n++] = find(rr, cc);
    }
    return n;
  }

 private:
  const BinaryMask& mask_;
  Eigen::Index cols_;
  std::vector<std::int64_t> pixels_;
};

}  // namespace

RoadGraph skeleton_to_graph(const BinaryMask& skeleton, const GeoTransform& transform) {
  transform.validate();
  if (skeleton.rows() != transform.height || skeleton.cols() != transform.width)
    throw DomainError("skeleton dimensions do not match the transform");
  const SkeletonIndex px(skeleton);
  const std::size_t n = px.size();

  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Index r = px.row(i), c = px.col(i);
    if (r + 1 < skeleton.rows() && c + 1 < skeleton.cols() && skeleton(r, c + 1) && skeleton(r + 1, c) &&
        skeleton(r + 1, c + 1))
      throw DomainError("skeleton is not thin: 2x2 block at row " + std::to_string(r) + ", col " +
                        std::to_string(c));
  }

  std::vector<std::uint8_t> count(n);
  std::array<std::size_t, 8> nb{};
  for (std::size_t i = 0; i < n; ++i) count[i] = static_cast<std::uint8_t>(px.neighbors(i, nb));

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> node_of(n, kNone);  // index into node_pixels
  std::vector<std::vector<std::size_t>> node_pixels;

  // Junction clusters: 8-connected groups of pixels with >= 3 neighbours.
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] < 3 || node_of[i] != kNone) continue;
    const std::size_t id = node_pixels.size();
    node_pixels.emplace_back();
    std::vector<std::size_t> stack{i};
    node_of[i] = id;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      node_pixels[id].push_back(p);
      const int k = px.neighbors(p, nb);
      for (int j = 0; j < k; ++j)
        if (count[nb[j]] >= 3 && node_of[nb[j]] == kNone) {
          node_of[nb[j]] = id;
          stack.push_back(nb[j]);
        }
    }
  }
  // A chain pixel whose two neighbours both belong to one cluster is a bump on it.
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] != 2 || node_of[i] != kNone) continue;
    px.neighbors(i, nb);
    if (node_of[nb[0]] != kNone && node_of[nb[0]] == node_of[nb[1]] && count[nb[0]] >= 3) {
      node_of[i] = node_of[nb[0]];
      node_pixels[node_of[i]].push_back(i);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] >= 2 || node_of[i] != kNone) continue;
    node_of[i] = node_pixels.size();
    node_pixels.push_back({i});
  }
  // Node ids follow the row-major order of each node's first pixel.
  std::vector<std::size_t> order(node_pixels.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  for (auto& pixels : node_pixels) std::sort(pixels.begin(), pixels.end());
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return node_pixels[a].front() < node_pixels[b].front(); });
  std::vector<NodeId> node_id(node_pixels.size());
  for (std::size_t k = 0; k < order.size(); ++k) node_id[order[k]] = static_cast<NodeId>(k);

  auto center = [&](std::size_t i) {
    return transform.pixel_center(static_cast<int>(px.row(i)), static_cast<int>(px.col(i)));
  };

  RoadGraph g;
  g.transform = transform;
  std::vector<Point> node_pos(node_pixels.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& pixels = node_pixels[order[k]];
    Point sum = Point::Zero();
    for (auto p : pixels) sum += center(p);
    node_pos[order[k]] = sum / static_cast<double>(pixels.size());
    g.add_node(static_cast<NodeId>(k), node_pos[order[k]]);
  }

  std::vector<char> visited(n, 0);
  auto add = [&](std::size_t a, std::size_t b, Polyline geometry) {
    g.add_edge(make_edge(node_id[a], node_id[b], std::move(geometry)));
  };

  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t node = order[k];
    for (std::size_t p : node_pixels[node]) {
      const int deg = px.neighbors(p, nb);
      const std::array<std::size_t, 8> start = nb;
      for (int j = 0; j < deg; ++j) {
        const std::size_t q = start[j];
        if (node_of[q] == node) continue;
        if (node_of[q] != kNone) {
          // Two nodes touching directly; emit once from the lower pixel.
          if (p < q) add(node, node_of[q], {node_pos[node], node_pos[node_of[q]]});
          continue;
        }
        if (visited[q]) continue;
        Polyline line{node_pos[node]};
        std::size_t prev = p, cur = q;
        std::size_t end_node = kNone;
        while (true) {
          visited[cur] = 1;
          line.push_back(center(cur));
          std::array<std::size_t, 8> cn{};
          const int m = px.neighbors(cur, cn);
          std::size_t next = kNone;
          for (int t = 0; t < m; ++t)
            if (cn[t] != prev) {
              next = cn[t];
              break;
            }
          if (next == kNone || visited[next]) {  // malformed chain; close on the start node
            end_node = node;
            break;
          }
          if (node_of[next] != kNone) {
            end_node = node_of[next];
            break;
          }
          prev = cur;
          cur = next;
        }
        line.push_back(node_pos[end_node]);
        add(node, end_node, std::move(line));
      }
    }
  }

  // Whatever is left are isolated rings.
  for (std::size_t i = 0; i < n; ++i) {
    if (visited[i] || node_of[i] != kNone) continue;
    const NodeId id = g.add_node(center(i));
    Polyline line{center(i)};
    visited[i] = 1;
    px.neighbors(i, nb);
    std::size_t prev = i, cur = nb[0];
    while (cur != i) {
      visited[cur] = 1;
      line.push_back(center(cur));
      std::array<std::size_t, 8> cn{};
      const int m = px.neighbors(cur, cn);
      std::size_t next = i;
      for (int t = 0; t < m; ++t)
        if (cn[t] != prev) {
          next = cn[t];
          break;
        }
      prev = cur;
      cur = next;
    }
    line.push_back(center(i));
    g.add_edge(make_edge(id, id, std::move(line)));
  }
  return g;
}

}  // namespace cresi
