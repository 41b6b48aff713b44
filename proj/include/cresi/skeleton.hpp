#pragma once

#include "cresi/graph.hpp"
#include "cresi/raster.hpp"

#include <cstdint>

namespace cresi {

/// Zhang-Suen thinning followed by removal of redundant staircase corners, so the
/// result is 8-connected, one pixel wide and free of 2x2 blocks.
BinaryMask skeletonize(const BinaryMask& mask);

/// Number of 8-neighbours set, per pixel (0 for background).
Grid<std::uint8_t> neighbor_counts(const BinaryMask& mask);

/// Converts a one-pixel skeleton into a graph. Pixels with != 2 neighbours become
/// nodes (adjacent junction pixels merge into one node at their centroid); chains
/// between nodes become edges whose geometry is the chain of pixel centers.
/// Isolated rings get a single node at their first pixel in row-major order.
/// Works in O(foreground) memory. Throws DomainError on any 2x2 foreground block.
RoadGraph skeleton_to_graph(const BinaryMask& skeleton, const GeoTransform& transform);

}  // namespace cresi
