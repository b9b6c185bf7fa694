#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gratres/geometry.hpp"

namespace gratres {

enum class RegionTag : std::uint8_t { Vacuum = 0, Metal = 1 };

/// Conforming triangulation of the periodic cell with region tags,
/// classified boundary node sets and a left/right quasi-periodic pairing.
///
/// Boundary sets are disjoint; corners are resolved top/bottom first,
/// then left/right, then metal wall. The pairing, in contrast, covers
/// every node on x1 = 0 (corners included) since the quasi-periodic
/// constraint applies on the whole line.
struct Mesh {
    Eigen::MatrixX2d nodes;                      ///< node coordinates
    Eigen::MatrixX3i triangles;                  ///< CCW node index triples
    std::vector<RegionTag> tags;                 ///< one per triangle
    std::vector<int> left, right, top, bottom, wall;
    std::vector<std::pair<int, int>> pairs;      ///< (left node, right node)

    int node_count() const { return static_cast<int>(nodes.rows()); }
    int triangle_count() const { return static_cast<int>(triangles.rows()); }

    /// Mesh size: maximum inscribed-circle diameter over all triangles.
    double mesh_size() const;

    double total_area() const;
    double metal_area() const;
    double triangle_area(int t) const;

    /// Checks all structural invariants; throws InvalidTopology on failure.
    void validate() const;
};

/// Undirected boundary edge (endpoints sorted by x1) lying on one side.
struct BoundarySegment {
    int a, b;
};

enum class Side { Top, Bottom };

/// Boundary segments on x2 = +H (Top) or x2 = -H (Bottom), ordered by x1.
std::vector<BoundarySegment> boundary_segments(const Mesh& mesh, Side side);

/// Generate a graded, feature-aligned triangulation of the periodic cell.
/// Element size is at most target_h away from the slab and of order
/// target_h/grading near the slit walls and metal corners. For PEC
/// geometry the metal region is removed and its walls become a natural
/// (Neumann) boundary.
Mesh generate_mesh(const GratingGeometry& geometry, double target_h, double grading);

/// Red refinement: each triangle splits into 4 congruent children that
/// inherit the parent tag; boundary sets and pairing are rebuilt.
Mesh refine_uniform(const Mesh& mesh);

/// Plain ASCII round-trip format (sections NODES/TRIANGLES/TAGS/BOUNDARY/PAIRS).
void export_mesh(const Mesh& mesh, const std::string& path);
Mesh import_mesh(const std::string& path);

/// Rebuild boundary sets and left/right pairing from node coordinates.
/// Used after generation, refinement and import.
void rebuild_boundary(Mesh& mesh);

} // namespace gratres
