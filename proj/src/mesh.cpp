#include "gratres/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace gratres {

namespace {

double signed_area(const Eigen::MatrixX2d& nodes, int a, int b, int c) {
    const double ax = nodes(a, 0), ay = nodes(a, 1);
    const double bx = nodes(b, 0), by = nodes(b, 1);
    const double cx = nodes(c, 0), cy = nodes(c, 1);
    return 0.5 * ((bx - ax) * (cy - ay) - (cx - ax) * (by - ay));
}

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

} // namespace

double Mesh::triangle_area(int t) const {
    return signed_area(nodes, triangles(t, 0), triangles(t, 1), triangles(t, 2));
}

double Mesh::mesh_size() const {
    double h = 0.0;
    for (int t = 0; t < triangle_count(); ++t) {
        const int a = triangles(t, 0), b = triangles(t, 1), c = triangles(t, 2);
        const double la = (nodes.row(b) - nodes.row(c)).norm();
        const double lb = (nodes.row(c) - nodes.row(a)).norm();
        const double lc = (nodes.row(a) - nodes.row(b)).norm();
        const double area = std::abs(triangle_area(t));
        // inscribed-circle diameter: 2 * area / semi-perimeter
        h = std::max(h, 4.0 * area / (la + lb + lc));
    }
    return h;
}

double Mesh::total_area() const {
    double a = 0.0;
    for (int t = 0; t < triangle_count(); ++t) a += std::abs(triangle_area(t));
    return a;
}

double Mesh::metal_area() const {
    double a = 0.0;
    for (int t = 0; t < triangle_count(); ++t)
        if (tags[t] == RegionTag::Metal) a += std::abs(triangle_area(t));
    return a;
}

void Mesh::validate() const {
    const int n = node_count();
    if (static_cast<int>(tags.size()) != triangle_count())
        throw InvalidTopology("tag count does not match triangle count");
    std::map<EdgeKey, int> edge_use;
    for (int t = 0; t < triangle_count(); ++t) {
        for (int v = 0; v < 3; ++v) {
            const int idx = triangles(t, v);
            if (idx < 0 || idx >= n) {
                std::ostringstream os;
                os << "triangle " << t << " references node index " << idx
                   << " out of range [0, " << n << ")";
                throw InvalidTopology(os.str());
            }
        }
        if (signed_area(nodes, triangles(t, 0), triangles(t, 1), triangles(t, 2)) <= 0.0) {
            std::ostringstream os;
            os << "triangle " << t << " is degenerate or negatively oriented";
            throw InvalidTopology(os.str());
        }
        for (int v = 0; v < 3; ++v)
            ++edge_use[edge_key(triangles(t, v), triangles(t, (v + 1) % 3))];
    }
    for (const auto& [e, count] : edge_use) {
        if (count > 2) {
            std::ostringstream os;
            os << "edge (" << e.first << ", " << e.second << ") shared by " << count
               << " triangles";
            throw InvalidTopology(os.str());
        }
    }
    // Left/right pairing must be a bijection with matching x2 values.
    const double tol = 1e-12 * (nodes.col(0).maxCoeff() - nodes.col(0).minCoeff());
    std::set<int> seen_l, seen_r;
    for (const auto& [l, r] : pairs) {
        if (l < 0 || l >= n || r < 0 || r >= n)
            throw InvalidTopology("pairing references node index out of range");
        if (!seen_l.insert(l).second || !seen_r.insert(r).second)
            throw InvalidTopology("pairing is not a bijection");
        if (std::abs(nodes(l, 1) - nodes(r, 1)) > tol)
            throw InvalidTopology("paired nodes have mismatched x2 coordinates");
    }
}

std::vector<BoundarySegment> boundary_segments(const Mesh& mesh, Side side) {
    const double y_target = (side == Side::Top) ? mesh.nodes.col(1).maxCoeff()
                                                : mesh.nodes.col(1).minCoeff();
    const double tol = 1e-12 * std::max(1.0, std::abs(y_target));
    std::map<EdgeKey, int> edge_use;
    for (int t = 0; t < mesh.triangle_count(); ++t)
        for (int v = 0; v < 3; ++v)
            ++edge_use[edge_key(mesh.triangles(t, v), mesh.triangles(t, (v + 1) % 3))];
    std::vector<BoundarySegment> segs;
    for (const auto& [e, count] : edge_use) {
        if (count != 1) continue;
        if (std::abs(mesh.nodes(e.first, 1) - y_target) <= tol &&
            std::abs(mesh.nodes(e.second, 1) - y_target) <= tol) {
            int a = e.first, b = e.second;
            if (mesh.nodes(a, 0) > mesh.nodes(b, 0)) std::swap(a, b);
            segs.push_back({a, b});
        }
    }
    std::sort(segs.begin(), segs.end(), [&](const BoundarySegment& s1, const BoundarySegment& s2) {
        return mesh.nodes(s1.a, 0) < mesh.nodes(s2.a, 0);
    });
    return segs;
}

void rebuild_boundary(Mesh& mesh) {
    mesh.left.clear();
    mesh.right.clear();
    mesh.top.clear();
    mesh.bottom.clear();
    mesh.wall.clear();
    mesh.pairs.clear();

    const double x_min = mesh.nodes.col(0).minCoeff();
    const double x_max = mesh.nodes.col(0).maxCoeff();
    const double y_min = mesh.nodes.col(1).minCoeff();
    const double y_max = mesh.nodes.col(1).maxCoeff();
    const double tol = 1e-12 * std::max(x_max - x_min, y_max - y_min);

    std::map<EdgeKey, int> edge_use;
    for (int t = 0; t < mesh.triangle_count(); ++t)
        for (int v = 0; v < 3; ++v)
            ++edge_use[edge_key(mesh.triangles(t, v), mesh.triangles(t, (v + 1) % 3))];
    std::set<int> boundary_nodes;
    for (const auto& [e, count] : edge_use) {
        if (count == 1) {
            boundary_nodes.insert(e.first);
            boundary_nodes.insert(e.second);
        }
    }

    std::vector<int> lefts, rights;
    for (int i : boundary_nodes) {
        const double x = mesh.nodes(i, 0);
        const double y = mesh.nodes(i, 1);
        const bool on_left = std::abs(x - x_min) <= tol;
        const bool on_right = std::abs(x - x_max) <= tol;
        if (on_left) lefts.push_back(i);
        if (on_right) rights.push_back(i);
        // Disjoint classification: top/bottom win over left/right over wall.
        if (std::abs(y - y_max) <= tol)
            mesh.top.push_back(i);
        else if (std::abs(y - y_min) <= tol)
            mesh.bottom.push_back(i);
        else if (on_left)
            mesh.left.push_back(i);
        else if (on_right)
            mesh.right.push_back(i);
        else
            mesh.wall.push_back(i);
    }

    auto by_y = [&](int a, int b) { return mesh.nodes(a, 1) < mesh.nodes(b, 1); };
    std::sort(lefts.begin(), lefts.end(), by_y);
    std::sort(rights.begin(), rights.end(), by_y);
    if (lefts.size() != rights.size())
        throw InvalidTopology("left/right boundary node counts differ");
    for (std::size_t j = 0; j < lefts.size(); ++j) {
        if (std::abs(mesh.nodes(lefts[j], 1) - mesh.nodes(rights[j], 1)) >
            1e-12 * std::max(1.0, x_max - x_min))
            throw InvalidTopology("left/right boundary nodes are not geometrically matched");
        mesh.pairs.emplace_back(lefts[j], rights[j]);
    }

    auto by_x = [&](int a, int b) { return mesh.nodes(a, 0) < mesh.nodes(b, 0); };
    std::sort(mesh.top.begin(), mesh.top.end(), by_x);
    std::sort(mesh.bottom.begin(), mesh.bottom.end(), by_x);
    std::sort(mesh.left.begin(), mesh.left.end(), by_y);
    std::sort(mesh.right.begin(), mesh.right.end(), by_y);
    std::sort(mesh.wall.begin(), mesh.wall.end());
}

Mesh refine_uniform(const Mesh& mesh) {
    Mesh out;
    const int n_old = mesh.node_count();

    // Midpoint node per edge, assigned in deterministic first-encounter order.
    std::map<EdgeKey, int> midpoint;
    std::vector<std::array<int, 2>> new_edges;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        for (int v = 0; v < 3; ++v) {
            const EdgeKey e = edge_key(mesh.triangles(t, v), mesh.triangles(t, (v + 1) % 3));
            if (midpoint.emplace(e, n_old + static_cast<int>(new_edges.size())).second)
                new_edges.push_back({e.first, e.second});
        }
    }

    out.nodes.resize(n_old + static_cast<int>(new_edges.size()), 2);
    out.nodes.topRows(n_old) = mesh.nodes;
    for (std::size_t i = 0; i < new_edges.size(); ++i)
        out.nodes.row(n_old + static_cast<int>(i)) =
            0.5 * (mesh.nodes.row(new_edges[i][0]) + mesh.nodes.row(new_edges[i][1]));

    out.triangles.resize(4 * mesh.triangle_count(), 3);
    out.tags.resize(4 * mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const int a = mesh.triangles(t, 0), b = mesh.triangles(t, 1), c = mesh.triangles(t, 2);
        const int ab = midpoint.at(edge_key(a, b));
        const int bc = midpoint.at(edge_key(b, c));
        const int ca = midpoint.at(edge_key(c, a));
        const std::array<std::array<int, 3>, 4> children = {{
            {a, ab, ca}, {ab, b, bc}, {ca, bc, c}, {ab, bc, ca}}};
        for (int j = 0; j < 4; ++j) {
            out.triangles.row(4 * t + j) << children[j][0], children[j][1], children[j][2];
            out.tags[4 * t + j] = mesh.tags[t];
        }
    }
    rebuild_boundary(out);
    return out;
}

} // namespace gratres
