#include <algorithm>
#include <cmath>
#include <vector>

#include "gratres/mesh.hpp"

namespace gratres {

namespace {

/// Points on [a,b] equidistributing 1/sigma for the size field
/// sigma(x) = min(h_max, h_a + |x-a|, h_b + |b-x|), so local spacing is
/// at most sigma everywhere and grows linearly away from the fine ends.
std::vector<double> graded_1d(double a, double b, double h_a, double h_b, double h_max,
                              int min_intervals = 1) {
    const double L = b - a;
    auto sigma = [&](double x) {
        return std::min({h_max, h_a + (x - a), h_b + (b - x)});
    };
    // Cumulative integral of 1/sigma on a fine sampling grid.
    const int m = 4096;
    std::vector<double> cum(m + 1, 0.0);
    const double dx = L / m;
    for (int i = 0; i < m; ++i) {
        const double x0 = a + i * dx;
        cum[i + 1] = cum[i] + 0.5 * dx * (1.0 / sigma(x0) + 1.0 / sigma(x0 + dx));
    }
    const double total = cum[m];
    const int n = std::max(min_intervals, static_cast<int>(std::ceil(total - 1e-9)));
    std::vector<double> pts(n + 1);
    pts[0] = a;
    pts[n] = b;
    int j = 0;
    for (int i = 1; i < n; ++i) {
        const double target = total * i / n;
        while (j < m && cum[j + 1] < target) ++j;
        const double frac = (target - cum[j]) / (cum[j + 1] - cum[j]);
        pts[i] = a + (j + frac) * dx;
    }
    return pts;
}

void append_band(std::vector<double>& ys, const std::vector<double>& band) {
    for (double y : band)
        if (ys.empty() || y > ys.back()) ys.push_back(y);
}

enum class ColType { Left, Slit, Right };

struct Column {
    ColType type;
    double param; // s in [0,1] for Left/Right, t in (0,1) for Slit
};

} // namespace

Mesh generate_mesh(const GratingGeometry& geometry, double target_h, double grading) {
    geometry.validate();
    if (!(target_h > 0.0) || !(target_h < geometry.d))
        throw ConfigError("mesh.target_h", "target_h must lie in (0, d)");
    if (!(grading >= 1.0))
        throw ConfigError("mesh.grading", "grading factor must be >= 1");
    if (geometry.has_slit() &&
        std::min(geometry.slit.top_width, geometry.slit.base_width) < 4e-12 * geometry.d)
        throw GeometryDegenerate("slit width below resolvable element size");

    const double d = geometry.d;
    const double H = geometry.H;
    const double half_ell = geometry.ell / 2.0;
    const double h_fine = target_h / grading;

    // Vertical levels: graded bands meeting at the slab faces (metal corners).
    std::vector<double> ys;
    if (geometry.has_slab()) {
        append_band(ys, graded_1d(-H, -half_ell, target_h, h_fine, target_h));
        append_band(ys, graded_1d(-half_ell, half_ell, h_fine, h_fine, target_h));
        append_band(ys, graded_1d(half_ell, H, h_fine, target_h, target_h));
    } else {
        append_band(ys, graded_1d(-H, H, target_h, target_h, target_h));
    }

    // Horizontal columns. With a slit they are parameterized so that vertical
    // grid lines follow the (possibly slanted) slit walls exactly.
    std::vector<Column> cols;
    if (geometry.has_slit()) {
        const double wall_ref =
            std::min(geometry.slit_wall_left(-half_ell), geometry.slit_wall_left(half_ell));
        const double w_ref = 2.0 * std::max(geometry.slit_half_width_at(-half_ell),
                                            geometry.slit_half_width_at(half_ell));
        const std::vector<double> sx =
            graded_1d(0.0, wall_ref, target_h, h_fine, target_h);
        const std::vector<double> tx =
            graded_1d(0.0, w_ref, std::min(h_fine, w_ref / 4.0),
                      std::min(h_fine, w_ref / 4.0), target_h, 4);
        for (double x : sx) cols.push_back({ColType::Left, x / wall_ref});
        for (std::size_t i = 1; i + 1 < tx.size(); ++i)
            cols.push_back({ColType::Slit, tx[i] / w_ref});
        for (auto it = sx.rbegin(); it != sx.rend(); ++it)
            cols.push_back({ColType::Right, *it / wall_ref});
    } else {
        for (double x : graded_1d(0.0, d, target_h, target_h, target_h))
            cols.push_back({ColType::Left, (d > 0.0) ? x / d : 0.0});
    }

    auto x_of = [&](const Column& c, double y) {
        if (!geometry.has_slit()) return c.param * d;
        const double yc = std::clamp(y, -half_ell, half_ell);
        const double xl = geometry.slit_wall_left(yc);
        const double xr = geometry.slit_wall_right(yc);
        switch (c.type) {
        case ColType::Left: return c.param * xl;
        case ColType::Slit: return xl + c.param * (xr - xl);
        default: return d - c.param * xl;
        }
    };

    const int rows = static_cast<int>(ys.size());
    const int ncols = static_cast<int>(cols.size());

    Mesh mesh;
    mesh.nodes.resize(rows * ncols, 2);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < ncols; ++c)
            mesh.nodes.row(r * ncols + c) << x_of(cols[c], ys[r]), ys[r];

    mesh.triangles.resize(2 * (rows - 1) * (ncols - 1), 3);
    mesh.tags.resize(2 * (rows - 1) * (ncols - 1));
    int t = 0;
    for (int r = 0; r + 1 < rows; ++r) {
        for (int c = 0; c + 1 < ncols; ++c) {
            const int n00 = r * ncols + c;
            const int n10 = r * ncols + c + 1;
            const int n01 = (r + 1) * ncols + c;
            const int n11 = (r + 1) * ncols + c + 1;
            mesh.triangles.row(t++) << n00, n10, n11;
            mesh.triangles.row(t++) << n00, n11, n01;
        }
    }
    for (int i = 0; i < mesh.triangle_count(); ++i) {
        const Eigen::RowVector2d centroid =
            (mesh.nodes.row(mesh.triangles(i, 0)) + mesh.nodes.row(mesh.triangles(i, 1)) +
             mesh.nodes.row(mesh.triangles(i, 2))) /
            3.0;
        mesh.tags[i] = geometry.in_metal(centroid(0), centroid(1)) ? RegionTag::Metal
                                                                   : RegionTag::Vacuum;
    }

    if (geometry.metal_kind == GratingGeometry::MetalKind::PEC) {
        // Remove the metal region; its walls become a natural boundary.
        std::vector<int> keep;
        for (int i = 0; i < mesh.triangle_count(); ++i)
            if (mesh.tags[i] == RegionTag::Vacuum) keep.push_back(i);
        std::vector<int> node_map(mesh.node_count(), -1);
        int next = 0;
        for (int i : keep)
            for (int v = 0; v < 3; ++v) {
                int& slot = node_map[mesh.triangles(i, v)];
                if (slot < 0) slot = next++;
            }
        Mesh pruned;
        pruned.nodes.resize(next, 2);
        for (int old = 0; old < mesh.node_count(); ++old)
            if (node_map[old] >= 0) pruned.nodes.row(node_map[old]) = mesh.nodes.row(old);
        pruned.triangles.resize(static_cast<int>(keep.size()), 3);
        pruned.tags.assign(keep.size(), RegionTag::Vacuum);
        for (std::size_t i = 0; i < keep.size(); ++i)
            for (int v = 0; v < 3; ++v)
                pruned.triangles(static_cast<int>(i), v) = node_map[mesh.triangles(keep[i], v)];
        mesh = std::move(pruned);
    }

    rebuild_boundary(mesh);
    return mesh;
}

} // namespace gratres
