#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>

#include "gratres/geometry.hpp"
#include "gratres/mesh.hpp"

using namespace gratres;

namespace {

GratingGeometry slit_geometry() {
    GratingGeometry g;
    g.d = 1.0;
    g.ell = 1.0;
    g.H = 1.0;
    g.slit = SlitShape::rectangle(0.2);
    g.metal_kind = GratingGeometry::MetalKind::Dispersive;
    return g;
}

} // namespace

TEST_CASE("geometry validation catches bad parameters") {
    GratingGeometry g = slit_geometry();
    CHECK_NOTHROW(g.validate());
    g.d = -1.0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = slit_geometry();
    g.H = 0.4; // slab sticks out of the cell
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = slit_geometry();
    g.slit = SlitShape::rectangle(2.0); // wider than the period
    CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("trapezoid slit walls interpolate linearly in height") {
    GratingGeometry g = slit_geometry();
    g.slit = SlitShape::trapezoid(0.05, 0.1);
    CHECK(g.slit_half_width_at(0.5) == doctest::Approx(0.025));
    CHECK(g.slit_half_width_at(-0.5) == doctest::Approx(0.05));
    CHECK(g.slit_half_width_at(0.0) == doctest::Approx(0.0375));
    CHECK(g.slit_wall_left(0.0) == doctest::Approx(0.5 - 0.0375));
    CHECK(g.slit_wall_right(0.0) == doctest::Approx(0.5 + 0.0375));
}

TEST_CASE("in_metal excludes the slit and the exterior") {
    const GratingGeometry g = slit_geometry();
    CHECK(g.in_metal(0.2, 0.0));        // slab
    CHECK(!g.in_metal(0.5, 0.0));       // slit center
    CHECK(!g.in_metal(0.2, 0.8));       // above the slab
    CHECK(!g.in_metal(0.2, -0.8));      // below the slab
    CHECK(g.in_metal(0.39, 0.49));      // just inside wall and top face
}

TEST_CASE("generated mesh satisfies structural invariants and covers the cell") {
    const GratingGeometry g = slit_geometry();
    const Mesh mesh = generate_mesh(g, 0.2, 4.0);
    CHECK_NOTHROW(mesh.validate());
    CHECK(mesh.total_area() == doctest::Approx(2.0 * g.H * g.d).epsilon(1e-12));
    // metal area = slab minus slit: d*ell - delta*ell
    CHECK(mesh.metal_area() == doctest::Approx(1.0 - 0.2).epsilon(1e-12));
    CHECK(mesh.mesh_size() <= 0.2 * (1.0 + 1e-12));
}

TEST_CASE("PEC meshes carve out the metal region") {
    GratingGeometry g = slit_geometry();
    g.metal_kind = GratingGeometry::MetalKind::PEC;
    const Mesh mesh = generate_mesh(g, 0.2, 4.0);
    CHECK_NOTHROW(mesh.validate());
    CHECK(mesh.metal_area() == doctest::Approx(0.0));
    CHECK(mesh.total_area() == doctest::Approx(2.0 - 0.8).epsilon(1e-12));
    CHECK(!mesh.wall.empty());
}

TEST_CASE("grading refines toward the slit walls") {
    // Elements may be anisotropic: the guarantee is fine resolution in the
    // direction normal to the feature. Check the horizontal extent of every
    // triangle touching the left slit wall at x = 0.4.
    const GratingGeometry g = slit_geometry();
    const double target_h = 0.2, grading = 8.0;
    const Mesh mesh = generate_mesh(g, target_h, grading);
    double max_extent = 0.0;
    int touching = 0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto tri = mesh.triangles.row(t);
        int on_wall = 0;
        double xmin = 1e30, xmax = -1e30, ymid = 0.0;
        for (int v = 0; v < 3; ++v) {
            const double x = mesh.nodes(tri(v), 0), y = mesh.nodes(tri(v), 1);
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymid += y / 3.0;
            if (std::abs(x - 0.4) < 1e-12 && std::abs(y) <= 0.5) ++on_wall;
        }
        if (on_wall >= 2 && std::abs(ymid) < 0.45) {
            ++touching;
            max_extent = std::max(max_extent, xmax - xmin);
        }
    }
    REQUIRE(touching > 0);
    // Equidistributing 1/sigma makes the first interval at most
    // (e - 1) * h_fine when spacing grows linearly off the wall.
    CHECK(max_extent <= 1.8 * target_h / grading);
    CHECK(max_extent < target_h / 2.0);
}

TEST_CASE("red refinement preserves area and quadruples the triangle count") {
    const GratingGeometry g = slit_geometry();
    const Mesh coarse = generate_mesh(g, 0.3, 4.0);
    const Mesh fine = refine_uniform(coarse);
    CHECK_NOTHROW(fine.validate());
    CHECK(fine.triangle_count() == 4 * coarse.triangle_count());
    CHECK(fine.total_area() == doctest::Approx(coarse.total_area()).epsilon(1e-13));
    CHECK(fine.metal_area() == doctest::Approx(coarse.metal_area()).epsilon(1e-13));
    CHECK(fine.mesh_size() == doctest::Approx(0.5 * coarse.mesh_size()).epsilon(1e-12));
}

TEST_CASE("left/right pairing is a bijection of matching heights") {
    const GratingGeometry g = slit_geometry();
    const Mesh mesh = refine_uniform(generate_mesh(g, 0.3, 4.0));
    CHECK(!mesh.pairs.empty());
    std::set<int> lefts, rights;
    for (const auto& [l, r] : mesh.pairs) {
        CHECK(mesh.nodes(l, 0) == doctest::Approx(0.0));
        CHECK(mesh.nodes(r, 0) == doctest::Approx(g.d));
        CHECK(mesh.nodes(l, 1) == doctest::Approx(mesh.nodes(r, 1)).epsilon(1e-12));
        CHECK(lefts.insert(l).second);  // no duplicates
        CHECK(rights.insert(r).second);
    }
    // every node on x1 = 0 is paired
    int on_left = 0;
    for (int i = 0; i < mesh.node_count(); ++i)
        if (std::abs(mesh.nodes(i, 0)) < 1e-12) ++on_left;
    CHECK(static_cast<std::size_t>(on_left) == mesh.pairs.size());
}

TEST_CASE("mesh export/import round-trips exactly") {
    const GratingGeometry g = slit_geometry();
    const Mesh mesh = generate_mesh(g, 0.25, 4.0);
    const auto path = std::filesystem::temp_directory_path() / "gratres_mesh_rt.txt";
    export_mesh(mesh, path.string());
    const Mesh back = import_mesh(path.string());
    std::filesystem::remove(path);
    REQUIRE(back.node_count() == mesh.node_count());
    REQUIRE(back.triangle_count() == mesh.triangle_count());
    CHECK((back.nodes - mesh.nodes).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.triangles - mesh.triangles).cwiseAbs().maxCoeff() == 0);
    CHECK(back.tags == mesh.tags);
    CHECK(back.pairs == mesh.pairs);
    CHECK_NOTHROW(back.validate());
}

TEST_CASE("import rejects malformed mesh files") {
    const auto path = std::filesystem::temp_directory_path() / "gratres_mesh_bad.txt";
    {
        std::FILE* f = std::fopen(path.string().c_str(), "w");
        std::fputs("NODES\n0 0\nnot-a-number 1\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(import_mesh(path.string()), ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("boundary segments are ordered and span the period") {
    const GratingGeometry g = slit_geometry();
    const Mesh mesh = generate_mesh(g, 0.2, 4.0);
    for (Side side : {Side::Top, Side::Bottom}) {
        const auto segs = boundary_segments(mesh, side);
        REQUIRE(!segs.empty());
        double total = 0.0, prev_end = 0.0;
        for (const auto& s : segs) {
            const double xa = mesh.nodes(s.a, 0), xb = mesh.nodes(s.b, 0);
            CHECK(xa < xb);
            CHECK(xa == doctest::Approx(prev_end).epsilon(1e-12));
            prev_end = xb;
            total += xb - xa;
        }
        CHECK(total == doctest::Approx(g.d).epsilon(1e-12));
    }
}
