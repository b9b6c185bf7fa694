#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gratres/dtn.hpp"
#include "gratres/geometry.hpp"

using namespace gratres;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("branch_sqrt basic values") {
    CHECK(branch_sqrt(cdouble(4.0, 0.0)) == cdouble(2.0, 0.0));
    // negative real axis lies inside the domain: sqrt(-3) = i sqrt(3)
    const cdouble s = branch_sqrt(cdouble(-3.0, 0.0));
    CHECK(s.real() == doctest::Approx(0.0));
    CHECK(s.imag() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    // sqrt(i) = e^{i pi/4}
    const cdouble si = branch_sqrt(cdouble(0.0, 1.0));
    CHECK(si.real() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(si.imag() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("branch_sqrt is continuous across the negative real axis") {
    const double eps = 1e-12;
    const cdouble above = branch_sqrt(cdouble(-1.0, eps));
    const cdouble below = branch_sqrt(cdouble(-1.0, -eps));
    CHECK(std::abs(above - below) < 1e-11);
    CHECK(std::abs(above - cdouble(0.0, 1.0)) < 1e-11);
}

TEST_CASE("branch_sqrt jumps across the negative imaginary cut and refuses the cut") {
    const cdouble right = branch_sqrt(cdouble(1e-6, -1.0));
    const cdouble left = branch_sqrt(cdouble(-1e-6, -1.0));
    CHECK(std::abs(right - left) > 1.0); // sign flip across the cut
    CHECK_THROWS_AS(branch_sqrt(cdouble(0.0, -1.0)), BranchCutHit);
}

TEST_CASE("zeta_n matches hand values") {
    // k=2, kappa=0, n=0: zeta = sqrt(4) = 2
    CHECK(zeta_n(cdouble(2.0, 0.0), 0.0, 0, 1.0) == cdouble(2.0, 0.0));
    // k=1, kappa_n=2: zeta = i sqrt(3)
    const cdouble z = zeta_n(cdouble(1.0, 0.0), 2.0, 0, 1.0);
    CHECK(z.imag() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(std::abs(z.real()) < 1e-15);
}

TEST_CASE("branch rule zeta_n^2 = k^2 - kappa_n^2 holds off the cut") {
    const double kappa = 0.7, d = 2.0;
    for (int n : {-3, -1, 0, 1, 4}) {
        for (cdouble k : {cdouble(1.3, -0.4), cdouble(0.2, 0.9), cdouble(5.0, -2.0)}) {
            const double kn = kappa + 2.0 * kPi * n / d;
            const cdouble z = zeta_n(k, kappa, n, d);
            CHECK(std::abs(z * z - (k * k - kn * kn)) <
                  1e-12 * std::max(1.0, std::norm(k)));
            // Decaying-mode convention: Im zeta >= 0 on the physical sheet
            // for k with negative imaginary part and |Re k| < |kappa_n|.
        }
    }
}

namespace {

Mesh vacuum_mesh(double d, double H, double h) {
    return generate_mesh(GratingGeometry::vacuum_cell(d, H), h, 1.0);
}

} // namespace

TEST_CASE("boundary Fourier coefficients resolve the partition of unity") {
    const double d = 2.0;
    const Mesh mesh = vacuum_mesh(d, 1.0, 0.25);
    // n=0, kappa=0: (1/d) integral of sum_j phi_j = 1
    const Eigen::VectorXcd v = boundary_fourier_vector(mesh, Side::Top, 0, 0.0, d);
    CHECK(std::abs(v.sum() - cdouble(1.0, 0.0)) < 1e-13);
    // nonzero mode integrates the pure oscillation exp(-i kappa_n x1) to zero
    const Eigen::VectorXcd v1 = boundary_fourier_vector(mesh, Side::Top, 1, 0.0, d);
    CHECK(std::abs(v1.sum()) < 1e-13);
}

TEST_CASE("boundary Fourier vector is supported on the chosen side only") {
    const Mesh mesh = vacuum_mesh(1.0, 1.0, 0.3);
    const Eigen::VectorXcd v = boundary_fourier_vector(mesh, Side::Bottom, 2, 0.5, 1.0);
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (std::abs(mesh.nodes(i, 1) + 1.0) > 1e-12) CHECK(v(i) == cdouble(0.0, 0.0));
    }
}

TEST_CASE("DtN block reproduces the exact action on a resolved Fourier trace") {
    const double d = 1.0, kappa = 0.3;
    const Mesh mesh = vacuum_mesh(d, 0.5, 0.05);
    DtnSpec spec;
    spec.kappa = kappa;
    spec.d = d;
    spec.truncation_order = 6;
    spec.side = Side::Top;
    const DtnCache cache(mesh, spec);
    const auto& dofs = cache.boundary_dofs();
    REQUIRE(!dofs.empty());

    const cdouble k(2.0, -0.3);
    const int m = 1; // test mode kappa_m = kappa + 2 pi m / d
    const double km = kappa + 2.0 * kPi * m / d;

    // nodal trace of exp(i kappa_m x1) on the boundary
    Eigen::VectorXcd trace(dofs.size());
    for (std::size_t q = 0; q < dofs.size(); ++q)
        trace(q) = std::polar(1.0, km * mesh.nodes(dofs[q], 0));

    // Exact DtN action on the mode: i zeta_m * (boundary mass) * trace.
    // The boundary mass matrix of P1 traces on segments [xa, xb].
    Eigen::MatrixXcd mass = Eigen::MatrixXcd::Zero(dofs.size(), dofs.size());
    std::vector<int> pos(mesh.node_count(), -1);
    for (std::size_t q = 0; q < dofs.size(); ++q) pos[dofs[q]] = static_cast<int>(q);
    for (const auto& seg : boundary_segments(mesh, Side::Top)) {
        const double len = mesh.nodes(seg.b, 0) - mesh.nodes(seg.a, 0);
        const int a = pos[seg.a], b = pos[seg.b];
        mass(a, a) += len / 3.0;
        mass(b, b) += len / 3.0;
        mass(a, b) += len / 6.0;
        mass(b, a) += len / 6.0;
    }

    const Eigen::VectorXcd exact = zeta_n(k, kappa, m, d) * cdouble(0.0, 1.0) * (mass * trace);
    const Eigen::VectorXcd approx = cache.block(k) * trace;
    // Interpolation of the trace and mode truncation dominate the error;
    // with h=0.05 and |kappa_m| ~ 6.6 the quadrature-free identity holds to
    // a few percent in norm, far from the O(1) failure a wrong sign causes.
    CHECK((approx - exact).norm() < 0.05 * exact.norm());
}

TEST_CASE("DtN block agrees with its defining low-rank sum") {
    const Mesh mesh = vacuum_mesh(1.0, 0.5, 0.2);
    DtnSpec spec;
    spec.kappa = 0.4;
    spec.d = 1.0;
    spec.truncation_order = 5;
    spec.side = Side::Bottom;
    const DtnCache cache(mesh, spec);
    const cdouble k(1.7, -0.2);

    const Eigen::MatrixXcd& a = cache.coefficients();
    const Eigen::VectorXcd f = cache.mode_factors(k);
    Eigen::MatrixXcd direct = Eigen::MatrixXcd::Zero(a.rows(), a.rows());
    for (int col = 0; col < a.cols(); ++col)
        direct += (f(col) / spec.d) * a.col(col).conjugate() * a.col(col).transpose();
    CHECK((cache.block(k) - direct).norm() < 1e-13 * direct.norm());
}

TEST_CASE("mode factors are holomorphic away from anomalies") {
    const Mesh mesh = vacuum_mesh(1.0, 0.5, 0.3);
    DtnSpec spec;
    spec.kappa = 0.4;
    spec.d = 1.0;
    spec.truncation_order = 3;
    const DtnCache cache(mesh, spec);
    const cdouble k(1.9, -0.35);
    const double h = 1e-6;
    const Eigen::VectorXcd ddx = (cache.mode_factors(k + h) - cache.mode_factors(k - h)) / (2.0 * h);
    const Eigen::VectorXcd ddy =
        (cache.mode_factors(k + cdouble(0.0, h)) - cache.mode_factors(k - cdouble(0.0, h))) /
        cdouble(0.0, 2.0 * h);
    CHECK((ddx - ddy).norm() < 1e-5 * std::max(1.0, ddx.norm()));
}

TEST_CASE("anomalies enumerate +-kappa_n") {
    const Mesh mesh = vacuum_mesh(2.0, 1.0, 0.4);
    DtnSpec spec;
    spec.kappa = 0.39269908169872414;
    spec.d = 2.0;
    spec.truncation_order = 2;
    const DtnCache cache(mesh, spec);
    const auto an = cache.anomalies();
    CHECK(an.size() == 2u * (2u * 2u + 1u));
    bool found = false;
    for (const cdouble& s : an)
        if (std::abs(s - cdouble(spec.kappa, 0.0)) < 1e-14) found = true;
    CHECK(found);
}
