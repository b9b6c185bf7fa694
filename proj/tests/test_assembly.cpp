#include <doctest.h>

#include <numbers>

#include <Eigen/Dense>

#include "gratres/assembly.hpp"

using namespace gratres;

namespace {

constexpr double kPi = std::numbers::pi;

GratingGeometry slit_geometry() {
    GratingGeometry g;
    g.d = 1.0;
    g.ell = 1.0;
    g.H = 1.0;
    g.slit = SlitShape::rectangle(0.2);
    return g;
}

} // namespace

TEST_CASE("stiffness annihilates constants and mass integrates to the cell area") {
    const Mesh mesh = generate_mesh(slit_geometry(), 0.25, 4.0);
    const AssembledBlocks b = assemble_blocks(mesh, 0.5, 10);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(b.N);
    CHECK(((b.K_vac + b.K_metal) * ones).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ones.dot(b.M * ones) == doctest::Approx(mesh.total_area()).epsilon(1e-12));
    CHECK(ones.dot(Eigen::VectorXd(b.K_metal.diagonal())) > 0.0);
    // both stiffness pieces are positive semidefinite
    Eigen::VectorXd x = Eigen::VectorXd::Random(b.N);
    CHECK(x.dot(b.K_vac * x) >= 0.0);
    CHECK(x.dot(b.K_metal * x) >= 0.0);
}

TEST_CASE("region split partitions the stiffness by tags") {
    const Mesh mesh = generate_mesh(slit_geometry(), 0.25, 4.0);
    const AssembledBlocks b = assemble_blocks(mesh, 0.0, 5);
    // metal stiffness acts only on nodes of metal triangles
    std::vector<bool> metal_node(mesh.node_count(), false);
    for (int t = 0; t < mesh.triangle_count(); ++t)
        if (mesh.tags[t] == RegionTag::Metal)
            for (int v = 0; v < 3; ++v) metal_node[mesh.triangles(t, v)] = true;
    for (int col = 0; col < b.K_metal.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(b.K_metal, col); it; ++it)
            if (it.value() != 0.0) {
                CHECK(metal_node[it.row()]);
                CHECK(metal_node[it.col()]);
            }
}

TEST_CASE("constraint rows encode the quasi-periodic jump") {
    const double kappa = 0.7;
    const Mesh mesh = generate_mesh(slit_geometry(), 0.3, 4.0);
    const AssembledBlocks b = assemble_blocks(mesh, kappa, 5);
    REQUIRE(b.J == static_cast<int>(mesh.pairs.size()));
    const cdouble phase = std::polar(1.0, kappa * b.d);
    // a Bloch plane wave u = exp(i kappa x1) satisfies B u = 0
    Eigen::VectorXcd u(b.N);
    for (int i = 0; i < b.N; ++i) u(i) = std::polar(1.0, kappa * mesh.nodes(i, 0));
    CHECK((b.B * u).cwiseAbs().maxCoeff() < 1e-9);
    // and each row has exactly the two expected coefficients
    Eigen::MatrixXcd Bd(b.B);
    for (std::size_t j = 0; j < mesh.pairs.size(); ++j) {
        const auto [l, r] = mesh.pairs[j];
        CHECK(std::abs(Bd(static_cast<int>(j), r) - cdouble(1.0, 0.0)) < 1e-15);
        CHECK(std::abs(Bd(static_cast<int>(j), l) + phase) < 1e-15);
    }
}

TEST_CASE("augmented operator has the [[A, B^H], [B, 0]] structure") {
    const double kappa = kPi / 8.0;
    const Mesh mesh = generate_mesh(slit_geometry(), 0.3, 4.0);
    AssembledBlocks b = assemble_blocks(mesh, kappa, 8);
    const int N = b.N, J = b.J;
    FemNepOperator op(std::move(b), PermittivityModel::drude_lossless(1.0));
    const Eigen::MatrixXcd G = Eigen::MatrixXcd(op.evaluate(cdouble(0.2, -0.05)));
    REQUIRE(G.rows() == N + J);
    CHECK(G.bottomRightCorner(J, J).cwiseAbs().maxCoeff() == 0.0);
    CHECK((G.topRightCorner(N, J) - G.bottomLeftCorner(J, N).adjoint())
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("operator is Hermitian for real k below every light line") {
    // All DtN modes evanescent: i zeta_n purely real negative contribution,
    // eps real, constraint enters adjointly. G(k) = G(k)^H exactly then.
    const double kappa = kPi / 8.0;
    const Mesh mesh = generate_mesh(slit_geometry(), 0.3, 4.0);
    AssembledBlocks b = assemble_blocks(mesh, kappa, 8);
    FemNepOperator op(std::move(b), PermittivityModel::drude_lossless(1.0));
    const cdouble k(0.2, 0.0); // 0.2 < kappa = pi/8
    const Eigen::MatrixXcd G = Eigen::MatrixXcd(op.evaluate(k));
    CHECK((G - G.adjoint()).cwiseAbs().maxCoeff() < 1e-13 * G.cwiseAbs().maxCoeff());
}

TEST_CASE("block cache matches direct assembly") {
    const double kappa = 0.4;
    const Mesh mesh = generate_mesh(slit_geometry(), 0.3, 4.0);
    AssembledBlocks blocks = assemble_blocks(mesh, kappa, 6);
    const AssembledBlocks& b = blocks;
    const cdouble k(1.3, -0.2);
    const cdouble inv_eps =
        1.0 / evaluate_permittivity(PermittivityModel::drude_lossless(1.0), k);

    // direct (uncached) reconstruction of A(k) from first principles
    Eigen::MatrixXcd A = Eigen::MatrixXcd(b.K_vac.cast<cdouble>()) +
                         inv_eps * Eigen::MatrixXcd(b.K_metal.cast<cdouble>()) -
                         (k * k) * Eigen::MatrixXcd(b.M.cast<cdouble>());
    for (const DtnCache* cache : {&b.top, &b.bottom}) {
        const auto& dofs = cache->boundary_dofs();
        const Eigen::MatrixXcd blk = cache->block(k);
        for (std::size_t q = 0; q < dofs.size(); ++q)
            for (std::size_t j = 0; j < dofs.size(); ++j)
                A(dofs[q], dofs[j]) -= blk(q, j);
    }
    const int N = b.N, J = b.J;
    Eigen::MatrixXcd G_direct = Eigen::MatrixXcd::Zero(N + J, N + J);
    G_direct.topLeftCorner(N, N) = A;
    G_direct.bottomLeftCorner(J, N) = Eigen::MatrixXcd(b.B);
    G_direct.topRightCorner(N, J) = Eigen::MatrixXcd(b.B).adjoint();

    FemNepOperator op(std::move(blocks), PermittivityModel::drude_lossless(1.0));
    const Eigen::MatrixXcd G = Eigen::MatrixXcd(op.evaluate(k));
    CHECK((G - G_direct).cwiseAbs().maxCoeff() <
          1e-13 * G_direct.cwiseAbs().maxCoeff());

    // apply() and factorize()/solve() agree with the matrix
    Eigen::VectorXcd x = Eigen::VectorXcd::Random(N + J);
    CHECK((op.apply(k, x) - G * x).norm() < 1e-12 * (G * x).norm());
    const Eigen::VectorXcd y = op.factorize(k)->solve(x);
    CHECK((G * y - x).norm() < 1e-9 * x.norm());
    const Eigen::VectorXcd ya = op.factorize(k)->solve_adjoint(x);
    CHECK((G.adjoint() * ya - x).norm() < 1e-9 * x.norm());
}

TEST_CASE("holomorphy veto covers material zeros and Rayleigh anomalies") {
    const double kappa = kPi / 8.0;
    const Mesh mesh = generate_mesh(slit_geometry(), 0.4, 4.0);
    AssembledBlocks b = assemble_blocks(mesh, kappa, 3);
    FemNepOperator op(std::move(b), PermittivityModel::drude_lossless(1.0));
    CHECK_THROWS_AS(op.check_holomorphic(cdouble(kappa, 0.0)), NotHolomorphicAt);
    CHECK_THROWS_AS(op.check_holomorphic(cdouble(1.0, 0.0)), NotHolomorphicAt);
    CHECK_NOTHROW(op.check_holomorphic(cdouble(0.2, -0.1)));
    CHECK(!op.singularities().empty());
}

TEST_CASE("PEC assembly carries no metal stiffness") {
    GratingGeometry g = slit_geometry();
    g.metal_kind = GratingGeometry::MetalKind::PEC;
    const Mesh mesh = generate_mesh(g, 0.25, 4.0);
    const AssembledBlocks b = assemble_blocks(mesh, kPi, 10);
    CHECK(b.K_metal.nonZeros() == 0);
}
