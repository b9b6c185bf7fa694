#pragma once

#include <string>

#include <Eigen/SparseCore>

#include "gratres/dtn.hpp"
#include "gratres/materials.hpp"
#include "gratres/mesh.hpp"
#include "gratres/nep_operator.hpp"

namespace gratres {

/// k-independent sparse blocks of the discrete problem, cached once per
/// (mesh, kappa): region-split stiffness, mass, DtN Fourier caches and the
/// quasi-periodic constraint matrix B.
struct AssembledBlocks {
    Eigen::SparseMatrix<double> K_vac;   ///< stiffness over vacuum triangles
    Eigen::SparseMatrix<double> K_metal; ///< stiffness over metal triangles
    Eigen::SparseMatrix<double> M;       ///< mass
    Eigen::SparseMatrix<cdouble> B;      ///< J x N constraint rows
    DtnCache top;
    DtnCache bottom;
    double kappa = 0.0;
    double d = 1.0;
    int N = 0; ///< field DOF count (mesh nodes)
    int J = 0; ///< constraint count (left-boundary pairs)
};

/// Exact linear-element assembly with region split by tags and B rows
/// B(j, r_j) = 1, B(j, l_j) = -exp(i kappa d) from the mesh pairing.
AssembledBlocks assemble_blocks(const Mesh& mesh, double kappa, int dtn_order);

/// The augmented operator
///   G(k) = [[A(k), B^H], [B, 0]],
///   A(k) = (1/eps_vac) K_vac + (1/eps_m(k)) K_metal - k^2 M - A3(k) - A4(k),
/// holomorphic away from material poles/zeros and Rayleigh anomalies.
class FemNepOperator final : public NepOperator {
public:
    FemNepOperator(AssembledBlocks blocks, PermittivityModel material,
                   double singularity_margin = 1e-6);

    Eigen::Index dimension() const override { return blocks_.N + blocks_.J; }
    void check_holomorphic(cdouble k) const override;
    std::vector<cdouble> singularities() const override { return singular_points_; }
    std::unique_ptr<Factorization> factorize(cdouble k) const override;
    Eigen::MatrixXcd apply(cdouble k, const Eigen::MatrixXcd& x) const override;
    double one_norm(cdouble k) const override;

    /// G(k) as a sparse matrix of dimension (N+J)^2.
    Eigen::SparseMatrix<cdouble> evaluate(cdouble k) const;

    const AssembledBlocks& blocks() const { return blocks_; }
    const PermittivityModel& material() const { return material_; }

private:
    AssembledBlocks blocks_;
    PermittivityModel material_;
    double margin_;
    std::vector<cdouble> singular_points_;
};

/// Coordinate-format ASCII dump (row col re im per line) for external checks.
void export_matrix_coordinate(const Eigen::SparseMatrix<cdouble>& m, const std::string& path);

} // namespace gratres
