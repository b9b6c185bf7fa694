#include "gratres/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <Eigen/SparseLU>

namespace gratres {

namespace {

using Triplet = Eigen::Triplet<double>;
using CTriplet = Eigen::Triplet<cdouble>;

class SparseLuFactorization final : public Factorization {
public:
    SparseLuFactorization(const Eigen::SparseMatrix<cdouble>& G, cdouble k) {
        lu_.compute(G);
        if (lu_.info() != Eigen::Success) {
            std::ostringstream os;
            os << "sparse LU failed at k = (" << k.real() << ", " << k.imag()
               << "): " << lu_.lastErrorMessage();
            throw SingularAt(k, os.str());
        }
    }
    Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const override {
        return lu_.solve(rhs);
    }
    Eigen::MatrixXcd solve_adjoint(const Eigen::MatrixXcd& rhs) const override {
        return lu_.adjoint().solve(rhs);
    }

private:
    // mutable: Eigen's SparseLU::adjoint() is (spuriously) non-const.
    mutable Eigen::SparseLU<Eigen::SparseMatrix<cdouble>, Eigen::COLAMDOrdering<int>> lu_;
};

class DenseLuFactorization final : public Factorization {
public:
    DenseLuFactorization(const Eigen::MatrixXcd& G, cdouble k) : lu_(G) {
        if (!lu_.isInvertible()) {
            std::ostringstream os;
            os << "dense LU detected singularity at k = (" << k.real() << ", " << k.imag()
               << ")";
            throw SingularAt(k, os.str());
        }
    }
    Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const override {
        return lu_.solve(rhs);
    }
    Eigen::MatrixXcd solve_adjoint(const Eigen::MatrixXcd& rhs) const override {
        return lu_.adjoint().solve(rhs);
    }

private:
    Eigen::FullPivLU<Eigen::MatrixXcd> lu_;
};

} // namespace

std::unique_ptr<Factorization> DenseNepOperator::factorize(cdouble k) const {
    return std::make_unique<DenseLuFactorization>(builder_(k), k);
}

AssembledBlocks assemble_blocks(const Mesh& mesh, double kappa, int dtn_order) {
    const double d = mesh.nodes.col(0).maxCoeff() - mesh.nodes.col(0).minCoeff();
    const int N = mesh.node_count();
    const double cell_area = mesh.total_area();

    std::vector<Triplet> k_vac, k_metal, m_trip;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const int i0 = mesh.triangles(t, 0), i1 = mesh.triangles(t, 1), i2 = mesh.triangles(t, 2);
        const double area = mesh.triangle_area(t);
        if (area < 1e-14 * cell_area) {
            std::ostringstream os;
            os << "triangle " << t << " has area " << area << " below threshold";
            throw DegenerateTriangle(os.str());
        }
        // grad phi_i = rotated opposite edge / (2 area)
        const Eigen::RowVector2d p0 = mesh.nodes.row(i0);
        const Eigen::RowVector2d p1 = mesh.nodes.row(i1);
        const Eigen::RowVector2d p2 = mesh.nodes.row(i2);
        Eigen::Matrix<double, 3, 2> grads;
        grads.row(0) << p1(1) - p2(1), p2(0) - p1(0);
        grads.row(1) << p2(1) - p0(1), p0(0) - p2(0);
        grads.row(2) << p0(1) - p1(1), p1(0) - p0(0);
        grads /= 2.0 * area;

        const int idx[3] = {i0, i1, i2};
        std::vector<Triplet>& K = (mesh.tags[t] == RegionTag::Metal) ? k_metal : k_vac;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                K.emplace_back(idx[a], idx[b], area * grads.row(a).dot(grads.row(b)));
                m_trip.emplace_back(idx[a], idx[b], area / 12.0 * (a == b ? 2.0 : 1.0));
            }
        }
    }

    AssembledBlocks blocks{
        Eigen::SparseMatrix<double>(N, N),
        Eigen::SparseMatrix<double>(N, N),
        Eigen::SparseMatrix<double>(N, N),
        Eigen::SparseMatrix<cdouble>(static_cast<int>(mesh.pairs.size()), N),
        DtnCache(mesh, DtnSpec{kappa, d, dtn_order, Side::Top}),
        DtnCache(mesh, DtnSpec{kappa, d, dtn_order, Side::Bottom}),
        kappa,
        d,
        N,
        static_cast<int>(mesh.pairs.size())};
    blocks.K_vac.setFromTriplets(k_vac.begin(), k_vac.end());
    blocks.K_metal.setFromTriplets(k_metal.begin(), k_metal.end());
    blocks.M.setFromTriplets(m_trip.begin(), m_trip.end());

    const cdouble phase = std::exp(cdouble(0.0, kappa * d));
    std::vector<CTriplet> b_trip;
    for (std::size_t j = 0; j < mesh.pairs.size(); ++j) {
        b_trip.emplace_back(static_cast<int>(j), mesh.pairs[j].second, cdouble(1.0, 0.0));
        b_trip.emplace_back(static_cast<int>(j), mesh.pairs[j].first, -phase);
    }
    blocks.B.setFromTriplets(b_trip.begin(), b_trip.end());
    return blocks;
}

FemNepOperator::FemNepOperator(AssembledBlocks blocks, PermittivityModel material,
                               double singularity_margin)
    : blocks_(std::move(blocks)), material_(std::move(material)), margin_(singularity_margin) {
    for (const cdouble& p : material_.poles()) singular_points_.push_back(p);
    for (const cdouble& z : material_.zeros()) singular_points_.push_back(z);
    for (const cdouble& a : blocks_.top.anomalies()) singular_points_.push_back(a);
    for (const cdouble& a : blocks_.bottom.anomalies()) singular_points_.push_back(a);
}

void FemNepOperator::check_holomorphic(cdouble k) const {
    auto veto = [&](const std::vector<cdouble>& points, NotHolomorphicAt::Reason reason,
                    const char* label) {
        for (const cdouble& s : points) {
            if (std::abs(k - s) < margin_) {
                std::ostringstream os;
                os << "k = (" << k.real() << ", " << k.imag() << ") is within " << margin_
                   << " of " << label << " (" << s.real() << ", " << s.imag() << ")";
                throw NotHolomorphicAt(k, reason, os.str());
            }
        }
    };
    veto(material_.poles(), NotHolomorphicAt::Reason::material_pole, "a material pole");
    veto(material_.zeros(), NotHolomorphicAt::Reason::material_zero, "a material zero");
    veto(blocks_.top.anomalies(), NotHolomorphicAt::Reason::rayleigh_anomaly,
         "a Rayleigh anomaly");
    veto(blocks_.bottom.anomalies(), NotHolomorphicAt::Reason::rayleigh_anomaly,
         "a Rayleigh anomaly");
}

Eigen::SparseMatrix<cdouble> FemNepOperator::evaluate(cdouble k) const {
    check_holomorphic(k);
    const int N = blocks_.N;
    const int J = blocks_.J;

    cdouble inv_eps_metal(0.0, 0.0);
    if (blocks_.K_metal.nonZeros() > 0)
        inv_eps_metal = 1.0 / evaluate_permittivity(material_, k);
    const cdouble k2 = k * k;

    std::vector<CTriplet> trip;
    trip.reserve(static_cast<std::size_t>(blocks_.K_vac.nonZeros() + blocks_.K_metal.nonZeros() +
                                          blocks_.M.nonZeros() + 4 * blocks_.B.nonZeros()) +
                 blocks_.top.boundary_dofs().size() * blocks_.top.boundary_dofs().size() +
                 blocks_.bottom.boundary_dofs().size() * blocks_.bottom.boundary_dofs().size());

    auto add_real = [&trip](const Eigen::SparseMatrix<double>& m, cdouble scale) {
        for (int col = 0; col < m.outerSize(); ++col)
            for (Eigen::SparseMatrix<double>::InnerIterator it(m, col); it; ++it)
                trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                  scale * it.value());
    };
    add_real(blocks_.K_vac, cdouble(1.0, 0.0)); // eps_vac = 1 in scaled units
    if (blocks_.K_metal.nonZeros() > 0) add_real(blocks_.K_metal, inv_eps_metal);
    add_real(blocks_.M, -k2);

    auto add_dtn = [&trip](const DtnCache& cache, cdouble k_eval) {
        const Eigen::MatrixXcd block = cache.block(k_eval);
        const std::vector<int>& dofs = cache.boundary_dofs();
        for (std::size_t q = 0; q < dofs.size(); ++q)
            for (std::size_t j = 0; j < dofs.size(); ++j)
                trip.emplace_back(dofs[q], dofs[j], -block(static_cast<int>(q),
                                                           static_cast<int>(j)));
    };
    add_dtn(blocks_.top, k);
    add_dtn(blocks_.bottom, k);

    for (int col = 0; col < blocks_.B.outerSize(); ++col) {
        for (Eigen::SparseMatrix<cdouble>::InnerIterator it(blocks_.B, col); it; ++it) {
            const int row = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            trip.emplace_back(N + row, c, it.value());            // B
            trip.emplace_back(c, N + row, std::conj(it.value())); // B^H
        }
    }

    Eigen::SparseMatrix<cdouble> G(N + J, N + J);
    G.setFromTriplets(trip.begin(), trip.end());
    return G;
}

std::unique_ptr<Factorization> FemNepOperator::factorize(cdouble k) const {
    return std::make_unique<SparseLuFactorization>(evaluate(k), k);
}

Eigen::MatrixXcd FemNepOperator::apply(cdouble k, const Eigen::MatrixXcd& x) const {
    return evaluate(k) * x;
}

double FemNepOperator::one_norm(cdouble k) const {
    const Eigen::SparseMatrix<cdouble> G = evaluate(k);
    double best = 0.0;
    for (int col = 0; col < G.outerSize(); ++col) {
        double sum = 0.0;
        for (Eigen::SparseMatrix<cdouble>::InnerIterator it(G, col); it; ++it)
            sum += std::abs(it.value());
        best = std::max(best, sum);
    }
    return best;
}

void export_matrix_coordinate(const Eigen::SparseMatrix<cdouble>& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open matrix dump file: " + path);
    out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
    char buf[96];
    for (int col = 0; col < m.outerSize(); ++col) {
        for (Eigen::SparseMatrix<cdouble>::InnerIterator it(m, col); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%ld %ld %.17g %.17g\n", static_cast<long>(it.row()),
                          static_cast<long>(it.col()), it.value().real(), it.value().imag());
            out << buf;
        }
    }
}

} // namespace gratres
