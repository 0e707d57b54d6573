#include "hsvm/kernels.hpp"

#include <Eigen/Eigenvalues>

namespace hsvm::kernels {

namespace {

// Projects one svec-packed block in place.
void project_block(double* blk, int n) {
    // unpack (column-major lower triangle, sqrt2-scaled off-diagonals)
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd m(n, n);
    int k = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = j; i < n; ++i, ++k) {
            double val = (i == j) ? blk[k] : blk[k] * inv_sqrt2;
            m(i, j) = val;
            m(j, i) = val;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    m.noalias() = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
    const double sqrt2 = std::sqrt(2.0);
    k = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = j; i < n; ++i, ++k) {
            blk[k] = (i == j) ? m(i, j) : m(i, j) * sqrt2;
        }
    }
}

}  // namespace

void spmv_serial(const SparseRM& A, const Vec& x, Vec& out) {
    out.resize(A.rows());
    for (int i = 0; i < A.rows(); ++i) {
        double acc = 0.0;
        for (SparseRM::InnerIterator it(A, i); it; ++it) acc += it.value() * x[it.col()];
        out[i] = acc;
    }
}

void spmv(const SparseRM& A, const Vec& x, Vec& out) {
    out.resize(A.rows());
    const int rows = static_cast<int>(A.rows());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (SparseRM::InnerIterator it(A, i); it; ++it) acc += it.value() * x[it.col()];
        out[i] = acc;
    }
}

void clamp_nonneg_serial(double* v, int n) {
    for (int i = 0; i < n; ++i) v[i] = v[i] > 0.0 ? v[i] : 0.0;
}

void clamp_nonneg(double* v, int n) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) v[i] = v[i] > 0.0 ? v[i] : 0.0;
}

void project_psd_blocks_serial(double* v, const std::vector<int>& offsets,
                               const std::vector<int>& orders) {
    for (std::size_t b = 0; b < offsets.size(); ++b) {
        project_block(v + offsets[b], orders[b]);
    }
}

void project_psd_blocks(double* v, const std::vector<int>& offsets,
                        const std::vector<int>& orders) {
    const int nb = static_cast<int>(offsets.size());
#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < nb; ++b) {
        project_block(v + offsets[b], orders[b]);
    }
}

}  // namespace hsvm::kernels
