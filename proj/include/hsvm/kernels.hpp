#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

namespace hsvm::kernels {

using SparseRM = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

// Data-parallel inner loops of the solver. Each kernel has a serial
// reference implementation and an OpenMP variant; outputs are bit-identical
// because the parallel loops write disjoint slices in a fixed order.

void spmv_serial(const SparseRM& A, const Vec& x, Vec& out);
void spmv(const SparseRM& A, const Vec& x, Vec& out);

void clamp_nonneg_serial(double* v, int n);
void clamp_nonneg(double* v, int n);

// Projects each svec-packed symmetric block of `v` onto the PSD cone.
// `offsets[i]` is the start of block i in v, `orders[i]` its matrix order.
void project_psd_blocks_serial(double* v, const std::vector<int>& offsets,
                               const std::vector<int>& orders);
void project_psd_blocks(double* v, const std::vector<int>& offsets,
                        const std::vector<int>& orders);

}  // namespace hsvm::kernels
