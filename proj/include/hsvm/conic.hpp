#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "hsvm/manifold.hpp"

namespace hsvm {

using SparseCM = Eigen::SparseMatrix<double>;

// Product cone K = {0}^zero x R+^nonneg x PSD(n1) x PSD(n2) x ... in svec
// coordinates, in that row order.
struct ConeSpec {
    int zero_dim = 0;
    int nonneg_dim = 0;
    std::vector<int> psd_block_sizes;

    int total_dim() const;
    // svec offsets of the PSD blocks within the cone.
    std::vector<int> psd_offsets() const;
};

// min c'x  s.t.  Ax + s = b,  s in K.
struct ConicProblem {
    Vec c;
    SparseCM A;
    Vec b;
    ConeSpec cones;
    std::vector<std::string> var_names;  // optional, for extraction
};

enum class SolveStatus { Optimal, MaxIters, PrimalInfeasibleCert, DualInfeasibleCert };

struct ConicSolution {
    Vec x, y, s;
    SolveStatus status = SolveStatus::MaxIters;
    double primal_res = 0.0, dual_res = 0.0, gap_res = 0.0;
    int iters = 0;
    double objective = 0.0;
};

struct SolverOptions {
    double eps = 1e-7;
    int max_iters = 100000;
    double alpha = 1.5;      // over-relaxation
    int ruiz_sweeps = 10;
    int check_interval = 25;
    double infeas_tol = 1e-9;
    int aa_memory = 10;      // Anderson acceleration window; 0 disables
    double data_scale = 1.0; // extra (A, b) factor balancing dual vs primal progress
    bool verbose = false;
};

// svec: column-major lower triangle, off-diagonals scaled by sqrt(2) so that
// <M, N>_F = svec(M).svec(N).
Vec svec(const Mat& m);
Mat smat(const Vec& v);
int svec_len(int order);

// Nearest PSD matrix in Frobenius norm (negative eigenvalues clamped).
Mat project_psd(const Mat& m);

// Projection onto K (zero block -> 0, nonneg -> clamp, psd -> project_psd).
Vec project_cone(const Vec& s, const ConeSpec& cones);

ConicSolution solve(const ConicProblem& p, const SolverOptions& opts = {});

// Primal-dual interior-point solve (Nesterov-Todd scaling, predictor-
// corrector). Higher accuracy per unit time on small problems with many
// tiny PSD blocks; no infeasibility certificates (returns MaxIters when it
// stalls). eps / max_iters / verbose are read from SolverOptions.
ConicSolution solve_ipm(const ConicProblem& p, const SolverOptions& opts = {});

// Sparse triplet text dump of (c, A, b, cones) for external cross-checking.
void dump_problem(const ConicProblem& p, const std::string& path);

const char* status_name(SolveStatus s);

}  // namespace hsvm
