#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsvm/conic.hpp"
#include "hsvm/data.hpp"
#include "hsvm/problem.hpp"

namespace hsvm {

// Exponent tuple over an ordered variable set (w0..wd first, xi last).
using Exponents = std::vector<int>;

// Ordered monomial basis up to a total degree. Entries are sorted by total
// degree, then largest exponent first, then lexicographically descending --
// for degree 2 this puts squares before cross terms (matching the read-off
// block layout used by extraction).
struct MonomialBasis {
    int num_vars = 0;
    int degree = 0;
    std::vector<Exponents> entries;

    int size() const { return static_cast<int>(entries.size()); }
    int index_of(const Exponents& e) const;  // -1 when absent
};

MonomialBasis make_basis(int num_vars, int degree);

// Sparse polynomial as (coefficient, exponent tuple) terms.
struct PolyTerm {
    double coeff;
    Exponents expo;
};
using Poly = std::vector<PolyTerm>;

// Per-group bookkeeping of the sparse moment program: which TMS entry backs
// every moment/localizer matrix position, and which matrix positions are
// generated by w alone (the binding index set B).
struct SparsityPlan {
    int n_groups = 0;
    int d = 0;
    int kappa = 0;
    int taylor_order = 1;
    MonomialBasis basis;      // [q]_kappa over (w, xi), size Nk
    MonomialBasis tms;        // degree 2*kappa, size Nz = per-group TMS length
    std::vector<int> moment_index;            // Nk*(Nk+1)/2 lower-tri map -> TMS idx
    std::vector<std::pair<int, int>> binding; // matrix positions (k,l), k<=l, in B minus (0,0)
    int group_dim() const { return tms.size(); }
    int group_offset(int g) const { return g * tms.size(); }

    // Reconstructs the dense moment matrix of one group from the conic primal.
    Mat moment_matrix(const Vec& x, int group) const;
};

struct ExtractionCandidate {
    Vec w;
    std::string source;  // eigendirection | gaussian_randomization | scaled_column | nominal | moment_readoff
    double f_hat = 0.0;  // taylor1 objective, +inf when infeasible
};

struct Extraction {
    Separator winner;
    int winner_index = -1;  // into candidates
    std::vector<ExtractionCandidate> candidates;
};

// Thrown when every candidate is infeasible; carries the attempted set.
class ExtractionError : public std::runtime_error {
public:
    ExtractionError(std::string msg, std::vector<ExtractionCandidate> cands)
        : std::runtime_error(std::move(msg)), candidates(std::move(cands)) {}
    std::vector<ExtractionCandidate> candidates;
};

// Shor SDP (variables svec(W), w, xi, corner scalar pinned to 1).
ConicProblem assemble_sdp(const BinaryView& view, double C);

// SDP with the l-inf robust margin term linearized through auxiliaries.
ConicProblem assemble_robust_sdp(const BinaryView& view, double C, double rho);

// Sparse moment-SOS relaxation at order kappa >= 2; groups (w, xi_i) with
// sparse-binding equalities over B. taylor_order in {1, 3}.
std::pair<ConicProblem, SparsityPlan> assemble_sparse_moment(
    const BinaryView& view, double C, int kappa, int taylor_order = 1);

// Dense (single-group) moment relaxation over all variables; only meant for
// cross-checking the sparse version on tiny instances.
std::pair<ConicProblem, SparsityPlan> assemble_dense_moment(
    const BinaryView& view, double C, int kappa, int taylor_order = 1);

// Relaxation optimum from a solved program.
double p_star(const ConicSolution& sol);

Extraction extract_sdp(const ConicSolution& sol, const BinaryView& view,
                       double C, std::uint64_t seed = 12345);

Extraction extract_moment(const ConicSolution& sol, const SparsityPlan& plan,
                          const BinaryView& view, double C);

struct FlatExtension {
    bool flat = false;
    int rank_small = 0;
    int rank_full = 0;
};

// Rank comparison between the order-(kappa-1) principal block and the full
// moment matrix, with singular values thresholded at 1e-6 * sigma_max.
FlatExtension flat_extension_check(const Mat& moment, int kappa, int num_vars);

// Jacobian of exp0 as a function of the tangent vector, evaluated at the
// point x (top row = spatial part of x).
Mat jacobian_exp0(const LorentzPoint& x);

}  // namespace hsvm
