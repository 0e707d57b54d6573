#include "hsvm/relax.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hsvm/pgd.hpp"
#include "hsvm/rng.hpp"

namespace hsvm {

namespace {

const double kSqrt2 = std::sqrt(2.0);
constexpr double kInf = std::numeric_limits<double>::infinity();

int total_degree(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

// degree ascending, then max exponent descending, then lexicographic
// descending; reproduces [1, w0..wd, xi, squares..., cross terms...]
bool mono_less(const Exponents& a, const Exponents& b) {
    const int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    const int ma = *std::max_element(a.begin(), a.end());
    const int mb = *std::max_element(b.begin(), b.end());
    if (ma != mb) return ma > mb;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

void enumerate(int var, int remaining, Exponents& cur, std::vector<Exponents>& out) {
    if (var == static_cast<int>(cur.size())) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e <= remaining; ++e) {
        cur[var] = e;
        enumerate(var + 1, remaining - e, cur, out);
    }
    cur[var] = 0;
}

Exponents mono_mul(const Exponents& a, const Exponents& b) {
    Exponents out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

// Row/cone bookkeeping for building a ConicProblem incrementally. Rows are
// emitted into their cone bucket and renumbered zero | nonneg | psd at the end.
struct Builder {
    int num_vars = 0;
    struct Row {
        std::vector<std::pair<int, double>> entries;
        double rhs = 0.0;
    };
    std::vector<Row> zero_rows, nonneg_rows;
    struct PsdBlock {
        int order = 0;
        std::vector<Row> rows;  // svec order
    };
    std::vector<PsdBlock> psd_blocks;
    Vec c;

    explicit Builder(int nv) : num_vars(nv), c(Vec::Zero(nv)) {}

    ConicProblem finish() const {
        ConicProblem p;
        p.c = c;
        p.cones.zero_dim = static_cast<int>(zero_rows.size());
        p.cones.nonneg_dim = static_cast<int>(nonneg_rows.size());
        for (const auto& blk : psd_blocks) p.cones.psd_block_sizes.push_back(blk.order);
        const int m = p.cones.total_dim();
        p.b = Vec::Zero(m);
        std::vector<Eigen::Triplet<double>> trips;
        int row = 0;
        auto emit = [&](const Row& r) {
            for (const auto& [col, val] : r.entries) trips.emplace_back(row, col, val);
            p.b[row] = r.rhs;
            ++row;
        };
        for (const auto& r : zero_rows) emit(r);
        for (const auto& r : nonneg_rows) emit(r);
        for (const auto& blk : psd_blocks) {
            for (const auto& r : blk.rows) emit(r);
        }
        p.A.resize(m, num_vars);
        p.A.setFromTriplets(trips.begin(), trips.end());
        return p;
    }
};

// Emits the localizer (or moment, g = 1) block of polynomial g against the
// degree-s basis; a 1x1 block degenerates to a nonnegative row.
void emit_localizer(Builder& bld, const MonomialBasis& loc_basis,
                    const MonomialBasis& tms, const Poly& g, int z_offset) {
    const int ns = loc_basis.size();
    auto row_for = [&](int i, int j) {
        Builder::Row row;
        const double scale = (i == j) ? 1.0 : kSqrt2;
        for (const auto& term : g) {
            Exponents e = mono_mul(mono_mul(loc_basis.entries[i], loc_basis.entries[j]),
                                   term.expo);
            const int idx = tms.index_of(e);
            if (idx < 0) throw std::logic_error("emit_localizer: monomial outside TMS");
            row.entries.emplace_back(z_offset + idx, -scale * term.coeff);
        }
        return row;
    };
    if (ns == 1) {
        bld.nonneg_rows.push_back(row_for(0, 0));
        return;
    }
    Builder::PsdBlock blk;
    blk.order = ns;
    for (int j = 0; j < ns; ++j) {
        for (int i = j; i < ns; ++i) blk.rows.push_back(row_for(i, j));
    }
    bld.psd_blocks.push_back(std::move(blk));
}

// -(y_i G x_i) as the margin coefficient vector.
Vec margin_coeffs(const BinaryView& view, int i) {
    return -static_cast<double>(view.y[i]) * apply_g(view.point(i).coords);
}

Poly margin_poly(const Vec& mc, int num_vars, int xi_var, int taylor_order) {
    // mc'w - 1 + sqrt2 xi            (order 1:  -(yGx)'w >= 1 - sqrt2 xi)
    // mc'w - 1 + sqrt2 xi - xi^2/2 + sqrt2 xi^3/6   (order 3)
    Poly g;
    Exponents e0(num_vars, 0);
    for (int j = 0; j < static_cast<int>(mc.size()); ++j) {
        Exponents e(num_vars, 0);
        e[j] = 1;
        g.push_back({mc[j], e});
    }
    g.push_back({-1.0, e0});
    Exponents exi(num_vars, 0);
    exi[xi_var] = 1;
    g.push_back({kSqrt2, exi});
    if (taylor_order == 3) {
        Exponents exi2(num_vars, 0), exi3(num_vars, 0);
        exi2[xi_var] = 2;
        exi3[xi_var] = 3;
        g.push_back({-0.5, exi2});
        g.push_back({kSqrt2 / 6.0, exi3});
    } else if (taylor_order != 1) {
        throw std::invalid_argument("margin_poly: taylor order must be 1 or 3");
    }
    return g;
}

Poly wgw_poly(int num_vars, int d) {
    Poly g;
    for (int j = 0; j <= d; ++j) {
        Exponents e(num_vars, 0);
        e[j] = 2;
        g.push_back({j == 0 ? -1.0 : 1.0, e});
    }
    return g;
}

int localizer_degree(int kappa, int deg_g) { return (2 * kappa - deg_g) / 2; }

}  // namespace

int MonomialBasis::index_of(const Exponents& e) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), e, mono_less);
    if (it == entries.end() || *it != e) return -1;
    return static_cast<int>(it - entries.begin());
}

MonomialBasis make_basis(int num_vars, int degree) {
    MonomialBasis b;
    b.num_vars = num_vars;
    b.degree = degree;
    Exponents cur(num_vars, 0);
    enumerate(0, degree, cur, b.entries);
    std::sort(b.entries.begin(), b.entries.end(), mono_less);
    return b;
}

Mat SparsityPlan::moment_matrix(const Vec& x, int group) const {
    const int nk = basis.size();
    Mat m(nk, nk);
    const int off = group_offset(group);
    int r = 0;
    for (int j = 0; j < nk; ++j) {
        for (int i = j; i < nk; ++i, ++r) {
            const double v = x[off + moment_index[r]];
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

ConicProblem assemble_sdp(const BinaryView& view, double C) {
    const int n = view.size();
    if (n < 1) throw std::invalid_argument("assemble_sdp: empty view");
    const int d = view.base->d;
    const int dw = d + 1;
    const int t = svec_len(dw);
    // variables: [svec(W) | w | xi | corner]
    const int vw = t, vxi = t + dw, vcorner = t + dw + n;
    Builder bld(t + dw + n + 1);

    for (int i = 0; i < n; ++i) bld.c[vxi + i] = C;
    {
        Mat G = Mat::Identity(dw, dw);
        G(0, 0) = -1.0;
        Vec sg = svec(G);
        for (int k = 0; k < t; ++k) bld.c[k] = 0.5 * sg[k];
    }

    // corner pinned by a zero-cone row
    {
        Builder::Row r;
        r.entries.emplace_back(vcorner, 1.0);
        r.rhs = 1.0;
        bld.zero_rows.push_back(r);
    }
    // xi_i >= 0
    for (int i = 0; i < n; ++i) {
        Builder::Row r;
        r.entries.emplace_back(vxi + i, -1.0);
        bld.nonneg_rows.push_back(r);
    }
    // (y_i Gx_i)'w <= sqrt2 xi_i - 1  <=>  slack = sqrt2 xi_i - 1 - b_i'w >= 0
    for (int i = 0; i < n; ++i) {
        Vec bi = static_cast<double>(view.y[i]) * apply_g(view.point(i).coords);
        Builder::Row r;
        r.rhs = -1.0;
        r.entries.emplace_back(vxi + i, -kSqrt2);
        for (int j = 0; j < dw; ++j) {
            if (bi[j] != 0.0) r.entries.emplace_back(vw + j, bi[j]);
        }
        bld.nonneg_rows.push_back(r);
    }
    // Tr(GW) >= 0
    {
        Mat G = Mat::Identity(dw, dw);
        G(0, 0) = -1.0;
        Vec sg = svec(G);
        Builder::Row r;
        for (int k = 0; k < t; ++k) {
            if (sg[k] != 0.0) r.entries.emplace_back(k, -sg[k]);
        }
        bld.nonneg_rows.push_back(r);
    }
    // [[corner, w'],[w, W]] >= 0  (order d+2)
    {
        Builder::PsdBlock blk;
        blk.order = dw + 1;
        for (int j = 0; j < dw + 1; ++j) {
            for (int i = j; i < dw + 1; ++i) {
                Builder::Row r;
                if (i == 0 && j == 0) {
                    r.entries.emplace_back(vcorner, -1.0);
                } else if (j == 0) {
                    r.entries.emplace_back(vw + (i - 1), -kSqrt2);
                } else {
                    // maps 1:1 onto the svec(W) variable at (i-1, j-1)
                    int wi = i - 1, wj = j - 1;
                    int idx = 0;
                    for (int col = 0; col < wj; ++col) idx += dw - col;
                    idx += wi - wj;
                    r.entries.emplace_back(idx, -1.0);
                }
                blk.rows.push_back(r);
            }
        }
        bld.psd_blocks.push_back(std::move(blk));
    }

    ConicProblem p = bld.finish();
    for (int k = 0; k < t; ++k) p.var_names.push_back("svecW" + std::to_string(k));
    for (int j = 0; j < dw; ++j) p.var_names.push_back("w" + std::to_string(j));
    for (int i = 0; i < n; ++i) p.var_names.push_back("xi" + std::to_string(i));
    p.var_names.push_back("corner");
    return p;
}

ConicProblem assemble_robust_sdp(const BinaryView& view, double C, double rho) {
    if (rho < 0.0) throw std::invalid_argument("assemble_robust_sdp: rho >= 0 required");
    const int n = view.size();
    if (n < 1) throw std::invalid_argument("assemble_robust_sdp: empty view");
    const int d = view.base->d;
    const int dw = d + 1;
    const int t = svec_len(dw);
    // variables: [svec(W) | w | xi | corner | t_ij]
    const int vw = t, vxi = t + dw, vcorner = t + dw + n, vaux = vcorner + 1;
    Builder bld(vaux + n * d);

    for (int i = 0; i < n; ++i) bld.c[vxi + i] = C;
    Mat G = Mat::Identity(dw, dw);
    G(0, 0) = -1.0;
    Vec sg = svec(G);
    for (int k = 0; k < t; ++k) bld.c[k] = 0.5 * sg[k];

    {
        Builder::Row r;
        r.entries.emplace_back(vcorner, 1.0);
        r.rhs = 1.0;
        bld.zero_rows.push_back(r);
    }
    for (int i = 0; i < n; ++i) {
        Builder::Row r;
        r.entries.emplace_back(vxi + i, -1.0);
        bld.nonneg_rows.push_back(r);
    }
    // per-sample linearization columns a_ij = (G J_{x_i}) e_j
    std::vector<Mat> gj(n);
    for (int i = 0; i < n; ++i) {
        Mat J = jacobian_exp0(view.point(i));
        gj[i] = J;
        gj[i].row(0) = -J.row(0);  // apply G
    }
    // robust margin: slack = sqrt2 xi_i - 1 - b_i'w - rho * sum_j t_ij
    for (int i = 0; i < n; ++i) {
        Vec bi = static_cast<double>(view.y[i]) * apply_g(view.point(i).coords);
        Builder::Row r;
        r.rhs = -1.0;
        r.entries.emplace_back(vxi + i, -kSqrt2);
        for (int j = 0; j < dw; ++j) {
            if (bi[j] != 0.0) r.entries.emplace_back(vw + j, bi[j]);
        }
        for (int j = 0; j < d; ++j) r.entries.emplace_back(vaux + i * d + j, rho);
        bld.nonneg_rows.push_back(r);
    }
    {
        Builder::Row r;
        for (int k = 0; k < t; ++k) {
            if (sg[k] != 0.0) r.entries.emplace_back(k, -sg[k]);
        }
        bld.nonneg_rows.push_back(r);
    }
    // t_ij >= +-((G J_i)' w)_j
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            Vec a = gj[i].col(j);
            for (double sign : {1.0, -1.0}) {
                Builder::Row r;
                r.entries.emplace_back(vaux + i * d + j, -1.0);
                for (int k = 0; k < dw; ++k) {
                    if (a[k] != 0.0) r.entries.emplace_back(vw + k, sign * a[k]);
                }
                bld.nonneg_rows.push_back(r);
            }
        }
    }
    {
        Builder::PsdBlock blk;
        blk.order = dw + 1;
        for (int j = 0; j < dw + 1; ++j) {
            for (int i = j; i < dw + 1; ++i) {
                Builder::Row r;
                if (i == 0 && j == 0) {
                    r.entries.emplace_back(vcorner, -1.0);
                } else if (j == 0) {
                    r.entries.emplace_back(vw + (i - 1), -kSqrt2);
                } else {
                    int wi = i - 1, wj = j - 1;
                    int idx = 0;
                    for (int col = 0; col < wj; ++col) idx += dw - col;
                    idx += wi - wj;
                    r.entries.emplace_back(idx, -1.0);
                }
                blk.rows.push_back(r);
            }
        }
        bld.psd_blocks.push_back(std::move(blk));
    }
    return bld.finish();
}

std::pair<ConicProblem, SparsityPlan> assemble_sparse_moment(
    const BinaryView& view, double C, int kappa, int taylor_order) {
    if (kappa < 2) throw std::invalid_argument("assemble_sparse_moment: kappa >= 2 required");
    const int n = view.size();
    if (n < 1) throw std::invalid_argument("assemble_sparse_moment: empty view");
    const int d = view.base->d;
    const int nv = d + 2;  // (w0..wd, xi)
    const int xi_var = d + 1;

    SparsityPlan plan;
    plan.n_groups = n;
    plan.d = d;
    plan.kappa = kappa;
    plan.taylor_order = taylor_order;
    plan.basis = make_basis(nv, kappa);
    plan.tms = make_basis(nv, 2 * kappa);

    const int nk = plan.basis.size();
    plan.moment_index.reserve(svec_len(nk));
    for (int j = 0; j < nk; ++j) {
        for (int i = j; i < nk; ++i) {
            Exponents e = mono_mul(plan.basis.entries[i], plan.basis.entries[j]);
            plan.moment_index.push_back(plan.tms.index_of(e));
        }
    }
    // B: matrix positions whose basis monomials involve w only
    for (int k = 0; k < nk; ++k) {
        if (plan.basis.entries[k][xi_var] != 0) continue;
        for (int l = k; l < nk; ++l) {
            if (plan.basis.entries[l][xi_var] != 0) continue;
            if (k == 0 && l == 0) continue;  // pinned constant
            plan.binding.emplace_back(k, l);
        }
    }

    const int nz = plan.tms.size();
    Builder bld(n * nz);

    // objective: per-group split p_i = (1/2n) w'Gw + C xi_i
    for (int g = 0; g < n; ++g) {
        const int off = g * nz;
        for (int j = 0; j <= d; ++j) {
            Exponents e(nv, 0);
            e[j] = 2;
            bld.c[off + plan.tms.index_of(e)] += (j == 0 ? -1.0 : 1.0) / (2.0 * n);
        }
        Exponents exi(nv, 0);
        exi[xi_var] = 1;
        bld.c[off + plan.tms.index_of(exi)] += C;
    }

    // z_1 = 1 per group
    for (int g = 0; g < n; ++g) {
        Builder::Row r;
        r.entries.emplace_back(g * nz, 1.0);
        r.rhs = 1.0;
        bld.zero_rows.push_back(r);
    }
    // sparse-binding equalities against the anchor group
    for (int g = 1; g < n; ++g) {
        for (const auto& [k, l] : plan.binding) {
            Exponents e = mono_mul(plan.basis.entries[k], plan.basis.entries[l]);
            const int idx = plan.tms.index_of(e);
            Builder::Row r;
            r.entries.emplace_back(g * nz + idx, 1.0);
            r.entries.emplace_back(idx, -1.0);  // anchor offset 0
            bld.zero_rows.push_back(r);
        }
    }

    const MonomialBasis loc1 = make_basis(nv, localizer_degree(kappa, 1));
    const MonomialBasis loc2 = make_basis(nv, localizer_degree(kappa, 2));
    const MonomialBasis locm =
        make_basis(nv, localizer_degree(kappa, taylor_order == 3 ? 3 : 1));
    const Poly one = {{1.0, Exponents(nv, 0)}};
    Poly xi_poly;
    {
        Exponents exi(nv, 0);
        exi[xi_var] = 1;
        xi_poly.push_back({1.0, exi});
    }
    for (int g = 0; g < n; ++g) {
        const int off = g * nz;
        emit_localizer(bld, plan.basis, plan.tms, one, off);  // moment matrix
        emit_localizer(bld, loc1, plan.tms, xi_poly, off);
        emit_localizer(bld, locm, plan.tms,
                       margin_poly(margin_coeffs(view, g), nv, xi_var, taylor_order), off);
        if (g == 0) emit_localizer(bld, loc2, plan.tms, wgw_poly(nv, d), off);
    }

    return {bld.finish(), plan};
}

std::pair<ConicProblem, SparsityPlan> assemble_dense_moment(
    const BinaryView& view, double C, int kappa, int taylor_order) {
    if (kappa < 2) throw std::invalid_argument("assemble_dense_moment: kappa >= 2 required");
    const int n = view.size();
    const int d = view.base->d;
    const int nv = d + 1 + n;  // (w, xi_1..xi_n)

    SparsityPlan plan;
    plan.n_groups = 1;
    plan.d = d;
    plan.kappa = kappa;
    plan.taylor_order = taylor_order;
    plan.basis = make_basis(nv, kappa);
    plan.tms = make_basis(nv, 2 * kappa);
    const int nk = plan.basis.size();
    for (int j = 0; j < nk; ++j) {
        for (int i = j; i < nk; ++i) {
            plan.moment_index.push_back(
                plan.tms.index_of(mono_mul(plan.basis.entries[i], plan.basis.entries[j])));
        }
    }

    Builder bld(plan.tms.size());
    for (int j = 0; j <= d; ++j) {
        Exponents e(nv, 0);
        e[j] = 2;
        bld.c[plan.tms.index_of(e)] += (j == 0 ? -0.5 : 0.5);
    }
    for (int i = 0; i < n; ++i) {
        Exponents e(nv, 0);
        e[d + 1 + i] = 1;
        bld.c[plan.tms.index_of(e)] += C;
    }
    {
        Builder::Row r;
        r.entries.emplace_back(0, 1.0);
        r.rhs = 1.0;
        bld.zero_rows.push_back(r);
    }
    const MonomialBasis loc1 = make_basis(nv, localizer_degree(kappa, 1));
    const MonomialBasis loc2 = make_basis(nv, localizer_degree(kappa, 2));
    const MonomialBasis locm =
        make_basis(nv, localizer_degree(kappa, taylor_order == 3 ? 3 : 1));
    const Poly one = {{1.0, Exponents(nv, 0)}};
    emit_localizer(bld, plan.basis, plan.tms, one, 0);
    for (int i = 0; i < n; ++i) {
        Poly xi_poly;
        Exponents exi(nv, 0);
        exi[d + 1 + i] = 1;
        xi_poly.push_back({1.0, exi});
        emit_localizer(bld, loc1, plan.tms, xi_poly, 0);
        emit_localizer(bld, locm, plan.tms,
                       margin_poly(margin_coeffs(view, i), nv, d + 1 + i, taylor_order), 0);
    }
    emit_localizer(bld, loc2, plan.tms, wgw_poly(nv, d), 0);
    return {bld.finish(), plan};
}

double p_star(const ConicSolution& sol) {
    if (sol.status == SolveStatus::PrimalInfeasibleCert ||
        sol.status == SolveStatus::DualInfeasibleCert) {
        throw std::runtime_error("p_star: solver returned an infeasibility certificate");
    }
    return sol.objective;
}

namespace {

double candidate_objective(const Vec& w, const BinaryView& view, double C) {
    Separator sep{w};
    if (!w.allFinite() || !is_feasible(sep, 1e-8)) return kInf;
    HsvmConfig cfg;
    cfg.C = C;
    cfg.penalty = PenaltyMode::Taylor1;
    return objective(sep, view, cfg).total;
}

Extraction pick_winner(std::vector<ExtractionCandidate> cands) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
        if (best < 0 || cands[i].f_hat < cands[best].f_hat) best = i;
    }
    if (best < 0 || !std::isfinite(cands[best].f_hat)) {
        throw ExtractionError("extraction: all candidates infeasible", std::move(cands));
    }
    Extraction ex;
    ex.winner = Separator{cands[best].w};
    ex.winner_index = best;
    ex.candidates = std::move(cands);
    return ex;
}

}  // namespace

Extraction extract_sdp(const ConicSolution& sol, const BinaryView& view,
                       double C, std::uint64_t seed) {
    const int d = view.base->d;
    const int dw = d + 1;
    const int t = svec_len(dw);
    Mat W = smat(sol.x.head(t));
    Vec w = sol.x.segment(t, dw);

    std::vector<ExtractionCandidate> cands;
    auto add = [&](Vec cw, const char* src) {
        cands.push_back({cw, src, candidate_objective(cw, view, C)});
    };

    Eigen::SelfAdjointEigenSolver<Mat> eigw(W);
    {
        const double lmax = std::max(eigw.eigenvalues()(dw - 1), 0.0);
        Vec u = eigw.eigenvectors().col(dw - 1);
        add(std::sqrt(lmax) * u, "eigendirection");
        add(-std::sqrt(lmax) * u, "eigendirection");
    }
    {
        // covariance W - ww' clamped PSD before sampling
        Mat cov = W - w * w.transpose();
        Eigen::SelfAdjointEigenSolver<Mat> eigc(0.5 * (cov + cov.transpose()));
        Vec lam = eigc.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        NormalSampler rng(seed);
        for (int s = 0; s < 10; ++s) {
            Vec g(dw);
            for (int j = 0; j < dw; ++j) g[j] = rng();
            add(w + eigc.eigenvectors() * lam.asDiagonal() * g, "gaussian_randomization");
        }
    }
    for (int j = 0; j < dw; ++j) {
        if (std::abs(w[j]) > 1e-9) add(W.col(j) / w[j], "scaled_column");
    }
    add(w, "nominal");
    return pick_winner(std::move(cands));
}

Extraction extract_moment(const ConicSolution& sol, const SparsityPlan& plan,
                          const BinaryView& view, double C) {
    const int d = plan.d;
    const int dw = d + 1;
    Mat M = plan.moment_matrix(sol.x, 0);

    std::vector<ExtractionCandidate> cands;
    auto add = [&](Vec cw, const char* src) {
        cands.push_back({cw, src, candidate_objective(cw, view, C)});
    };
    // first-degree entries sit in row 0, columns 1..d+1
    Vec readoff(dw);
    for (int j = 0; j < dw; ++j) readoff[j] = M(0, 1 + j);
    add(readoff, "moment_readoff");

    Mat P = M.topLeftCorner(dw + 1, dw + 1);
    Eigen::SelfAdjointEigenSolver<Mat> eig(P);
    const double lmax = std::max(eig.eigenvalues()(dw), 0.0);
    Vec v = std::sqrt(lmax) * eig.eigenvectors().col(dw);
    if (std::abs(v[0]) > 1e-9) {
        add(v.tail(dw) / v[0], "eigendirection");
        add(-v.tail(dw) / v[0], "eigendirection");
    } else {
        add(v.tail(dw), "eigendirection");
        add(-v.tail(dw), "eigendirection");
    }
    // Loose relaxations (small C) can place the read-off strictly outside the
    // valid-separator cone; keep a projected copy as a last-resort candidate
    // so extraction degrades gracefully instead of failing outright.
    add(project_feasible(Separator{readoff}).w, "projected_readoff");
    return pick_winner(std::move(cands));
}

FlatExtension flat_extension_check(const Mat& moment, int kappa, int num_vars) {
    if (kappa < 2) throw std::invalid_argument("flat_extension_check: kappa >= 2 required");
    const int ns = make_basis(num_vars, kappa - 1).size();
    if (ns > moment.rows()) {
        throw std::invalid_argument("flat_extension_check: matrix too small for kappa");
    }
    auto rank_of = [](const Mat& m) {
        Eigen::JacobiSVD<Mat> svd(m);
        const Vec& sv = svd.singularValues();
        if (sv.size() == 0) return 0;
        const double thresh = 1e-6 * sv(0);
        int r = 0;
        for (int i = 0; i < sv.size(); ++i) {
            if (sv(i) > thresh) ++r;
        }
        return r;
    };
    FlatExtension out;
    out.rank_small = rank_of(moment.topLeftCorner(ns, ns));
    out.rank_full = rank_of(moment);
    out.flat = out.rank_small == out.rank_full;
    return out;
}

Mat jacobian_exp0(const LorentzPoint& x) {
    const int d = x.dim();
    Mat J = Mat::Zero(d + 1, d);
    TangentVector v = log0(x);
    const double r = v.coords.norm();
    if (r <= 1e-8) {
        J.bottomRows(d) = Mat::Identity(d, d);
        return J;
    }
    J.row(0) = x.coords.tail(d).transpose();  // d cosh(r) / dv = sinh(r) v / r
    const double sh = std::sinh(r), ch = std::cosh(r);
    J.bottomRows(d) = (ch / (r * r) - sh / (r * r * r)) * (v.coords * v.coords.transpose()) +
                      (sh / r) * Mat::Identity(d, d);
    return J;
}

}  // namespace hsvm
