#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>
#include <cstdio>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "hsvm/conic.hpp"

namespace hsvm {

namespace {

struct MatEntry {
    int r, c;
    double v;
};

// One PSD block: svec offset inside the cone slice, order, and for every
// variable touching the block the full-matrix entries of its coefficient.
struct PsdBlockInfo {
    int off = 0;  // offset within the cone slice (after nonneg rows)
    int order = 0;
    std::vector<int> vars;                      // global column ids
    std::vector<std::vector<MatEntry>> coeff;   // per local var
};

Mat smat_block(const Vec& slice, int o) {
    Mat m(o, o);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    int k = 0;
    for (int j = 0; j < o; ++j) {
        for (int i = j; i < o; ++i, ++k) {
            const double v = (i == j) ? slice[k] : slice[k] * inv_sqrt2;
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

void svec_block(const Mat& m, Vec& out, int off) {
    const int o = static_cast<int>(m.rows());
    const double sqrt2 = std::sqrt(2.0);
    int k = 0;
    for (int j = 0; j < o; ++j) {
        for (int i = j; i < o; ++i, ++k) {
            out[off + k] = (i == j) ? m(i, j) : sqrt2 * m(i, j);
        }
    }
}

// largest step alpha with S + alpha*dS staying PSD (S given by Cholesky L)
double psd_step(const Eigen::LLT<Mat>& llt, const Mat& dS) {
    Mat T = llt.matrixL().solve(dS);
    T = llt.matrixL().solve(T.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> eig(T, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    return lmin >= -1e-14 ? 1e30 : -1.0 / lmin;
}

// Factors the symmetric KKT matrix. With no equality block the matrix is the
// positive definite Schur complement, where unpivoted LDLT is both stable and
// much cheaper; the indefinite case needs LU with partial pivoting to control
// element growth at small barrier parameters.
struct KktFactor {
    bool pd = false;
    bool analyzed = false;
    Eigen::SimplicialLDLT<SparseCM> ldlt;
    Eigen::SparseLU<SparseCM, Eigen::COLAMDOrdering<int>> lu;

    bool factorize(const SparseCM& K) {
        if (pd) {
            if (!analyzed) {
                ldlt.analyzePattern(K);
                analyzed = true;
            }
            ldlt.factorize(K);
            return ldlt.info() == Eigen::Success;
        }
        if (!analyzed) {
            lu.analyzePattern(K);
            analyzed = true;
        }
        lu.factorize(K);
        return lu.info() == Eigen::Success;
    }
    Vec solve(const Vec& r) const {
        if (pd) return ldlt.solve(r);
        return lu.solve(r);
    }
};

ConicSolution ipm_core(const ConicProblem& p, const SolverOptions& opts) {
    const int n = static_cast<int>(p.c.size());
    const int m = static_cast<int>(p.b.size());
    if (n == 0 || m == 0) throw std::invalid_argument("solve_ipm: empty problem");
    if (p.A.rows() != m || p.A.cols() != n || p.cones.total_dim() != m) {
        throw std::invalid_argument("solve_ipm: inconsistent problem dimensions");
    }
    const int z = p.cones.zero_dim;
    const int l = p.cones.nonneg_dim;
    const int mk = m - z;  // cone slice (nonneg + psd)
    if (mk == 0) throw std::invalid_argument("solve_ipm: no cone constraints");

    // ---- Ruiz equilibration (rows of a PSD block share one scale) ----
    SparseCM As(p.A);
    Vec D = Vec::Ones(m), E = Vec::Ones(n);
    {
        std::vector<int> row_block(m, -1);
        const auto psd_off = p.cones.psd_offsets();
        for (std::size_t bi = 0; bi < psd_off.size(); ++bi) {
            const int len = svec_len(p.cones.psd_block_sizes[bi]);
            for (int r = 0; r < len; ++r) row_block[psd_off[bi] + r] = static_cast<int>(bi);
        }
        const int num_psd = static_cast<int>(p.cones.psd_block_sizes.size());
        for (int sweep = 0; sweep < 10; ++sweep) {
            Vec rnorm = Vec::Zero(m), cnorm = Vec::Zero(n);
            for (int j = 0; j < n; ++j) {
                for (SparseCM::InnerIterator it(As, j); it; ++it) {
                    const double a = std::abs(it.value());
                    rnorm[it.row()] = std::max(rnorm[it.row()], a);
                    cnorm[j] = std::max(cnorm[j], a);
                }
            }
            Vec blockmax = Vec::Zero(std::max(num_psd, 1));
            for (int i = 0; i < m; ++i) {
                if (row_block[i] >= 0) {
                    blockmax[row_block[i]] = std::max(blockmax[row_block[i]], rnorm[i]);
                }
            }
            Vec dr(m), dc(n);
            for (int i = 0; i < m; ++i) {
                const double v = row_block[i] >= 0 ? blockmax[row_block[i]] : rnorm[i];
                dr[i] = v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0;
            }
            for (int j = 0; j < n; ++j) {
                dc[j] = cnorm[j] > 1e-12 ? 1.0 / std::sqrt(cnorm[j]) : 1.0;
            }
            for (int j = 0; j < n; ++j) {
                for (SparseCM::InnerIterator it(As, j); it; ++it) {
                    it.valueRef() *= dr[it.row()] * dc[j];
                }
            }
            D.array() *= dr.array();
            E.array() *= dc.array();
        }
    }
    const Vec bs = D.asDiagonal() * p.b;
    const Vec cs = E.asDiagonal() * p.c;

    // ---- structure extraction ----
    std::vector<PsdBlockInfo> blocks;
    {
        int off = l;
        for (int o : p.cones.psd_block_sizes) {
            PsdBlockInfo b;
            b.off = off;
            b.order = o;
            blocks.push_back(std::move(b));
            off += svec_len(o);
        }
    }
    auto block_of_row = [&](int cone_row) {
        // cone_row is an index into the cone slice
        int lo = 0, hi = static_cast<int>(blocks.size());
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (blocks[mid].off + svec_len(blocks[mid].order) <= cone_row) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        return lo;
    };
    // svec index -> (r, c) per order (cached for the largest order)
    std::vector<std::vector<std::pair<int, int>>> rc_of;
    auto rc_table = [&](int o) -> const std::vector<std::pair<int, int>>& {
        if (static_cast<int>(rc_of.size()) <= o) rc_of.resize(o + 1);
        if (rc_of[o].empty()) {
            for (int j = 0; j < o; ++j) {
                for (int i = j; i < o; ++i) rc_of[o].emplace_back(i, j);
            }
        }
        return rc_of[o];
    };

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    // nonneg rows as (col, val) lists; psd block coefficients per variable
    std::vector<std::vector<std::pair<int, double>>> nn_rows(l);
    {
        std::vector<std::vector<int>> var_local(blocks.size());
        for (auto& vl : var_local) vl.assign(0, 0);
        std::vector<std::vector<int>> local_of(blocks.size(), std::vector<int>(n, -1));
        for (int j = 0; j < n; ++j) {
            for (SparseCM::InnerIterator it(As, j); it; ++it) {
                const int row = static_cast<int>(it.row());
                if (row < z) continue;
                const int cr = row - z;
                if (cr < l) {
                    nn_rows[cr].emplace_back(j, it.value());
                    continue;
                }
                const int bi = block_of_row(cr);
                PsdBlockInfo& blk = blocks[bi];
                int& loc = local_of[bi][j];
                if (loc < 0) {
                    loc = static_cast<int>(blk.vars.size());
                    blk.vars.push_back(j);
                    blk.coeff.emplace_back();
                }
                const auto& rc = rc_table(blk.order)[cr - blk.off];
                if (rc.first == rc.second) {
                    blk.coeff[loc].push_back({rc.first, rc.second, it.value()});
                } else {
                    blk.coeff[loc].push_back({rc.first, rc.second, it.value() * inv_sqrt2});
                    blk.coeff[loc].push_back({rc.second, rc.first, it.value() * inv_sqrt2});
                }
            }
        }
    }
    // cone-slice copy of A for residuals / products
    SparseCM Ak, Ae;
    {
        std::vector<Eigen::Triplet<double>> tk, te;
        for (int j = 0; j < n; ++j) {
            for (SparseCM::InnerIterator it(As, j); it; ++it) {
                const int row = static_cast<int>(it.row());
                if (row < z) {
                    te.emplace_back(row, j, it.value());
                } else {
                    tk.emplace_back(row - z, j, it.value());
                }
            }
        }
        Ak.resize(mk, n);
        Ak.setFromTriplets(tk.begin(), tk.end());
        Ae.resize(z, n);
        Ae.setFromTriplets(te.begin(), te.end());
    }
    const Vec bk = bs.tail(mk);
    const Vec be = bs.head(z);

    // ---- state ----
    const double eta_p = std::max(1.0, bs.lpNorm<Eigen::Infinity>());
    const double eta_d = std::max(1.0, cs.lpNorm<Eigen::Infinity>());
    Vec x = Vec::Zero(n), ye = Vec::Zero(z);
    Vec s = Vec::Zero(mk), y = Vec::Zero(mk);
    for (int i = 0; i < l; ++i) {
        s[i] = eta_p;
        y[i] = eta_d;
    }
    for (const auto& blk : blocks) {
        int k = blk.off;
        for (int j = 0; j < blk.order; ++j) {
            s[k] = eta_p;  // diagonal entries of eta*I
            y[k] = eta_d;
            k += blk.order - j;
        }
    }
    double nu = l;
    for (const auto& blk : blocks) nu += blk.order;

    const int nb = static_cast<int>(blocks.size());
    std::vector<Mat> Winv(nb), Rmat(nb), Rinv(nb), Yinv(nb), Smat(nb), Ymat(nb), dSb(nb), dYb(nb),
        dSb_aff(nb), dYb_aff(nb);
    std::vector<Eigen::LLT<Mat>> Sllt(nb), Yllt(nb);
    std::vector<Vec> lam_blk(nb);
    Vec winv2(l);

    KktFactor kkt;
    kkt.pd = (z == 0);
    const double delta = z == 0 ? 1e-11 : 1e-9;
    const int kdim = n + z;
    SparseCM K(kdim, kdim);

    const double bnorm1 = 1.0 + p.b.norm();
    const double cnorm1 = 1.0 + p.c.norm();
    // opts.max_iters defaults to first-order-method scale; cap second-order
    // iterations unless the caller picked an explicit small budget
    const int max_it = opts.max_iters > 10000 ? 300 : opts.max_iters;

    ConicSolution out;
    out.status = SolveStatus::MaxIters;

    Vec rp_k(mk), rp_e(z), rd(n), dx(kdim), rhs(kdim), dsv(mk), dyv(mk), rc_vec(mk);
    Vec dsv_aff(mk), dyv_aff(mk);

    // best-iterate tracking: late iterations can degrade numerically (cone
    // boundary breakdown), so never return anything worse than the best seen
    double best_score = std::numeric_limits<double>::infinity();
    double best_pres = 0, best_dres = 0, best_gap = 0;
    Vec best_x, best_y, best_ye, best_s;

    auto kkt_solve = [&](const Vec& r, Vec& sol) {
        sol = kkt.solve(r);
        const double rn = r.norm() + 1e-300;
        for (int pass = 0; pass < 5; ++pass) {
            Vec resid = r - K * sol;
            if (resid.norm() <= 1e-13 * rn) return;
            sol += kkt.solve(resid);
        }
    };

    int iter = 0;
    for (; iter < max_it; ++iter) {
        // residuals and duality measure
        rp_k = bk - Ak * x - s;
        rp_e = be - Ae * x;
        rd = -cs - Ak.transpose() * y - Ae.transpose() * ye;
        double gap_in = 0.0;
        for (int i = 0; i < l; ++i) gap_in += s[i] * y[i];
        for (int bi = 0; bi < nb; ++bi) {
            Smat[bi] = smat_block(s.segment(blocks[bi].off, svec_len(blocks[bi].order)),
                                  blocks[bi].order);
            Ymat[bi] = smat_block(y.segment(blocks[bi].off, svec_len(blocks[bi].order)),
                                  blocks[bi].order);
            gap_in += (Smat[bi] * Ymat[bi]).trace();
        }
        const double mu = gap_in / nu;

        // residuals measured in the original (unscaled) problem
        double pr2 = 0.0;
        for (int i = 0; i < z; ++i) pr2 += std::pow(rp_e[i] / D[i], 2);
        for (int i = 0; i < mk; ++i) pr2 += std::pow(rp_k[i] / D[z + i], 2);
        const double pres = std::sqrt(pr2) / bnorm1;
        const double dres = rd.cwiseQuotient(E).norm() / cnorm1;
        const double pobj = cs.dot(x);
        const double dobj = -(bk.dot(y) + be.dot(ye));
        // On degenerate problems the dual optimum may not be attained, so the
        // objective gap can floor above eps while the iterates still converge;
        // complementarity s'y (invariant under the scaling) covers that case.
        const double denom = 1.0 + std::abs(pobj) + std::abs(dobj);
        const double gap = std::min(std::abs(pobj - dobj), gap_in) / denom;
        out.primal_res = pres;
        out.dual_res = dres;
        out.gap_res = gap;
        const double score = std::max({pres, dres, gap});
        if (score < best_score) {
            best_score = score;
            best_pres = pres;
            best_dres = dres;
            best_gap = gap;
            best_x = x;
            best_y = y;
            best_ye = ye;
            best_s = s;
        }
        if (opts.verbose) {
            std::fprintf(stderr, "  [ipm] it=%3d mu=%.3e pres=%.3e dres=%.3e gap=%.3e\n",
                         iter, mu, pres, dres, gap);
        }
        if (pres <= opts.eps && dres <= opts.eps && gap <= opts.eps) {
            out.status = SolveStatus::Optimal;
            break;
        }

        // ---- NT scaling ----
        bool scale_ok = true;
        for (int i = 0; i < l; ++i) {
            if (s[i] <= 0.0 || y[i] <= 0.0) scale_ok = false;
            winv2[i] = y[i] / s[i];
        }
        for (int bi = 0; bi < nb && scale_ok; ++bi) {
            Sllt[bi].compute(Smat[bi]);
            Yllt[bi].compute(Ymat[bi]);
            if (Sllt[bi].info() != Eigen::Success || Yllt[bi].info() != Eigen::Success) {
                scale_ok = false;
                break;
            }
            Mat Ls = Sllt[bi].matrixL();
            Mat T = Ls.transpose() * Ymat[bi] * Ls;
            Eigen::SelfAdjointEigenSolver<Mat> eig(T);
            if (eig.eigenvalues().minCoeff() <= 0.0) {
                scale_ok = false;
                break;
            }
            // With T = Ls' Y Ls = Q lam Q': W = R R' for R = Ls Q lam^{-1/4},
            // W^{-1} = Ls^{-T} Q lam^{1/2} Q' Ls^{-1}, and the scaled point
            // R^{-1} S R^{-T} = R' Y R = diag(sqrt(lam)).
            Mat mid = eig.eigenvectors() *
                      eig.eigenvalues().cwiseSqrt().asDiagonal() *
                      eig.eigenvectors().transpose();
            Mat LsInv = Ls.inverse();
            Winv[bi] = LsInv.transpose() * mid * LsInv;
            Vec lam_q = eig.eigenvalues().cwiseSqrt().cwiseSqrt();  // lam^{1/4}
            Rmat[bi] = Ls * eig.eigenvectors() * lam_q.cwiseInverse().asDiagonal();
            Rinv[bi] = lam_q.asDiagonal() * eig.eigenvectors().transpose() * LsInv;
            lam_blk[bi] = eig.eigenvalues().cwiseSqrt();
            Yinv[bi] = Yllt[bi].solve(Mat::Identity(blocks[bi].order, blocks[bi].order));
        }
        if (!scale_ok) break;  // iterate left the cone numerically; stop

        // ---- Schur complement and KKT factorization ----
        std::vector<Eigen::Triplet<double>> trips;
        for (int r = 0; r < l; ++r) {
            for (const auto& [j1, v1] : nn_rows[r]) {
                for (const auto& [j2, v2] : nn_rows[r]) {
                    trips.emplace_back(j1, j2, v1 * v2 * winv2[r]);
                }
            }
        }
        for (int bi = 0; bi < nb; ++bi) {
            const PsdBlockInfo& blk = blocks[bi];
            const Mat& Wi = Winv[bi];
            const int nv = static_cast<int>(blk.vars.size());
            for (int a = 0; a < nv; ++a) {
                for (int b2 = 0; b2 <= a; ++b2) {
                    double acc = 0.0;
                    for (const auto& ea : blk.coeff[a]) {
                        for (const auto& eb : blk.coeff[b2]) {
                            acc += ea.v * eb.v * Wi(ea.c, eb.r) * Wi(eb.c, ea.r);
                        }
                    }
                    const int ja = blk.vars[a], jb = blk.vars[b2];
                    trips.emplace_back(ja, jb, acc);
                    if (ja != jb) trips.emplace_back(jb, ja, acc);
                }
            }
        }
        for (int j = 0; j < n; ++j) trips.emplace_back(j, j, delta);
        for (int j = 0; j < n; ++j) {
            for (SparseCM::InnerIterator it(Ae, j); it; ++it) {
                trips.emplace_back(n + static_cast<int>(it.row()), j, it.value());
                trips.emplace_back(j, n + static_cast<int>(it.row()), it.value());
            }
        }
        for (int r = 0; r < z; ++r) trips.emplace_back(n + r, n + r, -delta);
        K.setFromTriplets(trips.begin(), trips.end());
        if (!kkt.factorize(K)) break;

        // ---- predictor / corrector solves ----
        auto solve_direction = [&](const Vec& rc, Vec& dxv, Vec& dyev, Vec& ds_out,
                                   Vec& dy_out) {
            // rhs1 = rd - Ak' Winv2 (rc - rp_k)
            Vec t = rc - rp_k;
            Vec wt(mk);
            for (int i = 0; i < l; ++i) wt[i] = winv2[i] * t[i];
            for (int bi = 0; bi < nb; ++bi) {
                const int o = blocks[bi].order;
                Mat Tm = smat_block(t.segment(blocks[bi].off, svec_len(o)), o);
                Mat V = Winv[bi] * Tm * Winv[bi];
                svec_block(V, wt, blocks[bi].off);
            }
            rhs.head(n) = rd - Ak.transpose() * wt;
            rhs.tail(z) = rp_e;
            kkt_solve(rhs, dx);
            dxv = dx.head(n);
            dyev = dx.tail(z);
            ds_out = rp_k - Ak * dxv;
            Vec u = rc - ds_out;
            for (int i = 0; i < l; ++i) dy_out[i] = winv2[i] * u[i];
            for (int bi = 0; bi < nb; ++bi) {
                const int o = blocks[bi].order;
                Mat Um = smat_block(u.segment(blocks[bi].off, svec_len(o)), o);
                Mat V = Winv[bi] * Um * Winv[bi];
                svec_block(V, dy_out, blocks[bi].off);
            }
        };
        auto step_lengths = [&](const Vec& ds, const Vec& dy, double& ap, double& ad) {
            ap = 1e30;
            ad = 1e30;
            for (int i = 0; i < l; ++i) {
                if (ds[i] < 0.0) ap = std::min(ap, -s[i] / ds[i]);
                if (dy[i] < 0.0) ad = std::min(ad, -y[i] / dy[i]);
            }
            for (int bi = 0; bi < nb; ++bi) {
                const int o = blocks[bi].order;
                Mat dS = smat_block(ds.segment(blocks[bi].off, svec_len(o)), o);
                Mat dY = smat_block(dy.segment(blocks[bi].off, svec_len(o)), o);
                ap = std::min(ap, psd_step(Sllt[bi], dS));
                ad = std::min(ad, psd_step(Yllt[bi], dY));
            }
        };

        // predictor: rc = -s (sigma = 0)
        rc_vec = -s;
        Vec dye(z), dye_aff(z), dxv(n), dxv_aff(n);
        solve_direction(rc_vec, dxv_aff, dye_aff, dsv_aff, dyv_aff);
        double ap_aff, ad_aff;
        step_lengths(dsv_aff, dyv_aff, ap_aff, ad_aff);
        ap_aff = std::min(1.0, ap_aff);
        ad_aff = std::min(1.0, ad_aff);
        double gap_aff = 0.0;
        for (int i = 0; i < l; ++i) {
            gap_aff += (s[i] + ap_aff * dsv_aff[i]) * (y[i] + ad_aff * dyv_aff[i]);
        }
        for (int bi = 0; bi < nb; ++bi) {
            const int o = blocks[bi].order;
            Mat dS = smat_block(dsv_aff.segment(blocks[bi].off, svec_len(o)), o);
            Mat dY = smat_block(dyv_aff.segment(blocks[bi].off, svec_len(o)), o);
            gap_aff += ((Smat[bi] + ap_aff * dS) * (Ymat[bi] + ad_aff * dY)).trace();
        }
        const double sigma =
            std::pow(std::min(1.0, std::max(gap_aff, 0.0) / gap_in), 3.0);

        // corrector
        for (int i = 0; i < l; ++i) {
            rc_vec[i] = (sigma * mu - dsv_aff[i] * dyv_aff[i]) / y[i] - s[i];
        }
        for (int bi = 0; bi < nb; ++bi) {
            const int o = blocks[bi].order;
            // Mehrotra second-order term in the scaled space, where both
            // iterates map to the diagonal lam; unscale with R afterward.
            Mat dSa = smat_block(dsv_aff.segment(blocks[bi].off, svec_len(o)), o);
            Mat dYa = smat_block(dyv_aff.segment(blocks[bi].off, svec_len(o)), o);
            Mat dSt = Rinv[bi] * dSa * Rinv[bi].transpose();
            Mat dYt = Rmat[bi].transpose() * dYa * Rmat[bi];
            Mat P = 0.5 * (dSt * dYt + dYt * dSt);
            const Vec& lam = lam_blk[bi];
            Mat Rt(o, o);
            for (int i2 = 0; i2 < o; ++i2) {
                for (int j2 = 0; j2 < o; ++j2) {
                    Rt(i2, j2) = -P(i2, j2) / lam[i2] * (0.5) -
                                 P(i2, j2) / lam[j2] * (0.5);
                }
                Rt(i2, i2) += sigma * mu / lam[i2] - lam[i2];
            }
            Mat R = Rmat[bi] * Rt * Rmat[bi].transpose();
            svec_block(R, rc_vec, blocks[bi].off);
        }
        solve_direction(rc_vec, dxv, dye, dsv, dyv);
        double ap, ad;
        step_lengths(dsv, dyv, ap, ad);
        ap = std::min(1.0, 0.99 * ap);
        ad = std::min(1.0, 0.99 * ad);

        if (opts.verbose) {
            std::fprintf(stderr, "        sigma=%.3e ap=%.3e ad=%.3e\n", sigma, ap, ad);
        }
        x += ap * dxv;
        s += ap * dsv;
        y += ad * dyv;
        ye += ad * dye;
    }

    out.iters = iter;
    // rescue only on gross late-stage divergence; on a plain stall the last
    // iterate is preferable (its primal objective keeps descending)
    if (100.0 * best_score < std::max({out.primal_res, out.dual_res, out.gap_res})) {
        x = best_x;
        y = best_y;
        ye = best_ye;
        s = best_s;
        out.primal_res = best_pres;
        out.dual_res = best_dres;
        out.gap_res = best_gap;
    }
    out.x = E.cwiseProduct(x);
    out.y.resize(m);
    out.y.head(z) = ye;
    out.y.tail(mk) = y;
    out.y = D.cwiseProduct(out.y);
    out.s = Vec::Zero(m);
    for (int i = 0; i < mk; ++i) out.s[z + i] = s[i] / D[z + i];
    out.objective = p.c.dot(out.x);
    return out;
}

// Presolve: zero-cone rows with one effective entry pin a variable to a value,
// and rows of the form a*x_i + b*x_j = 0 make one variable an exact multiple
// of the other. Eliminating both empties (or nearly empties) the equality
// block, which turns the interior-point KKT system into a positive definite
// Schur complement — stable without pivoting and far cheaper to factor.
}  // namespace

ConicSolution solve_ipm(const ConicProblem& p, const SolverOptions& opts) {
    const int n = static_cast<int>(p.c.size());
    const int m = static_cast<int>(p.b.size());
    const int z = p.cones.zero_dim;
    if (z == 0) return ipm_core(p, opts);

    // row-major view of the equality block
    std::vector<std::vector<std::pair<int, double>>> rows(z);
    for (int j = 0; j < n; ++j) {
        for (SparseCM::InnerIterator it(p.A, j); it; ++it) {
            if (it.row() < z) rows[it.row()].emplace_back(j, it.value());
        }
    }

    // union-find over columns with multipliers: x_j = mult(j) * x_root(j)
    std::vector<int> parent(n);
    std::vector<double> pmult(n, 1.0);
    for (int j = 0; j < n; ++j) parent[j] = j;
    auto find = [&](int j, double& t) {
        t = 1.0;
        while (parent[j] != j) {
            t *= pmult[j];
            j = parent[j];
        }
        return j;
    };

    enum RowKind { Kept, AliasEdge, FixRow, Redundant };
    std::vector<RowKind> row_kind(z, Kept);
    std::vector<int> row_col(z, -1);  // column whose stationarity sets the dual
    struct Edge {
        int row, child, parent_col;
    };
    std::vector<Edge> edges;
    std::vector<int> fix_rows;
    std::vector<char> is_fixed(n, 0);
    std::vector<double> fixed_val(n, 0.0);

    bool changed = true;
    for (int pass = 0; changed && pass < 50; ++pass) {
        changed = false;
        for (int r = 0; r < z; ++r) {
            if (row_kind[r] != Kept) continue;
            // accumulate per-root coefficients and the residual rhs
            double rhs = p.b[r];
            int r1 = -1, r2 = -1;
            double a1 = 0.0, a2 = 0.0;
            int active = 0;
            bool raw_rhs = true;
            for (const auto& [j, v] : rows[r]) {
                double t;
                const int root = find(j, t);
                if (is_fixed[root]) {
                    rhs -= v * t * fixed_val[root];
                    raw_rhs = false;
                    continue;
                }
                if (root == r1) {
                    a1 += v * t;
                } else if (root == r2) {
                    a2 += v * t;
                } else if (r1 < 0) {
                    r1 = root;
                    a1 = v * t;
                } else if (r2 < 0) {
                    r2 = root;
                    a2 = v * t;
                } else {
                    active = 3;
                    break;
                }
            }
            if (active == 3) continue;
            if (r1 >= 0 && std::abs(a1) < 1e-12) {
                r1 = r2;
                a1 = a2;
                r2 = -1;
            }
            if (r2 >= 0 && std::abs(a2) < 1e-12) r2 = -1;
            if (r1 < 0) {
                if (std::abs(rhs) <= 1e-9) {
                    row_kind[r] = Redundant;
                    changed = true;
                }
                continue;  // inconsistent row: leave it, the core solver sees it
            }
            if (r2 < 0) {
                is_fixed[r1] = 1;
                fixed_val[r1] = rhs / a1;
                row_kind[r] = FixRow;
                row_col[r] = r1;
                fix_rows.push_back(r);
                changed = true;
                continue;
            }
            const double ratio = -a1 / a2;  // x_{r2} = ratio * x_{r1}
            if (!raw_rhs || rhs != 0.0 || std::abs(ratio) > 1e8 ||
                std::abs(ratio) < 1e-8) {
                continue;
            }
            parent[r2] = r1;
            pmult[r2] = ratio;
            row_kind[r] = AliasEdge;
            row_col[r] = r2;
            edges.push_back({r, r2, r1});
            changed = true;
        }
    }

    // build the reduced problem
    std::vector<int> new_row(m, -1), new_col(n, -1);
    int zr = 0;
    for (int r = 0; r < z; ++r) {
        if (row_kind[r] == Kept) new_row[r] = zr++;
    }
    for (int r = z; r < m; ++r) new_row[r] = zr + (r - z);
    const int mr = zr + (m - z);
    int nr = 0;
    for (int j = 0; j < n; ++j) {
        double t;
        const int root = find(j, t);
        if (root == j && !is_fixed[j]) new_col[j] = nr++;
    }
    if (nr == 0) throw std::invalid_argument("solve_ipm: presolve removed all variables");

    ConicProblem red;
    red.cones = p.cones;
    red.cones.zero_dim = zr;
    red.b = Vec(mr);
    for (int r = 0; r < m; ++r) {
        if (new_row[r] >= 0) red.b[new_row[r]] = p.b[r];
    }
    red.c = Vec::Zero(nr);
    double obj_const = 0.0;
    std::vector<Eigen::Triplet<double>> trips;
    for (int j = 0; j < n; ++j) {
        double t;
        const int root = find(j, t);
        if (is_fixed[root]) {
            const double v = t * fixed_val[root];
            obj_const += p.c[j] * v;
            for (SparseCM::InnerIterator it(p.A, j); it; ++it) {
                const int rn2 = new_row[it.row()];
                if (rn2 >= 0) red.b[rn2] -= it.value() * v;
            }
            continue;
        }
        red.c[new_col[root]] += t * p.c[j];
        for (SparseCM::InnerIterator it(p.A, j); it; ++it) {
            const int rn2 = new_row[it.row()];
            if (rn2 >= 0) trips.emplace_back(rn2, new_col[root], t * it.value());
        }
    }
    red.A.resize(mr, nr);
    red.A.setFromTriplets(trips.begin(), trips.end());

    ConicSolution rs = ipm_core(red, opts);

    // postsolve: expand the primal, then recover duals of eliminated rows from
    // stationarity of the columns they eliminated (children before parents)
    ConicSolution out;
    out.status = rs.status;
    out.iters = rs.iters;
    out.x = Vec(n);
    for (int j = 0; j < n; ++j) {
        double t;
        const int root = find(j, t);
        out.x[j] = t * (is_fixed[root] ? fixed_val[root] : rs.x[new_col[root]]);
    }
    out.s = Vec::Zero(m);
    for (int r = z; r < m; ++r) out.s[r] = rs.s[new_row[r]];
    out.y = Vec::Zero(m);
    for (int r = 0; r < m; ++r) {
        if (new_row[r] >= 0) out.y[r] = rs.y[new_row[r]];
    }
    if (!edges.empty() || !fix_rows.empty()) {
        Vec rho = p.c + p.A.transpose() * out.y;  // stationarity residual
        // repeatedly resolve edges whose child column has no unresolved
        // child edges of its own, so each dual is fixed by one equation
        std::vector<int> pending_children(n, 0);
        for (const Edge& e : edges) ++pending_children[e.parent_col];
        std::vector<char> done(edges.size(), 0);
        bool progress = true;
        std::size_t resolved = 0;
        while (progress && resolved < edges.size()) {
            progress = false;
            for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
                if (done[e] || pending_children[edges[e].child] != 0) continue;
                const Edge& ed = edges[e];
                double coef = 0.0;
                for (const auto& [j, v] : rows[ed.row]) {
                    if (j == ed.child) coef += v;
                }
                const double yr = std::abs(coef) > 1e-12 ? -rho[ed.child] / coef : 0.0;
                out.y[ed.row] = yr;
                for (const auto& [j, v] : rows[ed.row]) rho[j] += yr * v;
                done[e] = 1;
                --pending_children[ed.parent_col];
                ++resolved;
                progress = true;
            }
        }
        for (int r : fix_rows) {
            const int jc = row_col[r];
            double coef = 0.0;
            for (const auto& [j, v] : rows[r]) {
                if (j == jc) coef += v;
            }
            const double yr = std::abs(coef) > 1e-12 ? -rho[jc] / coef : 0.0;
            out.y[r] = yr;
            for (const auto& [j, v] : rows[r]) rho[j] += yr * v;
        }
    }
    out.objective = p.c.dot(out.x);
    (void)obj_const;  // folded into out.objective via the expanded primal
    // residuals of the full problem
    const Vec rp = p.b - p.A * out.x - out.s;
    out.primal_res = rp.norm() / (1.0 + p.b.norm());
    out.dual_res = (p.c + p.A.transpose() * out.y).norm() / (1.0 + p.c.norm());
    const double dobj = -p.b.dot(out.y);
    out.gap_res = std::abs(out.objective - dobj) /
                  (1.0 + std::abs(out.objective) + std::abs(dobj));
    return out;
}

}  // namespace hsvm
