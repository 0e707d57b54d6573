#include "hsvm/conic.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "hsvm/kernels.hpp"

namespace hsvm {

int ConeSpec::total_dim() const {
    int t = zero_dim + nonneg_dim;
    for (int n : psd_block_sizes) t += svec_len(n);
    return t;
}

std::vector<int> ConeSpec::psd_offsets() const {
    std::vector<int> off;
    int pos = zero_dim + nonneg_dim;
    for (int n : psd_block_sizes) {
        off.push_back(pos);
        pos += svec_len(n);
    }
    return off;
}

int svec_len(int order) { return order * (order + 1) / 2; }

Vec svec(const Mat& m) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n) throw std::invalid_argument("svec: square matrix required");
    Mat sym = 0.5 * (m + m.transpose());
    Vec v(svec_len(n));
    const double sqrt2 = std::sqrt(2.0);
    int k = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = j; i < n; ++i, ++k) {
            v[k] = (i == j) ? sym(i, j) : sqrt2 * sym(i, j);
        }
    }
    return v;
}

Mat smat(const Vec& v) {
    // invert k = n(n+1)/2
    const int len = static_cast<int>(v.size());
    const int n = static_cast<int>(std::round((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0));
    if (svec_len(n) != len) throw std::invalid_argument("smat: non-triangular length");
    Mat m(n, n);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    int k = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = j; i < n; ++i, ++k) {
            double val = (i == j) ? v[k] : v[k] * inv_sqrt2;
            m(i, j) = val;
            m(j, i) = val;
        }
    }
    return m;
}

Mat project_psd(const Mat& m) {
    Mat sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("project_psd: eigendecomposition failed");
    }
    Vec lam = eig.eigenvalues().cwiseMax(0.0);
    return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

Vec project_cone(const Vec& s, const ConeSpec& cones) {
    if (s.size() != cones.total_dim()) {
        throw std::invalid_argument("project_cone: dimension mismatch");
    }
    Vec out = s;
    out.head(cones.zero_dim).setZero();
    kernels::clamp_nonneg(out.data() + cones.zero_dim, cones.nonneg_dim);
    kernels::project_psd_blocks(out.data(), cones.psd_offsets(), cones.psd_block_sizes);
    return out;
}

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::MaxIters: return "max_iters";
        case SolveStatus::PrimalInfeasibleCert: return "primal_infeasible_cert";
        case SolveStatus::DualInfeasibleCert: return "dual_infeasible_cert";
    }
    return "unknown";
}

namespace {

// Projection of the y-slot onto the dual cone K*: zero rows are free,
// nonneg and PSD blocks are self-dual.
void project_dual_cone(Vec& y, const ConeSpec& cones,
                       const std::vector<int>& psd_off) {
    kernels::clamp_nonneg(y.data() + cones.zero_dim, cones.nonneg_dim);
    kernels::project_psd_blocks(y.data(), psd_off, cones.psd_block_sizes);
}

}  // namespace

ConicSolution solve(const ConicProblem& p, const SolverOptions& opts) {
    const int n = static_cast<int>(p.c.size());
    const int m = static_cast<int>(p.b.size());
    if (n == 0 || m == 0) throw std::invalid_argument("solve: structurally empty problem");
    if (p.A.rows() != m || p.A.cols() != n || p.cones.total_dim() != m) {
        throw std::invalid_argument("solve: inconsistent problem dimensions");
    }

    // -------- scaling (Ruiz equilibration + b/c normalization) --------
    kernels::SparseRM Ahat(p.A);       // scaled copy, row-major
    kernels::SparseRM Arm(p.A);        // original, for residuals
    kernels::SparseRM Atrm(p.A.transpose());

    Vec D = Vec::Ones(m), E = Vec::Ones(n);
    // rows of a PSD block must share one scale to preserve cone membership
    std::vector<int> row_block(m, -1);  // -1: independently scalable row
    {
        const auto psd_off = p.cones.psd_offsets();
        for (std::size_t bidx = 0; bidx < psd_off.size(); ++bidx) {
            const int len = svec_len(p.cones.psd_block_sizes[bidx]);
            for (int r = 0; r < len; ++r) row_block[psd_off[bidx] + r] = static_cast<int>(bidx);
        }
    }
    const int num_psd = static_cast<int>(p.cones.psd_block_sizes.size());
    for (int sweep = 0; sweep < opts.ruiz_sweeps; ++sweep) {
        Vec rnorm = Vec::Zero(m), cnorm = Vec::Zero(n);
        for (int i = 0; i < m; ++i) {
            for (kernels::SparseRM::InnerIterator it(Ahat, i); it; ++it) {
                rnorm[i] = std::max(rnorm[i], std::abs(it.value()));
                cnorm[it.col()] = std::max(cnorm[it.col()], std::abs(it.value()));
            }
        }
        Vec blockmax = Vec::Zero(std::max(num_psd, 1));
        for (int i = 0; i < m; ++i) {
            if (row_block[i] >= 0) blockmax[row_block[i]] = std::max(blockmax[row_block[i]], rnorm[i]);
        }
        Vec dr(m), dc(n);
        for (int i = 0; i < m; ++i) {
            double v = row_block[i] >= 0 ? blockmax[row_block[i]] : rnorm[i];
            dr[i] = v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0;
        }
        for (int j = 0; j < n; ++j) dc[j] = cnorm[j] > 1e-12 ? 1.0 / std::sqrt(cnorm[j]) : 1.0;
        for (int i = 0; i < m; ++i) {
            for (kernels::SparseRM::InnerIterator it(Ahat, i); it; ++it) {
                it.valueRef() *= dr[i] * dc[it.col()];
            }
        }
        D.array() *= dr.array();
        E.array() *= dc.array();
    }
    Vec bh = D.asDiagonal() * p.b;
    Vec ch = E.asDiagonal() * p.c;
    const double beta = 1.0 / (1.0 + bh.norm());
    const double gamma = 1.0 / (1.0 + ch.norm());
    bh *= beta;
    ch *= gamma;
    // primal/dual balance: scaling (A, b) by theta leaves x unchanged while
    // weighting how fast the dual iterates move relative to the primal
    const double theta = opts.data_scale;
    if (theta != 1.0) {
        for (int i = 0; i < m; ++i) {
            for (kernels::SparseRM::InnerIterator it(Ahat, i); it; ++it) {
                it.valueRef() *= theta;
            }
        }
        bh *= theta;
    }

    // -------- KKT factorization: K = [[I, Ahat'], [Ahat, -I]] --------
    SparseCM K(n + m, n + m);
    {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(Ahat.nonZeros() + n + m);
        for (int j = 0; j < n; ++j) trips.emplace_back(j, j, 1.0);
        for (int j = 0; j < m; ++j) trips.emplace_back(n + j, n + j, -1.0);
        for (int i = 0; i < m; ++i) {
            for (kernels::SparseRM::InnerIterator it(Ahat, i); it; ++it) {
                trips.emplace_back(n + i, it.col(), it.value());
                trips.emplace_back(it.col(), n + i, it.value());
            }
        }
        K.setFromTriplets(trips.begin(), trips.end());
    }
    Eigen::SimplicialLDLT<SparseCM> ldlt;
    ldlt.compute(K);
    if (ldlt.info() != Eigen::Success) {
        throw std::runtime_error("solve: KKT factorization failed");
    }

    // M z = w_p is solved through K [z_x; z_y'] = [w_x; -w_y], with
    // M = [[I, A'],[-A, I]].
    auto msolve = [&](const Vec& wx, const Vec& wy, Vec& zx, Vec& zy) {
        Vec rhs(n + m);
        rhs.head(n) = wx;
        rhs.tail(m) = -wy;
        Vec sol = ldlt.solve(rhs);
        zx = sol.head(n);
        zy = sol.tail(m);
    };

    Vec gx, gy;
    msolve(ch, bh, gx, gy);
    const double zeta_g = ch.dot(gx) + bh.dot(gy);

    const auto psd_off = p.cones.psd_offsets();

    // -------- homogeneous self-dual ADMM loop --------
    // State z = [u_x; u_y; u_tau; v_y; v_kappa] (v_x is identically zero).
    const int zdim = n + 2 * m + 2;
    const int o_ux = 0, o_uy = n, o_utau = n + m, o_vy = n + m + 1, o_vk = n + 2 * m + 1;
    Vec hx(n), hy(m), tx(n), ty(m), tmp_m(m), tmp_n(n), uy_next(m);

    // One over-relaxed Douglas-Rachford sweep z -> T(z).
    auto step = [&](const Vec& z, Vec& znext) {
        const double utau = z[o_utau];
        const double vkappa = z[o_vk];
        const double wtau = utau + vkappa;
        tmp_m = z.segment(o_uy, m) + z.segment(o_vy, m);
        msolve(z.segment(o_ux, n), tmp_m, hx, hy);
        const double ztau = (wtau + ch.dot(hx) + bh.dot(hy)) / (1.0 + zeta_g);
        tx = opts.alpha * (hx - gx * ztau) + (1.0 - opts.alpha) * z.segment(o_ux, n);
        ty = opts.alpha * (hy - gy * ztau) + (1.0 - opts.alpha) * z.segment(o_uy, m) -
             z.segment(o_vy, m);
        const double ttau = opts.alpha * ztau + (1.0 - opts.alpha) * utau - vkappa;

        uy_next = ty;
        project_dual_cone(uy_next, p.cones, psd_off);
        znext.segment(o_ux, n) = tx;  // free slot: projection is the identity
        znext.segment(o_uy, m) = uy_next;
        znext[o_utau] = ttau > 0.0 ? ttau : 0.0;
        znext.segment(o_vy, m) = uy_next - ty;
        znext[o_vk] = znext[o_utau] - ttau;
    };

    Vec z = Vec::Zero(zdim);
    z[o_utau] = 1.0;
    z[o_vk] = 1.0;
    Vec Tz(zdim), f(zdim);
    step(z, Tz);
    f = Tz - z;

    // Anderson acceleration (type II) with plain-step safeguard.
    const int mem = std::max(opts.aa_memory, 0);
    Mat dF(zdim, mem), dG(zdim, mem);
    int aa_count = 0, aa_head = 0;
    Vec z_acc(zdim), Tz_acc(zdim), f_acc(zdim);

    ConicSolution out;
    out.status = SolveStatus::MaxIters;

    auto compute_candidate = [&](Vec& x, Vec& y, Vec& s) {
        const double inv_tau = 1.0 / z[o_utau];
        x = (E.asDiagonal() * z.segment(o_ux, n)) * (inv_tau / beta);
        y = (D.asDiagonal() * z.segment(o_uy, m)) * (inv_tau * theta / gamma);
        s = (z.segment(o_vy, m).array() / D.array()).matrix() * (inv_tau / (beta * theta));
    };

    const double bnorm1 = 1.0 + p.b.norm();
    const double cnorm1 = 1.0 + p.c.norm();

    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        bool advanced = false;
        if (mem > 0 && aa_count > 0) {
            const int k = std::min(aa_count, mem);  // circular buffer, order-free LS
            Mat A_ls(k, k);
            Vec rhs(k);
            for (int a = 0; a < k; ++a) rhs[a] = dF.col(a).dot(f);
            for (int a = 0; a < k; ++a) {
                for (int b2 = a; b2 < k; ++b2) {
                    A_ls(a, b2) = dF.col(a).dot(dF.col(b2));
                    A_ls(b2, a) = A_ls(a, b2);
                }
            }
            const double reg = 1e-10 * A_ls.trace() + 1e-30;
            for (int a = 0; a < k; ++a) A_ls(a, a) += reg;
            Vec gamma_ls = A_ls.ldlt().solve(rhs);
            z_acc = Tz;
            for (int a = 0; a < k; ++a) z_acc -= gamma_ls[a] * dG.col(a);
            step(z_acc, Tz_acc);
            f_acc = Tz_acc - z_acc;
            if (f_acc.norm() <= f.norm()) {
                dF.col(aa_head) = f_acc - f;
                dG.col(aa_head) = Tz_acc - Tz;
                aa_head = (aa_head + 1) % mem;
                ++aa_count;
                z = z_acc;
                Tz.swap(Tz_acc);
                f.swap(f_acc);
                advanced = true;
            } else {
                aa_count = 0;  // restart the window after a rejected step
                aa_head = 0;
            }
        }
        if (!advanced) {
            z_acc = Tz;  // plain sweep
            step(z_acc, Tz_acc);
            f_acc = Tz_acc - z_acc;
            if (mem > 0) {
                dF.col(aa_head) = f_acc - f;
                dG.col(aa_head) = Tz_acc - Tz;
                aa_head = (aa_head + 1) % mem;
                ++aa_count;
            }
            z = z_acc;
            Tz.swap(Tz_acc);
            f.swap(f_acc);
        }

        if ((iter + 1) % opts.check_interval != 0) continue;

        if (z[o_utau] > 1e-12) {
            Vec x, y, s;
            compute_candidate(x, y, s);
            kernels::spmv(Arm, x, tmp_m);
            const double pres = (tmp_m + s - p.b).norm() / bnorm1;
            kernels::spmv(Atrm, y, tmp_n);
            const double dres = (tmp_n + p.c).norm() / cnorm1;
            const double pobj = p.c.dot(x);
            const double dobj = -p.b.dot(y);
            const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
            if (opts.verbose && (iter + 1) % (opts.check_interval * 40) == 0) {
                std::fprintf(stderr, "  [conic] it=%6d pres=%.3e dres=%.3e gap=%.3e\n",
                             iter + 1, pres, dres, gap);
            }
            out.primal_res = pres;
            out.dual_res = dres;
            out.gap_res = gap;
            if (pres <= opts.eps && dres <= opts.eps && gap <= opts.eps) {
                out.x = x;
                out.y = y;
                out.s = s;
                out.status = SolveStatus::Optimal;
                out.objective = pobj;
                out.iters = iter + 1;
                return out;
            }
        } else {
            // tau collapsed; test the homogeneous certificates
            Vec ytil = (D.asDiagonal() * z.segment(o_uy, m)) * (theta / gamma);
            Vec xtil = (E.asDiagonal() * z.segment(o_ux, n)) / beta;
            Vec stil = (z.segment(o_vy, m).array() / D.array()).matrix() / (beta * theta);
            const double bty = p.b.dot(ytil);
            const double ctx = p.c.dot(xtil);
            if (bty < 0.0) {
                kernels::spmv(Atrm, ytil, tmp_n);
                if (tmp_n.norm() / (-bty) <= opts.infeas_tol) {
                    out.status = SolveStatus::PrimalInfeasibleCert;
                    out.y = ytil;
                    out.iters = iter + 1;
                    return out;
                }
            }
            if (ctx < 0.0) {
                kernels::spmv(Arm, xtil, tmp_m);
                if ((tmp_m + stil).norm() / (-ctx) <= opts.infeas_tol) {
                    out.status = SolveStatus::DualInfeasibleCert;
                    out.x = xtil;
                    out.iters = iter + 1;
                    return out;
                }
            }
        }
    }

    // max_iters: return the best-effort candidate
    out.iters = iter;
    if (z[o_utau] > 1e-12) {
        compute_candidate(out.x, out.y, out.s);
        out.objective = p.c.dot(out.x);
    } else {
        out.x = Vec::Zero(n);
        out.y = Vec::Zero(m);
        out.s = Vec::Zero(m);
        out.objective = 0.0;
    }
    return out;
}

void dump_problem(const ConicProblem& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_problem: cannot write " + path);
    out << "# conic problem: min c'x s.t. Ax + s = b, s in K\n";
    out << "dims " << p.A.rows() << " " << p.A.cols() << "\n";
    out << "cones zero " << p.cones.zero_dim << " nonneg " << p.cones.nonneg_dim
        << " psd";
    for (int v : p.cones.psd_block_sizes) out << " " << v;
    out << "\n";
    char buf[64];
    out << "c\n";
    for (int j = 0; j < p.c.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%d %.17g\n", j, p.c[j]);
        out << buf;
    }
    out << "b\n";
    for (int i = 0; i < p.b.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%d %.17g\n", i, p.b[i]);
        out << buf;
    }
    out << "A_triplets\n";
    for (int k = 0; k < p.A.outerSize(); ++k) {
        for (SparseCM::InnerIterator it(p.A, k); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n",
                          static_cast<long>(it.row()), static_cast<long>(it.col()),
                          it.value());
            out << buf;
        }
    }
}

}  // namespace hsvm
