// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Run with the path to the hsvm CLI binary as argv[1] (used by the
// end-to-end determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsvm/conic.hpp"
#include "hsvm/data.hpp"
#include "hsvm/multiclass.hpp"
#include "hsvm/pgd.hpp"
#include "hsvm/problem.hpp"
#include "hsvm/relax.hpp"
#include "hsvm/rng.hpp"
#include "hsvm/trainer.hpp"

using namespace hsvm;
using json = nlohmann::json;

namespace {

std::string g_cli;  // path to the hsvm executable

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& msg) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += msg;
        }
    }
    void note(const std::string& msg) {
        if (!detail.empty()) detail += "; ";
        detail += msg;
    }
};

BinaryView interleaved_view(const Dataset& ds, int n, std::vector<int>& storage) {
    // alternate the two class blocks so any prefix has both signs
    int per = ds.size() / 2;
    storage.clear();
    for (int i = 0; i < n; ++i) storage.push_back((i % 2) * per + i / 2);
    return ovr_view(ds, 0, storage);
}

double taylor1_total(const Separator& w, const BinaryView& view, double C) {
    HsvmConfig cfg;
    cfg.C = C;
    cfg.penalty = PenaltyMode::Taylor1;
    return objective(w, view, cfg).total;
}

// ---------------------------------------------------------------- 1 -----

Check criterion1() {
    Check c;
    SolverOptions opt;
    opt.eps = 1e-8;  // the 1e-6 ordering tolerance needs sub-1e-6 absolute
                     // accuracy on objectives of magnitude ~1e2
    double worst_sm = -1e300, worst_mf = -1e300;
    for (int i = 0; i < 200 && c.ok; ++i) {
        int n = 4 + (i % 27);  // 4..30
        double C = (i % 3 == 0) ? 0.1 : (i % 3 == 1) ? 1.0 : 10.0;
        Dataset ds = gen_gaussian(2, 1.0, (n + 1) / 2 + 1, 2, 1000 + i);
        std::vector<int> idx;
        BinaryView view = interleaved_view(ds, n, idx);

        auto sdp_sol = solve_ipm(assemble_sdp(view, C), opt);
        auto [mp, plan] = assemble_sparse_moment(view, C, 2);
        auto mom_sol = solve_ipm(mp, opt);
        double ps = p_star(sdp_sol);
        double pm = p_star(mom_sol);

        Extraction ex = extract_moment(mom_sol, plan, view, C);
        double fh = taylor1_total(ex.winner, view, C);

        worst_sm = std::max(worst_sm, ps - pm);
        worst_mf = std::max(worst_mf, pm - fh);
        std::ostringstream tag;
        tag << "instance " << i << " (n=" << n << ", C=" << C << ")";
        c.require(ps <= pm + 1e-6, tag.str() + ": p*_SDP > p*_Moment");
        c.require(pm <= fh + 1e-6, tag.str() + ": p*_Moment > f_hat");
    }
    if (c.ok) {
        std::ostringstream os;
        os << "200 instances; max(p_sdp - p_mom) = " << worst_sm
           << ", max(p_mom - f_hat) = " << worst_mf;
        c.note(os.str());
    }
    return c;
}

// ---------------------------------------------------------------- 2 -----

Check criterion2() {
    Check c;
    c.require(std::abs(subopt_gap(2.0, 1.0) - 0.25) <= 1e-15, "subopt_gap(2,1) != 0.25");
    c.require(std::abs(subopt_gap(1.0, 1.0)) <= 1e-15, "subopt_gap(1,1) != 0");
    c.require(std::abs(subopt_gap(3.0, 2.0) - 1.0 / 6.0) <= 1e-15,
              "subopt_gap(3,2) != 1/6");
    return c;
}

// ---------------------------------------------------------------- 3 -----

Check criterion3() {
    Check c;
    Dataset ds = gen_gaussian(2, 1.0, 100, 2, 2026);
    TrainOptions opt;
    opt.methods = {Method::Pgd, Method::Moment};
    opt.Cs = {10.0};
    opt.folds = 5;
    opt.scheme = "ovo";
    opt.seed = 1;
    TrainReport rep = run_training(ds, opt);

    double eta_sum = 0, mom_acc = 0, pgd_acc = 0;
    int eta_n = 0, mom_n = 0, pgd_n = 0;
    for (const auto& r : rep.records) {
        if (r.method == "moment") {
            if (r.eta) { eta_sum += *r.eta; ++eta_n; }
            mom_acc += r.test_accuracy;
            ++mom_n;
        } else if (r.method == "pgd") {
            pgd_acc += r.test_accuracy;
            ++pgd_n;
        }
    }
    c.require(eta_n == 5 && mom_n == 5 && pgd_n == 5, "missing fold records");
    double mean_eta = eta_sum / std::max(eta_n, 1);
    double mean_mom = mom_acc / std::max(mom_n, 1);
    double mean_pgd = pgd_acc / std::max(pgd_n, 1);
    c.require(mean_eta <= 0.15, "mean moment eta > 0.15");
    c.require(mean_mom >= mean_pgd - 0.02, "moment test accuracy trails pgd by > 2pp");
    std::ostringstream os;
    os << "mean eta = " << mean_eta << ", moment acc = " << mean_mom
       << ", pgd acc = " << mean_pgd;
    c.note(os.str());
    return c;
}

// ---------------------------------------------------------------- 4 -----

// Handcrafted tree-style instance: an 80-node balanced hierarchy embedded in
// the hyperbolic plane (root near the origin, children fanned outward at
// increasing radius), where the positive class is one deep subtree (8 nodes,
// 10%) occupying a narrow angular wedge.
Dataset tree_instance() {
    Dataset ds;
    ds.d = 2;
    auto add = [&](double r, double theta, int label) {
        Vec v(2);
        v << r * std::cos(theta), r * std::sin(theta);
        ds.points.push_back(exp0(TangentVector{v}));
        ds.labels.push_back(label);
    };
    const double pi = M_PI;
    add(0.0, 0.0, 0);  // root
    // level 1: 7 branch heads
    for (int k = 0; k < 7; ++k) add(0.35, 2 * pi * k / 7.0, 0);
    // levels 2-3 of the six negative branches; the two outermost branches are
    // one leaf short, which brings the total to exactly 80 points
    for (int k = 1; k < 7; ++k) {
        double base = 2 * pi * k / 7.0;
        for (int j = 0; j < 4; ++j) add(0.70, base + (j - 1.5) * 0.18, 0);
        int m = (k >= 5) ? 6 : 7;
        for (int j = 0; j < m; ++j) add(1.05, base + (j - (m - 1) / 2.0) * 0.12, 0);
    }
    // the positive subtree: descendants of branch head 0, wedge around angle 0
    for (int j = 0; j < 3; ++j) add(0.77, (j - 1) * 0.15, 1);
    for (int j = 0; j < 5; ++j) add(1.12, (j - 2) * 0.105, 1);
    return ds;
}

Check criterion4() {
    Check c;
    Dataset ds = tree_instance();
    c.require(ds.size() == 80, "instance is not 80 points");
    int pos = 0;
    for (int l : ds.labels) pos += l;
    c.require(pos == 8, "positive share is not 10%");

    std::vector<int> all(ds.size());
    for (int i = 0; i < ds.size(); ++i) all[i] = i;
    BinaryView view = ovr_view(ds, 1, all);
    const double C = 10.0;
    SolverOptions opt;
    opt.eps = 1e-7;

    auto evaluate = [&](const Separator& w) {
        std::vector<int> pred, truth;
        for (int i = 0; i < view.size(); ++i) {
            pred.push_back(decide(w, view.point(i)) == 1 ? 1 : 0);
            truth.push_back(view.y[i] == 1 ? 1 : 0);
        }
        return weighted_f1(pred, truth);
    };

    double f1_pgd = evaluate(pgd_train(view, C).w);

    auto sdp_sol = solve_ipm(assemble_sdp(view, C), opt);
    Extraction es = extract_sdp(sdp_sol, view, C);
    double f1_sdp = evaluate(es.winner);
    double eta_sdp = subopt_gap(taylor1_total(es.winner, view, C), p_star(sdp_sol));

    auto [mp, plan] = assemble_sparse_moment(view, C, 2);
    auto mom_sol = solve_ipm(mp, opt);
    Extraction em = extract_moment(mom_sol, plan, view, C);
    double f1_mom = evaluate(em.winner);
    double eta_mom = subopt_gap(taylor1_total(em.winner, view, C), p_star(mom_sol));

    c.require(eta_mom <= 0.15, "moment eta > 0.15");
    c.require(f1_mom >= f1_sdp, "moment F1 < sdp F1");
    c.require(f1_sdp >= f1_pgd - 0.02, "sdp F1 < pgd F1 - 0.02");
    std::ostringstream os;
    os << "F1 moment/sdp/pgd = " << f1_mom << "/" << f1_sdp << "/" << f1_pgd
       << ", eta moment = " << eta_mom << " (sdp eta reported: " << eta_sdp << ")";
    c.note(os.str());
    return c;
}

// ---------------------------------------------------------------- 5 -----

ConicProblem min_eig_sdp() {
    ConicProblem p;
    Mat C(2, 2);
    C << 3, 0, 0, 1;
    p.c = svec(C);
    p.cones.zero_dim = 1;
    p.cones.psd_block_sizes = {2};
    p.A.resize(4, 3);
    std::vector<Eigen::Triplet<double>> trip{{0, 0, 1.0}, {0, 2, 1.0}};
    for (int i = 0; i < 3; ++i) trip.emplace_back(1 + i, i, -1.0);
    p.A.setFromTriplets(trip.begin(), trip.end());
    p.b = Vec::Zero(4);
    p.b[0] = 1.0;
    return p;
}

ConicProblem corner_sdp() {
    ConicProblem p;
    p.c = svec(Mat::Identity(2, 2));
    p.cones.zero_dim = 1;
    p.cones.psd_block_sizes = {2};
    p.A.resize(4, 3);
    std::vector<Eigen::Triplet<double>> trip{{0, 0, 1.0}};
    for (int i = 0; i < 3; ++i) trip.emplace_back(1 + i, i, -1.0);
    p.A.setFromTriplets(trip.begin(), trip.end());
    p.b = Vec::Zero(4);
    p.b[0] = 1.0;
    return p;
}

ConicProblem lp_min_nonneg() {
    ConicProblem p;
    p.c = Vec::Ones(1);
    p.cones.nonneg_dim = 1;
    p.A.resize(1, 1);
    p.A.insert(0, 0) = -1.0;
    p.b = Vec::Zero(1);
    return p;
}

Check criterion5() {
    Check c;
    auto kkt = [&](const ConicProblem& p, const ConicSolution& s, const char* name) {
        c.require(s.status == SolveStatus::Optimal, std::string(name) + ": not optimal");
        c.require(s.primal_res <= 1e-7, std::string(name) + ": primal residual > 1e-7");
        c.require(s.dual_res <= 1e-7, std::string(name) + ": dual residual > 1e-7");
        c.require(s.gap_res <= 1e-7, std::string(name) + ": gap residual > 1e-7");
    };

    auto pe = min_eig_sdp();
    auto se = solve(pe);
    kkt(pe, se, "min-eig sdp");
    c.require(std::abs(se.objective - 1.0) <= 1e-6, "min-eig objective != 1");

    auto pc = corner_sdp();
    auto sc = solve(pc);
    kkt(pc, sc, "corner sdp");
    c.require(std::abs(sc.objective - 1.0) <= 1e-6, "corner objective != 1");

    auto pl = lp_min_nonneg();
    auto sl = solve(pl);
    kkt(pl, sl, "1-var lp");
    c.require(std::abs(sl.objective) <= 1e-6, "lp objective != 0");

    auto se2 = solve(pe);
    c.require(se2.iters == se.iters && (se2.x - se.x).norm() == 0.0,
              "solver is not deterministic");
    std::ostringstream os;
    os << "min-eig obj = " << se.objective << " in " << se.iters << " iters";
    c.note(os.str());
    return c;
}

// ---------------------------------------------------------------- 6 -----

Check criterion6() {
    Check c;
    NormalSampler rng(202);
    double worst_rt = 0.0;
    for (int t = 0; t < 1000; ++t) {
        Vec v(2);
        v << rng(), rng();
        if (v.norm() > 1e-12) v *= (5.0 * rng.unit()) / v.norm();
        TangentVector back = log0(exp0(TangentVector{v}));
        worst_rt = std::max(worst_rt, (back.coords - v).norm());
    }
    c.require(worst_rt <= 1e-9, "exp0/log0 round trip > 1e-9");

    // boundary-circle membership for a circle-type separator
    Separator w{Vec(3)};
    w.w << 1.0, std::sqrt(2.0), 0.5;
    auto bound = boundary_to_poincare(w);
    auto circ = std::get<PoincareCircle>(bound);
    double worst_mb = 0.0;
    for (int k = -30; k <= 30; ++k) {
        // parametrize {x : w*x = 0} on the hyperboloid
        double x2 = 0.15 * k;
        // x0 = (w1 x1 + w2 x2)/w0 and x0^2 = 1 + x1^2 + x2^2 -> quadratic in x1
        double a = w.w[1] * w.w[1] - w.w[0] * w.w[0];
        double b = 2 * w.w[1] * w.w[2] * x2;
        double cc = w.w[2] * w.w[2] * x2 * x2 - w.w[0] * w.w[0] * (1 + x2 * x2);
        double disc = b * b - 4 * a * cc;
        if (disc < 0) continue;
        double x1 = (-b + std::sqrt(disc)) / (2 * a);
        Vec p(3);
        p << (w.w[1] * x1 + w.w[2] * x2) / w.w[0], x1, x2;
        if (p[0] < 1.0) continue;
        Vec s = stereographic(make_point(p, true));
        worst_mb = std::max(worst_mb, std::abs((s - circ.center).norm() - circ.radius));
    }
    c.require(worst_mb <= 1e-8, "boundary-circle membership > 1e-8");

    // Jacobian vs central finite differences
    double worst_j = 0.0;
    const double h = 1e-6;
    for (int t = 0; t < 100; ++t) {
        Vec v(2);
        v << rng(), rng();
        if (v.norm() > 3.0) v *= 3.0 / v.norm();
        if (v.norm() < 1e-3) v[0] += 0.1;
        Mat Ja = jacobian_exp0(exp0(TangentVector{v}));
        Mat Jfd(3, 2);
        for (int j = 0; j < 2; ++j) {
            Vec vp = v, vm = v;
            vp[j] += h;
            vm[j] -= h;
            Jfd.col(j) =
                (exp0(TangentVector{vp}).coords - exp0(TangentVector{vm}).coords) / (2 * h);
        }
        worst_j = std::max(worst_j, (Ja - Jfd).norm() / (1.0 + Jfd.norm()));
    }
    c.require(worst_j <= 1e-5, "jacobian vs finite differences > 1e-5 relative");
    std::ostringstream os;
    os << "round trip " << worst_rt << ", membership " << worst_mb << ", jacobian "
       << worst_j;
    c.note(os.str());
    return c;
}

// ---------------------------------------------------------------- 7 -----

Check criterion7() {
    Check c;
    NormalSampler rng(303);
    const double h = 1e-6;
    double worst = 0.0;
    int checked = 0;
    for (int t = 0; t < 140 && checked < 100; ++t) {
        Dataset ds = gen_gaussian(2, 1.0, 4 + (t % 6), 2, 3000 + t);
        std::vector<int> all(ds.size());
        for (int i = 0; i < ds.size(); ++i) all[i] = i;
        BinaryView view = ovr_view(ds, 0, all);
        double C = (t % 3 == 0) ? 0.1 : (t % 3 == 1) ? 1.0 : 10.0;
        Vec w(3);
        w << rng(), rng(), rng();

        bool near_kink = false;
        for (int i = 0; i < view.size(); ++i)
            if (std::abs(score(Separator{w}, view.point(i), view.y[i]) - 1.0) < 1e-4)
                near_kink = true;
        if (near_kink) continue;

        Vec g = grad_objective(Separator{w}, view, C);
        HsvmConfig cfg;
        cfg.C = C;
        cfg.penalty = PenaltyMode::Exact;
        Vec gfd(3);
        for (int j = 0; j < 3; ++j) {
            Vec wp = w, wm = w;
            wp[j] += h;
            wm[j] -= h;
            gfd[j] = (objective(Separator{wp}, view, cfg).total -
                      objective(Separator{wm}, view, cfg).total) /
                     (2 * h);
        }
        worst = std::max(worst, (g - gfd).norm() / (1.0 + gfd.norm()));
        ++checked;
    }
    c.require(checked >= 100, "fewer than 100 kink-free instances");
    c.require(worst <= 1e-5, "gradient vs finite differences > 1e-5 relative");
    std::ostringstream os;
    os << checked << " instances, worst relative error " << worst;
    c.note(os.str());
    return c;
}

// ---------------------------------------------------------------- 8 -----

Check criterion8() {
    Check c;
    // basis for one group (w0, w1, w2, xi) at kappa = 2, in the documented order
    MonomialBasis b = make_basis(4, 2);
    std::vector<Exponents> expected = {
        {0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1},
        {2, 0, 0, 0}, {0, 2, 0, 0}, {0, 0, 2, 0}, {0, 0, 0, 2}, {1, 1, 0, 0},
        {1, 0, 1, 0}, {1, 0, 0, 1}, {0, 1, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 1}};
    c.require(b.size() == 15, "group basis size != 15");
    for (int i = 0; i < 15 && c.ok; ++i)
        c.require(b.entries[i] == expected[i],
                  "basis entry " + std::to_string(i) + " out of order");

    Dataset ds = gen_gaussian(2, 1.0, 2, 2, 404);
    std::vector<int> all(ds.size());
    for (int i = 0; i < ds.size(); ++i) all[i] = i;
    BinaryView view = ovr_view(ds, 0, all);  // 4 samples
    auto [p, plan] = assemble_sparse_moment(view, 10.0, 2);
    c.require(plan.tms.size() == 70, "TMS length != 70");

    SolverOptions opt;
    opt.eps = 1e-7;
    auto sol = solve_ipm(p, opt);
    Mat anchor = plan.moment_matrix(sol.x, 0);
    double worst = 0.0;
    for (int g = 1; g < plan.n_groups; ++g) {
        Mat mg = plan.moment_matrix(sol.x, g);
        for (auto [k, l] : plan.binding)
            worst = std::max(worst, std::abs(mg(k, l) - anchor(k, l)));
    }
    c.require(worst <= 10 * opt.eps, "sparse-binding disagreement > 10x solver eps");
    std::ostringstream os;
    os << "binding positions " << plan.binding.size() << ", worst disagreement "
       << worst;
    c.note(os.str());
    return c;
}

// ---------------------------------------------------------------- 9 -----

Check criterion9() {
    Check c;
    Dataset ds = gen_gaussian(2, 1.0, 8, 2, 505);
    std::vector<int> all(ds.size());
    for (int i = 0; i < ds.size(); ++i) all[i] = i;
    BinaryView view = ovr_view(ds, 0, all);
    SolverOptions opt;
    opt.eps = 1e-9;

    double plain = p_star(solve_ipm(assemble_sdp(view, 10.0), opt));
    double prev = -1e300;
    std::vector<double> vals;
    for (double rho : {0.0, 0.05, 0.1}) {
        double v = p_star(solve_ipm(assemble_robust_sdp(view, 10.0, rho), opt));
        vals.push_back(v);
        c.require(v >= prev - 1e-7, "objective decreased as rho grew");
        prev = v;
    }
    c.require(std::abs(vals[0] - plain) <= 1e-7 * (1.0 + std::abs(plain)),
              "rho = 0 does not reduce to the plain SDP");
    std::ostringstream os;
    os << "objectives at rho {0, 0.05, 0.1} = " << vals[0] << ", " << vals[1] << ", "
       << vals[2] << " (plain " << plain << ")";
    c.note(os.str());
    return c;
}

// --------------------------------------------------------------- 10 -----

Check criterion10() {
    Check c;
    if (g_cli.empty()) {
        c.require(false, "path to the hsvm CLI was not supplied");
        return c;
    }
    auto run = [&](const std::string& args) {
        std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    c.require(run("gen --classes 2 --scale 1.0 --per-class 25 --dim 2 --seed 7 "
                  "--out acc10.csv") == 0,
              "gen failed");
    const std::string train_flags =
        "train --data acc10.csv --method pgd,sdp,moment --scheme ovo --C 10 "
        "--folds 3 --seed 1 --out ";
    c.require(run(train_flags + "acc10_a.json") == 0, "train run 1 failed");
    c.require(run(train_flags + "acc10_b.json") == 0, "train run 2 failed");
    if (!c.ok) return c;

    std::ifstream fa("acc10_a.json"), fb("acc10_b.json");
    json ja = json::parse(fa), jb = json::parse(fb);
    for (auto* j : {&ja, &jb})
        for (auto& rec : (*j)["records"]) rec.erase("wall_seconds");
    c.require(ja == jb, "reruns with identical flags differ numerically");
    if (c.ok) c.note(std::to_string(ja["records"].size()) + " records identical");
    std::remove("acc10.csv");
    std::remove("acc10_a.json");
    std::remove("acc10_b.json");
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli = argv[1];

    struct Entry {
        int id;
        const char* name;
        std::function<Check()> fn;
    };
    std::vector<Entry> entries = {
        {1, "relaxation ordering on 200 random instances", criterion1},
        {2, "suboptimality-gap arithmetic", criterion2},
        {3, "Gaussian benchmark: moment eta and accuracy vs pgd", criterion3},
        {4, "imbalanced tree-style instance: eta and F1 ordering", criterion4},
        {5, "conic solver unit problems: objectives, KKT, determinism", criterion5},
        {6, "manifold numerics: round trip, boundary, jacobian", criterion6},
        {7, "pgd gradient vs finite differences", criterion7},
        {8, "moment bookkeeping: basis order, TMS length, binding", criterion8},
        {9, "robust SDP reduction and monotonicity", criterion9},
        {10, "end-to-end CLI determinism", criterion10},
    };

    int failures = 0;
    for (auto& e : entries) {
        auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = e.fn();
        } catch (const std::exception& ex) {
            c.ok = false;
            c.note(std::string("exception: ") + ex.what());
        }
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d [%s]: %s (%.1fs)%s%s\n", e.id, e.name,
                    c.ok ? "PASS" : "FAIL", secs, c.detail.empty() ? "" : " -- ",
                    c.detail.c_str());
        std::fflush(stdout);
        if (!c.ok) ++failures;
    }
    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    else std::printf("all 10 criteria passed\n");
    return failures == 0 ? 0 : 1;
}
