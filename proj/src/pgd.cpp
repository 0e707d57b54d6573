#include "hsvm/pgd.hpp"

#include <cmath>
#include <limits>

namespace hsvm {

Separator euclidean_warmstart(const BinaryView& view, double C,
                              double lr, int epochs) {
    const int n = view.size();
    const int d = view.base->d;
    Vec u = Vec::Zero(d);
    double b = 0.0;
    std::vector<Vec> feats(n);
    for (int i = 0; i < n; ++i) feats[i] = log0(view.point(i)).coords;
    // The lift w = (-b, u) negates the Euclidean score near the origin
    // (w * exp0(v) ~ -(u'v + b)), so the hinge is fit on flipped labels.
    for (int e = 0; e < epochs; ++e) {
        Vec gu = u;
        double gb = 0.0;
        for (int i = 0; i < n; ++i) {
            const double yi = -static_cast<double>(view.y[i]);
            if (yi * (u.dot(feats[i]) + b) < 1.0) {
                gu -= C * yi * feats[i];
                gb -= C * yi;
            }
        }
        u -= lr * gu;
        b -= lr * gb;
    }
    Vec w(d + 1);
    w[0] = -b;
    w.tail(d) = u;
    return Separator{w};
}

Vec grad_objective(const Separator& w, const BinaryView& view, double C) {
    Vec g = apply_g(w.w);
    for (int i = 0; i < view.size(); ++i) {
        const double z = score(w, view.point(i), view.y[i]);
        if (z < 1.0) {
            // d/dz max(0, arcsinh(1) - arcsinh(z)) = -1/sqrt(1+z^2), and
            // grad_w z = -y * Gx, so the penalty contributes +C y Gx / sqrt(1+z^2).
            const double lp = -1.0 / std::sqrt(1.0 + z * z);
            g -= C * lp * static_cast<double>(view.y[i]) * apply_g(view.point(i).coords);
        }
    }
    return g;
}

Separator project_feasible(const Separator& w) {
    const int d = static_cast<int>(w.w.size()) - 1;
    const double a = std::abs(w.w[0]);
    const double s = w.w.tail(d).norm();
    if (s >= a) return w;
    const double m = 0.5 * (a + s);
    Vec out(d + 1);
    out[0] = (w.w[0] >= 0.0 ? m : -m);
    if (s > 0.0) {
        out.tail(d) = w.w.tail(d) * (m / s);
    } else {
        out.tail(d).setZero();
        out[1] = m;  // direction is arbitrary on the axis; pick e1
    }
    return Separator{out};
}

PgdResult pgd_train(const BinaryView& view, double C, const PgdConfig& cfg) {
    HsvmConfig ocfg;
    ocfg.C = C;
    ocfg.penalty = PenaltyMode::Exact;

    Separator w = project_feasible(euclidean_warmstart(view, C, cfg.warm_lr,
                                                       cfg.warm_epochs));
    Separator best = w;
    double best_obj = objective(w, view, ocfg).total;
    for (int e = 0; e < cfg.epochs; ++e) {
        Vec g = grad_objective(w, view, C);
        w = project_feasible(Separator{w.w - cfg.lr * g});
        const double obj = objective(w, view, ocfg).total;
        if (obj < best_obj) {
            best_obj = obj;
            best = w;
        }
    }
    return {best, best_obj, cfg.epochs};
}

}  // namespace hsvm
