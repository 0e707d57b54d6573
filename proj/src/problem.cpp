#include "hsvm/problem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hsvm {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

double score(const Separator& w, const LorentzPoint& x, int y) {
    return static_cast<double>(y) * minkowski(w.w, x.coords);
}

double hinge_arcsinh(double z) {
    if (!std::isfinite(z)) throw std::domain_error("hinge_arcsinh: non-finite input");
    return std::max(0.0, std::asinh(1.0) - std::asinh(z));
}

double g_penalty(double xi) {
    return 0.5 * (1.0 - kSqrt2) * std::exp(xi) + 0.5 * (1.0 + kSqrt2) * std::exp(-xi);
}

double min_slack_from_score(double sc, int order) {
    // The constraint reads -(y Gx)'w >= taylor(xi); the left side equals sc.
    if (order == 1) {
        // sc >= 1 - sqrt2 xi
        return std::max(0.0, (1.0 - sc) / kSqrt2);
    }
    if (order == 3) {
        auto taylor3 = [](double xi) {
            return 1.0 - kSqrt2 * xi + 0.5 * xi * xi - kSqrt2 * xi * xi * xi / 6.0;
        };
        if (sc >= taylor3(0.0)) return 0.0;
        // taylor3 is decreasing on xi >= 0; bracket then bisect
        double lo = 0.0, hi = 1.0;
        const double cap = 100.0;
        while (taylor3(hi) > sc) {
            hi *= 2.0;
            if (hi > cap) return std::numeric_limits<double>::infinity();
        }
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (taylor3(mid) > sc) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return hi;
    }
    throw std::invalid_argument("min_slack: order must be 1 or 3");
}

double min_slack(const Separator& w, const LorentzPoint& x, int y, int order) {
    return min_slack_from_score(score(w, x, y), order);
}

ObjectiveReport objective(const Separator& w, const BinaryView& view,
                          const HsvmConfig& cfg) {
    if (!w.w.allFinite()) throw std::domain_error("objective: non-finite w");
    ObjectiveReport rep;
    rep.margin_term = 0.5 * g_quadratic(w.w);
    if (cfg.penalty == PenaltyMode::Exact) {
        double acc = 0.0;
        for (int i = 0; i < view.size(); ++i) {
            acc += hinge_arcsinh(score(w, view.point(i), view.y[i]));
        }
        rep.penalty_term = cfg.C * acc;
    } else {
        const int order = cfg.penalty == PenaltyMode::Taylor1 ? 1 : 3;
        rep.slacks.resize(view.size());
        double acc = 0.0;
        for (int i = 0; i < view.size(); ++i) {
            rep.slacks[i] = min_slack(w, view.point(i), view.y[i], order);
            acc += rep.slacks[i];
        }
        rep.penalty_term = cfg.C * acc;
    }
    rep.total = rep.margin_term + rep.penalty_term;
    return rep;
}

double subopt_gap(double f_hat, double p_star) {
    if (!std::isfinite(f_hat) || !std::isfinite(p_star)) {
        throw std::domain_error("subopt_gap: non-finite inputs");
    }
    return std::abs(f_hat - p_star) / (1.0 + std::abs(p_star) + std::abs(f_hat));
}

bool is_feasible(const Separator& w, double tol) {
    return g_quadratic(w.w) >= -tol;
}

}  // namespace hsvm
