#pragma once

#include "hsvm/data.hpp"
#include "hsvm/manifold.hpp"

namespace hsvm {

enum class PenaltyMode { Exact, Taylor1, Taylor3 };

struct HsvmConfig {
    double C = 1.0;
    PenaltyMode penalty = PenaltyMode::Taylor1;
    double feasibility_tol = 1e-8;
};

struct ObjectiveReport {
    double margin_term = 0.0;   // 1/2 w'Gw
    double penalty_term = 0.0;  // C * sum(slack) or C * sum l(z)
    double total = 0.0;
    Vec slacks;  // empty in exact mode
};

// y * (w * x) = -(y Gx)' w.
double score(const Separator& w, const LorentzPoint& x, int y);

// Distance-scaled hinge l(z) = max(0, arcsinh(1) - arcsinh(z)).
double hinge_arcsinh(double z);

// g(xi) = (1-sqrt2)/2 e^xi + (1+sqrt2)/2 e^-xi; the exact margin requirement
// -(y Gx)'w >= g(xi).
double g_penalty(double xi);

// Smallest xi >= 0 satisfying the order-1 or order-3 Taylor constraint at the
// given score; order 3 uses safeguarded bisection with a cap of 100.
double min_slack(const Separator& w, const LorentzPoint& x, int y, int order);
double min_slack_from_score(double sc, int order);

ObjectiveReport objective(const Separator& w, const BinaryView& view,
                          const HsvmConfig& cfg);

// Relative suboptimality gap eta = |f - p| / (1 + |p| + |f|).
double subopt_gap(double f_hat, double p_star);

// w'Gw >= -tol.
bool is_feasible(const Separator& w, double tol = 1e-8);

}  // namespace hsvm
