#pragma once

#include <cstdint>

#include "hsvm/data.hpp"
#include "hsvm/problem.hpp"

namespace hsvm {

struct PgdConfig {
    double lr = 1e-3;
    int epochs = 2000;
    double warm_lr = 1e-2;
    int warm_epochs = 500;
};

struct PgdResult {
    Separator w;
    double objective = 0.0;  // exact-penalty objective of the returned iterate
    int epochs_run = 0;
};

// Euclidean hinge fit in the tangent space at the origin (log0 features),
// lifted back to an ambient separator.
Separator euclidean_warmstart(const BinaryView& view, double C,
                              double lr = 1e-2, int epochs = 500);

// Subgradient of the exact-penalty objective at w.
Vec grad_objective(const Separator& w, const BinaryView& view, double C);

// Euclidean projection onto the valid-separator cone {|w_1:| >= |w0|}.
Separator project_feasible(const Separator& w);

// Projected subgradient descent from the Euclidean warm start; returns the
// best iterate seen under the exact-penalty objective.
PgdResult pgd_train(const BinaryView& view, double C, const PgdConfig& cfg = {});

}  // namespace hsvm
