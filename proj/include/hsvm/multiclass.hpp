#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hsvm/data.hpp"
#include "hsvm/problem.hpp"

namespace hsvm {

// Logistic calibration P(y=+1 | s) = 1 / (1 + exp(A s + B)).
struct PlattModel {
    double A = 0.0;
    double B = 0.0;
    double prob(double s) const;
};

// Newton fit (<= 100 iterations, tol 1e-10, backtracking line search) with
// smoothed targets t+ = (N+ + 1)/(N+ + 2), t- = 1/(N- + 2).
PlattModel platt_fit(const std::vector<double>& scores, const std::vector<int>& labels);

struct MulticlassModel {
    std::string scheme;  // "ovr" | "ovo"
    std::vector<int> class_ids;
    std::vector<Separator> models;             // ovr: per class; ovo: per pair
    std::vector<PlattModel> platt;             // ovr only
    std::vector<std::pair<int, int>> pairs;    // ovo: (pos_class, neg_class)
};

// Callback training one binary separator; lets the orchestrator choose the
// method (pgd / sdp / moment) without this module knowing about solvers.
using BinaryTrainer = std::function<Separator(const BinaryView&)>;

MulticlassModel ovr_train(const Dataset& ds, const std::vector<int>& subset,
                          const BinaryTrainer& train);
MulticlassModel ovo_train(const Dataset& ds, const std::vector<int>& subset,
                          const BinaryTrainer& train);

// Argmax of per-class probability; ties to the lowest class id.
std::vector<int> ovr_predict(const MulticlassModel& m, const Dataset& ds,
                             const std::vector<int>& subset);
// Majority vote; ties by summed |score| margin, then lowest class id.
std::vector<int> ovo_predict(const MulticlassModel& m, const Dataset& ds,
                             const std::vector<int>& subset);

// Per-class probabilities (ovr scheme), row per sample, column per class id.
std::vector<std::vector<double>> ovr_probabilities(const MulticlassModel& m,
                                                   const Dataset& ds,
                                                   const std::vector<int>& subset);

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

// Support-weighted mean of per-class F1; classes absent from the truth
// vector get zero weight.
double weighted_f1(const std::vector<int>& pred, const std::vector<int>& truth);

}  // namespace hsvm
