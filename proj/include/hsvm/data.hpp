#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsvm/manifold.hpp"

namespace hsvm {

struct Dataset {
    std::vector<LorentzPoint> points;
    std::vector<int> labels;  // class ids >= 0
    int d = 0;                // intrinsic dimension

    int size() const { return static_cast<int>(points.size()); }
    int num_classes() const;
};

// Binary view of a dataset: y in {+1, -1} over a subset of sample indices.
struct BinaryView {
    const Dataset* base = nullptr;
    std::vector<int> indices;  // into base
    std::vector<int> y;        // +1 / -1, parallel to indices

    int size() const { return static_cast<int>(indices.size()); }
    const LorentzPoint& point(int i) const { return base->points[indices[i]]; }
    bool has_both_signs() const;
};

// One-vs-rest view: +1 for target_class, -1 otherwise.
BinaryView ovr_view(const Dataset& ds, int target_class,
                    const std::vector<int>& subset);

// One-vs-one view over the samples of the two classes; +1 for class_pos.
BinaryView ovo_view(const Dataset& ds, int class_pos, int class_neg,
                    const std::vector<int>& subset);

struct FoldPlan {
    int k = 0;
    std::vector<int> assignments;  // per-sample fold index
    std::uint64_t seed = 0;

    std::vector<int> train_indices(int fold) const;
    std::vector<int> test_indices(int fold) const;
};

// Synthetic Gaussian mixture lifted onto the manifold via exp0. Class centers
// are standard normal in R^d; samples are isotropic normal(center, s^2 I).
// Per-class substreams keep class k reproducible independent of K.
Dataset gen_gaussian(int num_classes, double scale, int n_per_class, int d,
                     std::uint64_t seed);

// CSV schema: label,x0,x1,...,xd ; header row optional.
Dataset load_csv(const std::string& path, bool renormalize = false);
void save_csv(const Dataset& ds, const std::string& path);

// Stratified k-fold assignment; remainder samples go to the lowest-index
// folds first. Classes with fewer than k members fall back to plain
// shuffling (with a warning on stderr).
FoldPlan stratified_kfold(const std::vector<int>& labels, int k,
                          std::uint64_t seed);

}  // namespace hsvm
