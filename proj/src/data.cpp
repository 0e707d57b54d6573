#include "hsvm/data.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hsvm/rng.hpp"

namespace hsvm {

int Dataset::num_classes() const {
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    return k;
}

bool BinaryView::has_both_signs() const {
    bool pos = false, neg = false;
    for (int v : y) (v > 0 ? pos : neg) = true;
    return pos && neg;
}

BinaryView ovr_view(const Dataset& ds, int target_class,
                    const std::vector<int>& subset) {
    BinaryView view;
    view.base = &ds;
    view.indices = subset;
    view.y.reserve(subset.size());
    for (int idx : subset) {
        view.y.push_back(ds.labels[idx] == target_class ? 1 : -1);
    }
    return view;
}

BinaryView ovo_view(const Dataset& ds, int class_pos, int class_neg,
                    const std::vector<int>& subset) {
    BinaryView view;
    view.base = &ds;
    for (int idx : subset) {
        if (ds.labels[idx] == class_pos) {
            view.indices.push_back(idx);
            view.y.push_back(1);
        } else if (ds.labels[idx] == class_neg) {
            view.indices.push_back(idx);
            view.y.push_back(-1);
        }
    }
    return view;
}

std::vector<int> FoldPlan::train_indices(int fold) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(assignments.size()); ++i) {
        if (assignments[i] != fold) out.push_back(i);
    }
    return out;
}

std::vector<int> FoldPlan::test_indices(int fold) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(assignments.size()); ++i) {
        if (assignments[i] == fold) out.push_back(i);
    }
    return out;
}

Dataset gen_gaussian(int num_classes, double scale, int n_per_class, int d,
                     std::uint64_t seed) {
    if (num_classes < 2) throw std::invalid_argument("gen_gaussian: K >= 2 required");
    if (scale <= 0.0) throw std::invalid_argument("gen_gaussian: scale > 0 required");
    if (n_per_class < 1) throw std::invalid_argument("gen_gaussian: n_per_class >= 1 required");

    Dataset ds;
    ds.d = d;
    for (int k = 0; k < num_classes; ++k) {
        NormalSampler rng(substream(seed, static_cast<std::uint64_t>(k) + 1));
        Vec center(d);
        for (int j = 0; j < d; ++j) center[j] = rng();
        for (int i = 0; i < n_per_class; ++i) {
            Vec v(d);
            for (int j = 0; j < d; ++j) v[j] = center[j] + scale * rng();
            ds.points.push_back(exp0(TangentVector{v}));
            ds.labels.push_back(k);
        }
    }
    return ds;
}

Dataset load_csv(const std::string& path, bool renormalize) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);
    Dataset ds;
    std::string line;
    int row = 0;
    int width = -1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 3) {
            throw std::runtime_error("load_csv: row " + std::to_string(row) +
                                     ": need label plus >= 2 coordinates");
        }
        // skip an optional header row
        if (row == 1) {
            try {
                (void)std::stod(fields[1]);
            } catch (const std::exception&) {
                continue;
            }
        }
        std::vector<double> vals;
        try {
            for (const auto& f : fields) vals.push_back(std::stod(f));
        } catch (const std::exception&) {
            throw std::runtime_error("load_csv: row " + std::to_string(row) +
                                     ": non-numeric field");
        }
        if (width == -1) width = static_cast<int>(vals.size());
        if (static_cast<int>(vals.size()) != width) {
            throw std::runtime_error("load_csv: row " + std::to_string(row) +
                                     ": inconsistent column count");
        }
        int label = static_cast<int>(std::lround(vals[0]));
        if (label < 0) {
            throw std::runtime_error("load_csv: row " + std::to_string(row) +
                                     ": negative class id");
        }
        Vec x(width - 1);
        for (int j = 1; j < width; ++j) x[j - 1] = vals[j];
        try {
            ds.points.push_back(make_point(x, renormalize));
        } catch (const std::domain_error& e) {
            throw std::runtime_error("load_csv: row " + std::to_string(row) + ": " +
                                     e.what());
        }
        ds.labels.push_back(label);
    }
    if (ds.points.empty()) throw std::runtime_error("load_csv: empty dataset in " + path);
    ds.d = ds.points.front().dim();
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot write " + path);
    char buf[64];
    for (int i = 0; i < ds.size(); ++i) {
        out << ds.labels[i];
        for (int j = 0; j <= ds.d; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.points[i].coords[j]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

FoldPlan stratified_kfold(const std::vector<int>& labels, int k,
                          std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_kfold: k >= 2 required");
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(labels.size(), -1);

    int num_classes = 0;
    for (int l : labels) num_classes = std::max(num_classes, l + 1);

    for (int cls = 0; cls < num_classes; ++cls) {
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
            if (labels[i] == cls) idx.push_back(i);
        }
        if (idx.empty()) continue;
        std::mt19937_64 rng(substream(seed, 101 + static_cast<std::uint64_t>(cls)));
        std::shuffle(idx.begin(), idx.end(), rng);
        if (static_cast<int>(idx.size()) < k) {
            std::cerr << "stratified_kfold: class " << cls << " has only "
                      << idx.size() << " samples (< k), plain shuffling\n";
        }
        // base+1 samples to the lowest-index folds, base to the rest
        const int base = static_cast<int>(idx.size()) / k;
        const int rem = static_cast<int>(idx.size()) % k;
        int pos = 0;
        for (int f = 0; f < k; ++f) {
            const int take = base + (f < rem ? 1 : 0);
            for (int t = 0; t < take; ++t) plan.assignments[idx[pos++]] = f;
        }
    }
    return plan;
}

}  // namespace hsvm
