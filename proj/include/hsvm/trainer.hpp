#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsvm/data.hpp"
#include "hsvm/multiclass.hpp"

namespace hsvm {

inline constexpr int kSchemaMajor = 1;
inline constexpr int kSchemaMinor = 0;

enum class Method { Pgd, Sdp, Moment };

std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& s);

struct TrainOptions {
    std::vector<Method> methods = {Method::Pgd};
    std::string scheme = "ovr";  // "ovr" | "ovo"
    std::vector<double> Cs = {10.0};
    int kappa = 2;
    int folds = 5;
    std::uint64_t seed = 0;
    double solver_eps = 1e-7;
    int solver_max_iters = 100000;
    int jobs = 1;
    std::string data_name = "dataset";
};

// One (method, C, fold) evaluation. For multi-model schemes the relaxation
// quantities are means over the binary subproblems; eta is recomputed from
// the stored means so the gap identity holds exactly.
struct FoldRecord {
    std::string method;
    double C = 0.0;
    int fold = 0;
    std::string status = "ok";
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double train_f1 = 0.0;
    double test_f1 = 0.0;
    double taylor1_loss = 0.0;                 // mean first-order objective at the model
    std::optional<double> p_star;              // relaxations only
    std::optional<double> f_hat;
    std::optional<double> eta;
    double wall_seconds = 0.0;
    std::string extraction_source;             // ';'-joined across subproblems
    std::optional<bool> flat;                  // moment method only
};

struct TrainReport {
    TrainOptions options;
    std::vector<FoldRecord> records;
    int warning_count = 0;
    std::optional<MulticlassModel> full_model;  // trained on all data when requested
};

// Cross-validated training of every (method, C) combination.
TrainReport run_training(const Dataset& ds, const TrainOptions& opt,
                         bool fit_full_model = false);

nlohmann::json report_to_json(const TrainReport& report);
nlohmann::json model_to_json(const MulticlassModel& model, int d);
MulticlassModel model_from_json(const nlohmann::json& j);

}  // namespace hsvm
