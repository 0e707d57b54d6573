#include "hsvm/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "hsvm/pgd.hpp"
#include "hsvm/relax.hpp"

namespace hsvm {

std::string method_name(Method m) {
    switch (m) {
        case Method::Pgd: return "pgd";
        case Method::Sdp: return "sdp";
        case Method::Moment: return "moment";
    }
    return "?";
}

std::optional<Method> parse_method(const std::string& s) {
    if (s == "pgd") return Method::Pgd;
    if (s == "sdp") return Method::Sdp;
    if (s == "moment") return Method::Moment;
    return std::nullopt;
}

namespace {

// Side channel for per-subproblem relaxation diagnostics gathered inside the
// BinaryTrainer closure.
struct SubproblemStats {
    int count = 0;
    double p_star_sum = 0.0;
    double f_hat_sum = 0.0;
    double taylor1_sum = 0.0;
    bool all_flat = true;
    std::string sources;

    void add_source(const std::string& s) {
        if (!sources.empty()) sources += ';';
        sources += s;
    }
};

Separator train_one(Method method, const BinaryView& view, double C, int kappa,
                    const SolverOptions& sopt, SubproblemStats& stats) {
    HsvmConfig t1;
    t1.C = C;
    t1.penalty = PenaltyMode::Taylor1;
    if (method == Method::Pgd) {
        PgdResult r = pgd_train(view, C);
        stats.count++;
        stats.taylor1_sum += objective(r.w, view, t1).total;
        return r.w;
    }
    Separator winner;
    if (method == Method::Sdp) {
        ConicProblem prob = assemble_sdp(view, C);
        ConicSolution sol = solve_ipm(prob, sopt);
        if (sol.status == SolveStatus::PrimalInfeasibleCert ||
            sol.status == SolveStatus::DualInfeasibleCert) {
            throw std::runtime_error("sdp: solver returned infeasibility certificate");
        }
        Extraction ex = extract_sdp(sol, view, C);
        winner = ex.winner;
        stats.p_star_sum += p_star(sol);
        stats.add_source(ex.candidates[ex.winner_index].source);
        stats.f_hat_sum += ex.candidates[ex.winner_index].f_hat;
    } else {
        auto [prob, plan] = assemble_sparse_moment(view, C, kappa);
        ConicSolution sol = solve_ipm(prob, sopt);
        if (sol.status == SolveStatus::PrimalInfeasibleCert ||
            sol.status == SolveStatus::DualInfeasibleCert) {
            throw std::runtime_error("moment: solver returned infeasibility certificate");
        }
        Extraction ex = extract_moment(sol, plan, view, C);
        winner = ex.winner;
        stats.p_star_sum += p_star(sol);
        stats.add_source(ex.candidates[ex.winner_index].source);
        stats.f_hat_sum += ex.candidates[ex.winner_index].f_hat;
        FlatExtension fe = flat_extension_check(plan.moment_matrix(sol.x, 0),
                                                plan.kappa, plan.d + 2);
        stats.all_flat = stats.all_flat && fe.flat;
    }
    stats.count++;
    stats.taylor1_sum += objective(winner, view, t1).total;
    return winner;
}

FoldRecord run_task(const Dataset& ds, const TrainOptions& opt, Method method,
                    double C, int fold, const FoldPlan& plan) {
    FoldRecord rec;
    rec.method = method_name(method);
    rec.C = C;
    rec.fold = fold;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        SolverOptions sopt;
        sopt.eps = opt.solver_eps;
        sopt.max_iters = opt.solver_max_iters;
        SubproblemStats stats;
        BinaryTrainer trainer = [&](const BinaryView& view) {
            return train_one(method, view, C, opt.kappa, sopt, stats);
        };
        const std::vector<int> train_idx = plan.train_indices(fold);
        const std::vector<int> test_idx = plan.test_indices(fold);
        MulticlassModel model = opt.scheme == "ovo" ? ovo_train(ds, train_idx, trainer)
                                                    : ovr_train(ds, train_idx, trainer);
        auto eval = [&](const std::vector<int>& idx, double& acc, double& f1) {
            std::vector<int> pred = opt.scheme == "ovo" ? ovo_predict(model, ds, idx)
                                                        : ovr_predict(model, ds, idx);
            std::vector<int> truth;
            for (int i : idx) truth.push_back(ds.labels[i]);
            acc = accuracy(pred, truth);
            f1 = weighted_f1(pred, truth);
        };
        eval(train_idx, rec.train_accuracy, rec.train_f1);
        eval(test_idx, rec.test_accuracy, rec.test_f1);
        rec.taylor1_loss = stats.taylor1_sum / std::max(stats.count, 1);
        if (method != Method::Pgd) {
            rec.p_star = stats.p_star_sum / std::max(stats.count, 1);
            rec.f_hat = stats.f_hat_sum / std::max(stats.count, 1);
            rec.eta = subopt_gap(*rec.f_hat, *rec.p_star);
            rec.extraction_source = stats.sources;
            if (method == Method::Moment) rec.flat = stats.all_flat;
        }
    } catch (const std::exception& e) {
        rec.status = std::string("error: ") + e.what();
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

}  // namespace

TrainReport run_training(const Dataset& ds, const TrainOptions& opt,
                         bool fit_full_model) {
    if (opt.folds < 2) throw std::invalid_argument("run_training: folds >= 2 required");
    if (opt.scheme != "ovr" && opt.scheme != "ovo") {
        throw std::invalid_argument("run_training: scheme must be ovr or ovo");
    }
    TrainReport report;
    report.options = opt;
    FoldPlan plan = stratified_kfold(ds.labels, opt.folds, opt.seed);

    struct Task {
        Method method;
        double C;
        int fold;
    };
    std::vector<Task> tasks;
    for (Method m : opt.methods) {
        for (double C : opt.Cs) {
            for (int f = 0; f < opt.folds; ++f) tasks.push_back({m, C, f});
        }
    }
    report.records.resize(tasks.size());
    if (opt.jobs <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            report.records[i] =
                run_task(ds, opt, tasks[i].method, tasks[i].C, tasks[i].fold, plan);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < tasks.size();
                 i = next.fetch_add(1)) {
                report.records[i] =
                    run_task(ds, opt, tasks[i].method, tasks[i].C, tasks[i].fold, plan);
            }
        };
        std::vector<std::thread> pool;
        const int nw = std::min<int>(opt.jobs, static_cast<int>(tasks.size()));
        for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& r : report.records) {
        if (r.status != "ok") report.warning_count++;
    }

    if (fit_full_model) {
        SolverOptions sopt;
        sopt.eps = opt.solver_eps;
        sopt.max_iters = opt.solver_max_iters;
        SubproblemStats stats;
        BinaryTrainer trainer = [&](const BinaryView& view) {
            return train_one(opt.methods.front(), view, opt.Cs.front(), opt.kappa,
                             sopt, stats);
        };
        std::vector<int> all(ds.size());
        for (int i = 0; i < ds.size(); ++i) all[i] = i;
        report.full_model = opt.scheme == "ovo" ? ovo_train(ds, all, trainer)
                                                : ovr_train(ds, all, trainer);
    }
    return report;
}

nlohmann::json report_to_json(const TrainReport& report) {
    nlohmann::json j;
    j["schema_version"] = {{"major", kSchemaMajor}, {"minor", kSchemaMinor}};
    nlohmann::json cfg;
    cfg["data"] = report.options.data_name;
    std::vector<std::string> methods;
    for (Method m : report.options.methods) methods.push_back(method_name(m));
    cfg["methods"] = methods;
    cfg["scheme"] = report.options.scheme;
    cfg["C"] = report.options.Cs;
    cfg["kappa"] = report.options.kappa;
    cfg["folds"] = report.options.folds;
    cfg["seed"] = report.options.seed;
    cfg["solver_eps"] = report.options.solver_eps;
    cfg["jobs"] = report.options.jobs;
    cfg["f1_variant"] = "weighted";
    j["config"] = cfg;
    j["warning_count"] = report.warning_count;
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : report.records) {
        nlohmann::json e;
        e["method"] = r.method;
        e["C"] = r.C;
        e["fold"] = r.fold;
        e["status"] = r.status;
        e["train_accuracy"] = r.train_accuracy;
        e["test_accuracy"] = r.test_accuracy;
        e["train_f1"] = r.train_f1;
        e["test_f1"] = r.test_f1;
        e["taylor1_loss"] = r.taylor1_loss;
        e["p_star"] = r.p_star ? nlohmann::json(*r.p_star) : nlohmann::json();
        e["f_hat"] = r.f_hat ? nlohmann::json(*r.f_hat) : nlohmann::json();
        e["eta"] = r.eta ? nlohmann::json(*r.eta) : nlohmann::json();
        e["wall_seconds"] = r.wall_seconds;
        e["extraction_source"] = r.extraction_source;
        e["flat"] = r.flat ? nlohmann::json(*r.flat) : nlohmann::json();
        recs.push_back(e);
    }
    j["records"] = recs;
    return j;
}

nlohmann::json model_to_json(const MulticlassModel& model, int d) {
    nlohmann::json j;
    j["schema_version"] = {{"major", kSchemaMajor}, {"minor", kSchemaMinor}};
    j["scheme"] = model.scheme;
    j["d"] = d;
    j["class_ids"] = model.class_ids;
    nlohmann::json seps = nlohmann::json::array();
    for (const auto& m : model.models) {
        std::vector<double> w(m.w.data(), m.w.data() + m.w.size());
        seps.push_back(w);
    }
    j["separators"] = seps;
    nlohmann::json platt = nlohmann::json::array();
    for (const auto& p : model.platt) platt.push_back({{"A", p.A}, {"B", p.B}});
    j["platt"] = platt;
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [a, b] : model.pairs) pairs.push_back({a, b});
    j["pairs"] = pairs;
    return j;
}

MulticlassModel model_from_json(const nlohmann::json& j) {
    if (!j.contains("schema_version") ||
        j["schema_version"].value("major", -1) != kSchemaMajor) {
        throw std::runtime_error("model_from_json: unsupported schema version");
    }
    MulticlassModel m;
    m.scheme = j.at("scheme").get<std::string>();
    m.class_ids = j.at("class_ids").get<std::vector<int>>();
    for (const auto& arr : j.at("separators")) {
        std::vector<double> w = arr.get<std::vector<double>>();
        m.models.push_back(Separator{Eigen::Map<Vec>(w.data(), w.size())});
    }
    for (const auto& p : j.at("platt")) {
        m.platt.push_back({p.at("A").get<double>(), p.at("B").get<double>()});
    }
    for (const auto& pr : j.at("pairs")) {
        m.pairs.emplace_back(pr[0].get<int>(), pr[1].get<int>());
    }
    return m;
}

}  // namespace hsvm
