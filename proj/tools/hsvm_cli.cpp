#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "hsvm/data.hpp"
#include "hsvm/manifold.hpp"
#include "hsvm/trainer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

int cmd_gen(int classes, double scale, int per_class, int dim,
            std::uint64_t seed, const std::string& out) {
    try {
        hsvm::Dataset ds = hsvm::gen_gaussian(classes, scale, per_class, dim, seed);
        hsvm::save_csv(ds, out);
    } catch (const std::exception& e) {
        std::cerr << "gen: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

struct TrainArgs {
    std::string data;
    std::string methods = "pgd";
    std::string scheme = "ovr";
    std::string c_list = "10";
    int kappa = 2;
    int folds = 5;
    std::uint64_t seed = 0;
    double eps = 1e-7;
    int max_iters = 100000;
    int jobs = 1;
    std::string out;
    std::string save_model;
};

int cmd_train(const TrainArgs& args) {
    hsvm::TrainOptions opt;
    opt.scheme = args.scheme;
    opt.kappa = args.kappa;
    opt.folds = args.folds;
    opt.seed = args.seed;
    opt.solver_eps = args.eps;
    opt.solver_max_iters = args.max_iters;
    opt.jobs = args.jobs;
    opt.data_name = args.data;
    if (const char* env = std::getenv("HSVM_SOLVER_EPS")) {
        opt.solver_eps = std::atof(env);
        if (opt.solver_eps <= 0.0) {
            std::cerr << "train: invalid HSVM_SOLVER_EPS\n";
            return kExitUsage;
        }
    }
    opt.methods.clear();
    for (const std::string& m : split_csv_list(args.methods)) {
        auto parsed = hsvm::parse_method(m);
        if (!parsed) {
            std::cerr << "train: unknown method '" << m << "' (field --method)\n";
            return kExitUsage;
        }
        opt.methods.push_back(*parsed);
    }
    opt.Cs.clear();
    for (const std::string& c : split_csv_list(args.c_list)) {
        char* end = nullptr;
        const double v = std::strtod(c.c_str(), &end);
        if (end == c.c_str() || *end != '\0' || v <= 0.0) {
            std::cerr << "train: invalid C value '" << c << "' (field --C)\n";
            return kExitUsage;
        }
        opt.Cs.push_back(v);
    }
    if (opt.methods.empty() || opt.Cs.empty()) {
        std::cerr << "train: --method and --C must be non-empty\n";
        return kExitUsage;
    }
    if (opt.scheme != "ovr" && opt.scheme != "ovo") {
        std::cerr << "train: scheme must be ovr or ovo (field --scheme)\n";
        return kExitUsage;
    }
    if (opt.folds < 2) {
        std::cerr << "train: folds >= 2 required (field --folds)\n";
        return kExitUsage;
    }

    hsvm::Dataset ds;
    try {
        ds = hsvm::load_csv(args.data);
    } catch (const std::exception& e) {
        std::cerr << "train: " << e.what() << "\n";
        return kExitData;
    }
    try {
        hsvm::TrainReport report =
            hsvm::run_training(ds, opt, !args.save_model.empty());
        nlohmann::json j = hsvm::report_to_json(report);
        std::ofstream f(args.out);
        if (!f) {
            std::cerr << "train: cannot write " << args.out << "\n";
            return kExitData;
        }
        f << j.dump(2) << "\n";
        if (!args.save_model.empty() && report.full_model) {
            std::ofstream mf(args.save_model);
            mf << hsvm::model_to_json(*report.full_model, ds.d).dump(2) << "\n";
        }
        if (report.warning_count > 0) {
            std::cerr << "train: " << report.warning_count
                      << " fold record(s) carry a non-ok status\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "train: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}

int cmd_boundary(const std::string& model_path, const std::string& data_path,
                 const std::string& out) {
    hsvm::MulticlassModel model;
    hsvm::Dataset ds;
    try {
        std::ifstream mf(model_path);
        if (!mf) throw std::runtime_error("cannot read " + model_path);
        nlohmann::json j;
        mf >> j;
        if (j.value("d", -1) != 2) {
            throw std::runtime_error("boundary export requires a d = 2 model");
        }
        model = hsvm::model_from_json(j);
        if (!data_path.empty()) {
            ds = hsvm::load_csv(data_path);
            if (ds.d != 2) throw std::runtime_error("boundary export requires d = 2 data");
        }
    } catch (const std::exception& e) {
        std::cerr << "boundary: " << e.what() << "\n";
        return kExitData;
    }
    try {
        std::ofstream f(out);
        if (!f) {
            std::cerr << "boundary: cannot write " << out << "\n";
            return kExitData;
        }
        f.precision(17);
        f << "kind,id,geom,a,b,c\n";
        for (std::size_t i = 0; i < model.models.size(); ++i) {
            const auto geom = hsvm::boundary_to_poincare(model.models[i]);
            if (std::holds_alternative<hsvm::PoincareCircle>(geom)) {
                const auto& c = std::get<hsvm::PoincareCircle>(geom);
                f << "boundary," << i << ",circle," << c.center[0] << ","
                  << c.center[1] << "," << c.radius << "\n";
            } else {
                const auto& l = std::get<hsvm::PoincareLine>(geom);
                f << "boundary," << i << ",line," << l.normal[0] << ","
                  << l.normal[1] << ",\n";
            }
        }
        for (int i = 0; i < ds.size(); ++i) {
            const hsvm::Vec p = hsvm::stereographic(ds.points[i]);
            f << "point," << ds.labels[i] << ",," << p[0] << "," << p[1] << ",\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "boundary: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}

struct Cell {
    std::vector<double> acc, f1, eta;
};

int cmd_compare(const std::vector<std::string>& inputs, const std::string& out_csv) {
    // key: (dataset, method, C)
    std::map<std::tuple<std::string, std::string, double>, Cell> table;
    for (const std::string& path : inputs) {
        nlohmann::json j;
        try {
            std::ifstream f(path);
            if (!f) throw std::runtime_error("cannot read file");
            f >> j;
            if (!j.contains("schema_version") ||
                j["schema_version"].value("major", -1) != hsvm::kSchemaMajor) {
                throw std::runtime_error("unsupported schema version");
            }
        } catch (const std::exception& e) {
            std::cerr << "compare: " << path << ": " << e.what() << "\n";
            return kExitData;
        }
        const std::string data = j["config"].value("data", "?");
        for (const auto& r : j["records"]) {
            if (r.value("status", "") != "ok") continue;
            Cell& cell = table[{data, r.value("method", "?"), r.value("C", 0.0)}];
            cell.acc.push_back(r.value("test_accuracy", 0.0));
            cell.f1.push_back(r.value("test_f1", 0.0));
            if (!r["eta"].is_null()) cell.eta.push_back(r["eta"].get<double>());
        }
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / v.size();
    };
    auto stdev = [&](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        const double m = mean(v);
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s / (v.size() - 1));
    };
    // best = highest mean test accuracy within each dataset
    std::map<std::string, std::tuple<std::string, double, double>> best;
    for (const auto& [key, cell] : table) {
        const auto& [data, method, C] = key;
        const double m = mean(cell.acc);
        auto it = best.find(data);
        if (it == best.end() || m > std::get<2>(it->second)) {
            best[data] = {method, C, m};
        }
    }
    std::ostringstream csv;
    csv.precision(6);
    csv << "dataset,method,C,folds,acc_mean,acc_std,f1_mean,f1_std,eta_mean,best\n";
    std::cout << "dataset  method  C  acc(mean+-std)  f1(mean+-std)  eta(mean)  best\n";
    for (const auto& [key, cell] : table) {
        const auto& [data, method, C] = key;
        const bool is_best = std::get<0>(best[data]) == method &&
                             std::get<1>(best[data]) == C && table.size() > 1;
        csv << data << "," << method << "," << C << "," << cell.acc.size() << ","
            << mean(cell.acc) << "," << stdev(cell.acc) << "," << mean(cell.f1)
            << "," << stdev(cell.f1) << ",";
        if (!cell.eta.empty()) csv << mean(cell.eta);
        csv << "," << (is_best ? "*" : "") << "\n";
        std::cout << data << "  " << method << "  " << C << "  " << mean(cell.acc)
                  << "+-" << stdev(cell.acc) << "  " << mean(cell.f1) << "+-"
                  << stdev(cell.f1) << "  ";
        if (cell.eta.empty()) {
            std::cout << "-";
        } else {
            std::cout << mean(cell.eta);
        }
        std::cout << (is_best ? "  *" : "") << "\n";
    }
    if (!out_csv.empty()) {
        std::ofstream f(out_csv);
        if (!f) {
            std::cerr << "compare: cannot write " << out_csv << "\n";
            return kExitData;
        }
        f << csv.str();
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Large-margin classifiers on the Lorentz model of hyperbolic space"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "Generate a synthetic Gaussian dataset CSV");
    int classes = 2, per_class = 100, dim = 2;
    double scale = 1.0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--classes", classes, "Number of classes")->check(CLI::PositiveNumber);
    gen->add_option("--scale", scale, "Within-class standard deviation");
    gen->add_option("--per-class", per_class, "Samples per class")->check(CLI::PositiveNumber);
    gen->add_option("--dim", dim, "Intrinsic dimension d")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out", gen_out, "Output CSV path")->required();

    auto* train = app.add_subcommand("train", "Cross-validated training and evaluation");
    TrainArgs targs;
    train->add_option("--data", targs.data, "Input CSV path")->required();
    train->add_option("--method", targs.methods, "Comma list of pgd,sdp,moment");
    train->add_option("--scheme", targs.scheme, "ovr or ovo");
    train->add_option("--C", targs.c_list, "Comma list of penalty weights");
    train->add_option("--kappa", targs.kappa, "Moment relaxation order")
        ->check(CLI::Range(2, 4));
    train->add_option("--folds", targs.folds, "Number of folds");
    train->add_option("--seed", targs.seed, "RNG seed");
    train->add_option("--eps", targs.eps, "Conic solver tolerance");
    train->add_option("--max-iters", targs.max_iters, "Conic solver iteration cap");
    train->add_option("--jobs", targs.jobs, "Worker pool size")->check(CLI::PositiveNumber);
    train->add_option("--out", targs.out, "Metrics JSON path")->required();
    train->add_option("--save-model", targs.save_model,
                      "Also fit one model on all data and save it as JSON");

    auto* boundary = app.add_subcommand(
        "boundary", "Export Poincare-disk boundary geometry for a d=2 model");
    std::string b_model, b_data, b_out;
    boundary->add_option("--model", b_model, "Model JSON from train --save-model")
        ->required();
    boundary->add_option("--data", b_data, "Optional CSV of points to project");
    boundary->add_option("--out", b_out, "Output CSV path")->required();

    auto* compare = app.add_subcommand("compare", "Summarize one or more metrics JSONs");
    std::vector<std::string> c_inputs;
    std::string c_out;
    compare->add_option("--in", c_inputs, "Metrics JSON file(s)")->required();
    compare->add_option("--out", c_out, "Summary CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (gen->parsed()) return cmd_gen(classes, scale, per_class, dim, gen_seed, gen_out);
    if (train->parsed()) return cmd_train(targs);
    if (boundary->parsed()) return cmd_boundary(b_model, b_data, b_out);
    return cmd_compare(c_inputs, c_out);
}
