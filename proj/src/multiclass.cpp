#include "hsvm/multiclass.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace hsvm {

double PlattModel::prob(double s) const {
    const double f = A * s + B;
    double p;
    if (f >= 0.0) {
        const double e = std::exp(-f);
        p = e / (1.0 + e);
    } else {
        p = 1.0 / (1.0 + std::exp(f));
    }
    // keep the output strictly inside (0, 1) even when exp underflows
    constexpr double floor = std::numeric_limits<double>::min();
    return std::min(1.0 - 1e-16, std::max(floor, p));
}

namespace {

// log(1 + e^f) without overflow
double softplus(double f) {
    return std::max(f, 0.0) + std::log1p(std::exp(-std::abs(f)));
}

}  // namespace

PlattModel platt_fit(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw std::invalid_argument("platt_fit: scores/labels size mismatch");
    }
    const int n = static_cast<int>(scores.size());
    int np = 0, nm = 0;
    for (int y : labels) (y > 0 ? np : nm)++;
    if (np == 0 || nm == 0) throw std::invalid_argument("platt_fit: both labels required");

    const double tp = (np + 1.0) / (np + 2.0);
    const double tm = 1.0 / (nm + 2.0);
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = labels[i] > 0 ? tp : tm;

    // negative log-likelihood of p_i = 1/(1+e^{A s_i + B}) against targets t_i
    auto nll = [&](double a, double b) {
        double L = 0.0;
        for (int i = 0; i < n; ++i) {
            const double f = a * scores[i] + b;
            L += softplus(f) - (1.0 - t[i]) * f;
        }
        return L;
    };

    double A = 0.0, B = std::log((nm + 1.0) / (np + 1.0));
    double L = nll(A, B);
    for (int it = 0; it < 100; ++it) {
        Eigen::Vector2d g = Eigen::Vector2d::Zero();
        Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
        for (int i = 0; i < n; ++i) {
            PlattModel cur{A, B};
            const double p = cur.prob(scores[i]);
            const Eigen::Vector2d u(scores[i], 1.0);
            g += (t[i] - p) * u;
            H += std::max(p * (1.0 - p), 1e-12) * (u * u.transpose());
        }
        if (g.norm() < 1e-10) break;
        Eigen::Vector2d step = H.ldlt().solve(-g);
        double alpha = 1.0;
        double Lnew = nll(A + alpha * step[0], B + alpha * step[1]);
        int bt = 0;
        while (Lnew > L - 1e-12 && bt < 50) {
            alpha *= 0.5;
            Lnew = nll(A + alpha * step[0], B + alpha * step[1]);
            ++bt;
        }
        if (Lnew >= L) break;
        A += alpha * step[0];
        B += alpha * step[1];
        L = Lnew;
    }
    return {A, B};
}

namespace {

std::vector<int> classes_in(const Dataset& ds, const std::vector<int>& subset) {
    std::set<int> s;
    for (int i : subset) s.insert(ds.labels[i]);
    return {s.begin(), s.end()};
}

}  // namespace

MulticlassModel ovr_train(const Dataset& ds, const std::vector<int>& subset,
                          const BinaryTrainer& train) {
    MulticlassModel m;
    m.scheme = "ovr";
    m.class_ids = classes_in(ds, subset);
    if (m.class_ids.size() < 2) throw std::invalid_argument("ovr_train: need >= 2 classes");
    for (int cls : m.class_ids) {
        BinaryView view = ovr_view(ds, cls, subset);
        Separator sep;
        try {
            sep = train(view);
        } catch (const std::exception& e) {
            throw std::runtime_error("ovr_train: class " + std::to_string(cls) +
                                     ": " + e.what());
        }
        std::vector<double> scores(view.size());
        for (int i = 0; i < view.size(); ++i) {
            scores[i] = minkowski(sep.w, view.point(i).coords);
        }
        m.models.push_back(sep);
        m.platt.push_back(platt_fit(scores, view.y));
    }
    return m;
}

MulticlassModel ovo_train(const Dataset& ds, const std::vector<int>& subset,
                          const BinaryTrainer& train) {
    MulticlassModel m;
    m.scheme = "ovo";
    m.class_ids = classes_in(ds, subset);
    if (m.class_ids.size() < 2) throw std::invalid_argument("ovo_train: need >= 2 classes");
    const int k = static_cast<int>(m.class_ids.size());
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
            BinaryView view = ovo_view(ds, m.class_ids[a], m.class_ids[b], subset);
            try {
                m.models.push_back(train(view));
            } catch (const std::exception& e) {
                throw std::runtime_error("ovo_train: pair (" +
                                         std::to_string(m.class_ids[a]) + "," +
                                         std::to_string(m.class_ids[b]) + "): " + e.what());
            }
            m.pairs.emplace_back(m.class_ids[a], m.class_ids[b]);
        }
    }
    return m;
}

std::vector<std::vector<double>> ovr_probabilities(const MulticlassModel& m,
                                                   const Dataset& ds,
                                                   const std::vector<int>& subset) {
    std::vector<std::vector<double>> out(subset.size());
    for (std::size_t s = 0; s < subset.size(); ++s) {
        out[s].resize(m.class_ids.size());
        for (std::size_t c = 0; c < m.class_ids.size(); ++c) {
            const double sc = minkowski(m.models[c].w, ds.points[subset[s]].coords);
            out[s][c] = m.platt[c].prob(sc);
        }
    }
    return out;
}

std::vector<int> ovr_predict(const MulticlassModel& m, const Dataset& ds,
                             const std::vector<int>& subset) {
    auto probs = ovr_probabilities(m, ds, subset);
    std::vector<int> pred(subset.size());
    for (std::size_t s = 0; s < subset.size(); ++s) {
        int best = 0;
        for (std::size_t c = 1; c < m.class_ids.size(); ++c) {
            if (probs[s][c] > probs[s][best]) best = static_cast<int>(c);
        }
        pred[s] = m.class_ids[best];
    }
    return pred;
}

std::vector<int> ovo_predict(const MulticlassModel& m, const Dataset& ds,
                             const std::vector<int>& subset) {
    std::vector<int> pred(subset.size());
    for (std::size_t s = 0; s < subset.size(); ++s) {
        std::map<int, int> votes;
        std::map<int, double> margin;
        for (int cls : m.class_ids) votes[cls] = 0;
        for (std::size_t p = 0; p < m.pairs.size(); ++p) {
            const double sc = minkowski(m.models[p].w, ds.points[subset[s]].coords);
            const int winner = sc > 0.0 ? m.pairs[p].first : m.pairs[p].second;
            votes[winner]++;
            margin[winner] += std::abs(sc);
        }
        int best = m.class_ids.front();
        for (int cls : m.class_ids) {
            if (votes[cls] > votes[best] ||
                (votes[cls] == votes[best] && margin[cls] > margin[best])) {
                best = cls;
            }
        }
        pred[s] = best;
    }
    return pred;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size()) throw std::invalid_argument("accuracy: length mismatch");
    if (pred.empty()) return 0.0;
    int hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == truth[i];
    return static_cast<double>(hit) / static_cast<double>(pred.size());
}

double weighted_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size()) {
        throw std::invalid_argument("weighted_f1: length mismatch");
    }
    if (pred.empty()) return 0.0;
    std::map<int, int> tp, fp, fn, support;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        support[truth[i]]++;
        if (pred[i] == truth[i]) {
            tp[truth[i]]++;
        } else {
            fp[pred[i]]++;
            fn[truth[i]]++;
        }
    }
    double f1 = 0.0;
    for (const auto& [cls, sup] : support) {
        const double t = tp[cls];
        const double prec_den = t + fp[cls], rec_den = t + fn[cls];
        const double prec = prec_den > 0 ? t / prec_den : 0.0;
        const double rec = rec_den > 0 ? t / rec_den : 0.0;
        const double cf1 = (prec + rec) > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        f1 += sup * cf1;
    }
    return f1 / static_cast<double>(pred.size());
}

}  // namespace hsvm
