#include "papageno/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "papageno/error.hpp"
#include "papageno/random.hpp"

namespace papageno::models {

using nlohmann::json;

std::string_view to_string(ClassWeight cw) { return cw == ClassWeight::balanced ? "balanced" : "none"; }

ClassWeight parse_class_weight(std::string_view s) {
    if (s == "balanced") return ClassWeight::balanced;
    if (s == "none") return ClassWeight::none;
    throw ValidationError("class_weight", "expected 'balanced' or 'none', got '" + std::string(s) + "'");
}

json LinearModel::to_json() const {
    return {{"positive", positive_class}, {"negative", negative_class}, {"bias", bias}, {"weights", weights}};
}

LinearModel LinearModel::from_json(const json& j) {
    LinearModel m;
    m.positive_class = j.at("positive").get<std::string>();
    m.negative_class = j.at("negative").get<std::string>();
    m.bias = j.at("bias").get<double>();
    m.weights = j.at("weights").get<std::vector<double>>();
    return m;
}

double primal_objective(const LinearModel& model, std::span<const SparseVector> x, std::span<const int> y,
                        std::span<const double> cap, bool fit_bias) {
    double reg = 0.0;
    for (double w : model.weights) reg += w * w;
    if (fit_bias) reg += model.bias * model.bias;
    double loss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        loss += cap[i] * std::max(0.0, 1.0 - y[i] * model.decision(x[i]));
    }
    return 0.5 * reg + loss;
}

double dual_objective(const LinearModel& model, std::span<const double> alpha, bool fit_bias) {
    double reg = 0.0;
    for (double w : model.weights) reg += w * w;
    if (fit_bias) reg += model.bias * model.bias;
    return std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * reg;
}

BinaryResult train_binary_svm(std::span<const SparseVector> x, std::span<const int> y, std::size_t dim,
                              double c, double positive_weight, double negative_weight,
                              const SolverOptions& options) {
    if (x.size() != y.size()) throw Error("train_binary_svm: |X| != |y|");
    if (x.size() < 2) throw Error("train_binary_svm: need at least 2 examples");
    if (!(c > 0.0)) throw ValidationError("C", "must be > 0");
    const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
    const bool has_neg = std::find(y.begin(), y.end(), -1) != y.end();
    if (!has_pos || !has_neg) throw Error("train_binary_svm: both classes must be present");
    for (int v : y) {
        if (v != 1 && v != -1) throw Error("train_binary_svm: labels must be +1/-1");
    }

    const std::size_t n = x.size();
    const double bias_sq = options.fit_bias ? 1.0 : 0.0;
    BinaryResult result;
    auto& w = result.model.weights;
    double& b = result.model.bias;
    w.assign(dim, 0.0);
    b = 0.0;
    auto& alpha = result.dual.alpha;
    auto& cap = result.dual.cap;
    alpha.assign(n, 0.0);
    cap.resize(n);
    std::vector<double> qii(n);
    for (std::size_t i = 0; i < n; ++i) {
        cap[i] = c * (y[i] > 0 ? positive_weight : negative_weight);
        qii[i] = x[i].squared_norm() + bias_sq;
    }

    // Projected gradient of the (minimization-form) dual at coordinate i.
    auto projected = [&](std::size_t i, double g) {
        if (alpha[i] <= 0.0) return std::min(g, 0.0);
        if (alpha[i] >= cap[i]) return std::max(g, 0.0);
        return g;
    };
    auto gradient = [&](std::size_t i) {
        return y[i] * (dot(x[i], w) + (options.fit_bias ? b : 0.0)) - 1.0;
    };

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(options.seed);
    auto& st = result.stats;
    for (st.epochs = 0; st.epochs < options.max_epochs;) {
        rng.shuffle(std::span<std::size_t>(order));
        double max_pg = 0.0;
        for (std::size_t i : order) {
            const double g = gradient(i);
            const double pg = projected(i, g);
            max_pg = std::max(max_pg, std::fabs(pg));
            if (pg == 0.0) continue;
            const double old = alpha[i];
            // an all-zero row with no bias has Q_ii = 0; its optimum sits on the cap
            const double next = qii[i] > 0.0 ? std::clamp(old - g / qii[i], 0.0, cap[i]) : cap[i];
            const double delta = (next - old) * y[i];
            if (delta == 0.0) continue;
            alpha[i] = next;
            axpy(delta, x[i], w);
            if (options.fit_bias) b += delta;
        }
        ++st.epochs;
        if (options.record_history) st.dual_history.push_back(dual_objective(result.model, alpha, options.fit_bias));
        if (max_pg <= options.tolerance) {
            st.converged = true;
            break;
        }
    }

    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::fabs(projected(i, gradient(i))));
    st.kkt_residual = residual;
    st.converged = st.converged || residual <= options.tolerance;
    st.dual_objective = dual_objective(result.model, alpha, options.fit_bias);
    st.primal_objective = primal_objective(result.model, x, y, cap, options.fit_bias);
    return result;
}

std::map<std::string, double> balanced_weights(std::span<const std::string> labels,
                                               const std::vector<std::string>& classes) {
    if (labels.empty()) throw Error("balanced_weights: no labels");
    std::map<std::string, std::size_t> counts;
    for (const auto& c : classes) counts[c] = 0;
    for (const auto& l : labels) {
        auto it = counts.find(l);
        if (it == counts.end()) throw Error("balanced_weights: label '" + l + "' not in class set");
        ++it->second;
    }
    std::map<std::string, double> out;
    const auto n = static_cast<double>(labels.size());
    const auto k = static_cast<double>(counts.size());
    for (const auto& [cls, cnt] : counts) {
        if (cnt == 0) throw Error("balanced_weights: class '" + cls + "' has no examples");
        out[cls] = n / (k * static_cast<double>(cnt));
    }
    return out;
}

}  // namespace papageno::models
