#include "papageno/ovo.hpp"

#include <algorithm>
#include <map>

#include "papageno/error.hpp"
#include "papageno/random.hpp"

namespace papageno::models {

using nlohmann::json;

OvOModel::OvOModel(std::vector<std::string> classes, std::vector<LinearModel> pairs)
    : classes_(std::move(classes)), pairs_(std::move(pairs)) {
    const auto k = classes_.size();
    if (pairs_.size() != k * (k - 1) / 2) {
        throw Error("OvOModel: expected " + std::to_string(k * (k - 1) / 2) + " pair models, got " +
                    std::to_string(pairs_.size()));
    }
}

std::size_t OvOModel::pair_index(std::size_t i, std::size_t j) const {
    // pairs before row i: sum_{r<i} (k-1-r)
    const auto k = classes_.size();
    return i * (2 * k - i - 1) / 2 + (j - i - 1);
}

OvOModel::Vote OvOModel::vote(const SparseVector& x) const {
    const auto k = classes_.size();
    Vote v;
    v.votes.assign(k, 0);
    v.margin.assign(k, 0.0);
    std::size_t p = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j, ++p) {
            const double d = pairs_[p].decision(x);
            ++v.votes[d > 0.0 ? i : j];
            v.margin[i] += d;
            v.margin[j] -= d;
        }
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
        if (v.votes[c] > v.votes[best] || (v.votes[c] == v.votes[best] && v.margin[c] > v.margin[best])) {
            best = c;
        }
    }
    v.winner = best;
    return v;
}

json OvOModel::to_json() const {
    json pairs = json::array();
    for (const auto& m : pairs_) pairs.push_back(m.to_json());
    return {{"classes", classes_}, {"pairs", pairs}};
}

OvOModel OvOModel::from_json(const json& j) {
    std::vector<LinearModel> pairs;
    for (const auto& p : j.at("pairs")) pairs.push_back(LinearModel::from_json(p));
    return OvOModel(j.at("classes").get<std::vector<std::string>>(), std::move(pairs));
}

namespace {

struct PairPlan {
    std::vector<std::string> classes;
    std::vector<std::vector<std::size_t>> members;  // per class, example indices
};

PairPlan plan(std::span<const SparseVector> x, std::span<const std::string> y,
              const std::vector<std::string>& classes) {
    if (x.size() != y.size()) throw Error("train_ovo: |X| != |y|");
    std::map<std::string, std::size_t> slot;
    for (std::size_t c = 0; c < classes.size(); ++c) slot.emplace(classes[c], c);
    std::vector<std::vector<std::size_t>> members(classes.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto it = slot.find(y[i]);
        if (it == slot.end()) throw Error("train_ovo: label '" + y[i] + "' not in class list");
        members[it->second].push_back(i);
    }
    PairPlan out;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (members[c].empty()) continue;
        out.classes.push_back(classes[c]);
        out.members.push_back(std::move(members[c]));
    }
    if (out.classes.size() < 2) throw Error("train_ovo: need at least 2 classes with examples");
    return out;
}

LinearModel train_pair(const PairPlan& plan, std::size_t i, std::size_t j, std::size_t pair_no,
                       std::span<const SparseVector> x, std::size_t dim, const OvOTrainOptions& options) {
    const auto& a = plan.members[i];
    const auto& b = plan.members[j];
    std::vector<SparseVector> px;
    std::vector<int> py;
    px.reserve(a.size() + b.size());
    py.reserve(a.size() + b.size());
    // original example order keeps the sub-problem independent of class order
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (ia < a.size() || ib < b.size()) {
        if (ib == b.size() || (ia < a.size() && a[ia] < b[ib])) {
            px.push_back(x[a[ia++]]);
            py.push_back(1);
        } else {
            px.push_back(x[b[ib++]]);
            py.push_back(-1);
        }
    }
    double wp = 1.0;
    double wn = 1.0;
    if (options.class_weight == ClassWeight::balanced) {
        const auto n = static_cast<double>(px.size());
        wp = n / (2.0 * static_cast<double>(a.size()));
        wn = n / (2.0 * static_cast<double>(b.size()));
    }
    SolverOptions so = options.solver;
    so.seed = derive_seed(options.solver.seed, pair_no);
    so.record_history = false;
    auto res = train_binary_svm(px, py, dim, options.c, wp, wn, so);
    res.model.positive_class = plan.classes[i];
    res.model.negative_class = plan.classes[j];
    return std::move(res.model);
}

std::vector<std::pair<std::size_t, std::size_t>> pair_list(std::size_t k) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) out.emplace_back(i, j);
    }
    return out;
}

}  // namespace

OvOModel train_ovo(std::span<const SparseVector> x, std::span<const std::string> y, std::size_t dim,
                   const std::vector<std::string>& classes, const OvOTrainOptions& options) {
    const PairPlan p = plan(x, y, classes);
    const auto pairs = pair_list(p.classes.size());
    std::vector<LinearModel> models(pairs.size());
    std::vector<std::string> errors(pairs.size());
    const auto count = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t q = 0; q < count; ++q) {
        const auto u = static_cast<std::size_t>(q);
        try {
            models[u] = train_pair(p, pairs[u].first, pairs[u].second, u, x, dim, options);
        } catch (const std::exception& e) {
            errors[u] = e.what();
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw Error(e);
    }
    return OvOModel(p.classes, std::move(models));
}

OvOModel train_ovo_serial(std::span<const SparseVector> x, std::span<const std::string> y, std::size_t dim,
                          const std::vector<std::string>& classes, const OvOTrainOptions& options) {
    const PairPlan p = plan(x, y, classes);
    const auto pairs = pair_list(p.classes.size());
    std::vector<LinearModel> models;
    models.reserve(pairs.size());
    for (std::size_t q = 0; q < pairs.size(); ++q) {
        models.push_back(train_pair(p, pairs[q].first, pairs[q].second, q, x, dim, options));
    }
    return OvOModel(p.classes, std::move(models));
}

std::vector<std::string> predict_all(const OvOModel& model, std::span<const SparseVector> x) {
    std::vector<std::string> out(x.size());
    const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = model.predict(x[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::vector<std::string> predict_all_serial(const OvOModel& model, std::span<const SparseVector> x) {
    std::vector<std::string> out;
    out.reserve(x.size());
    for (const auto& v : x) out.push_back(model.predict(v));
    return out;
}

MajorityModel train_majority(std::span<const std::string> labels, const std::vector<std::string>& class_order) {
    if (labels.empty()) throw Error("train_majority: no labels");
    std::map<std::string, std::size_t> counts;
    for (const auto& l : labels) ++counts[l];
    auto rank = [&](const std::string& l) {
        auto it = std::find(class_order.begin(), class_order.end(), l);
        return static_cast<std::size_t>(it - class_order.begin());
    };
    const std::string* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [label, cnt] : counts) {
        if (!best || cnt > best_count ||
            (cnt == best_count && (rank(label) < rank(*best) || (rank(label) == rank(*best) && label < *best)))) {
            best = &label;
            best_count = cnt;
        }
    }
    return MajorityModel(*best);
}

}  // namespace papageno::models
