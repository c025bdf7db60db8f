#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "papageno/svm.hpp"

namespace papageno::models {

struct OvOTrainOptions {
    double c = 1.0;
    ClassWeight class_weight = ClassWeight::balanced;
    SolverOptions solver;
};

// One binary model per unordered class pair (i < j), stored in the order
// (0,1), (0,2), ..., (k-2,k-1); class i is the positive side.
class OvOModel {
public:
    OvOModel() = default;
    OvOModel(std::vector<std::string> classes, std::vector<LinearModel> pairs);

    const std::vector<std::string>& classes() const { return classes_; }
    const std::vector<LinearModel>& pairs() const { return pairs_; }
    std::size_t pair_index(std::size_t i, std::size_t j) const;

    struct Vote {
        std::vector<int> votes;
        std::vector<double> margin;  // summed signed decision values per class
        std::size_t winner = 0;
    };

    // Votes by sign of w.x + b (> 0 votes positive). Ties on votes go to the
    // larger summed signed decision value, then to the earlier class.
    Vote vote(const SparseVector& x) const;
    const std::string& predict(const SparseVector& x) const { return classes_[vote(x).winner]; }

    nlohmann::json to_json() const;
    static OvOModel from_json(const nlohmann::json& j);

private:
    std::vector<std::string> classes_;
    std::vector<LinearModel> pairs_;
};

// `classes` fixes the class order; classes without examples are dropped.
// Per-pair balanced weights are computed on the pair's own examples.
// Pairs train in parallel (OpenMP); each pair owns a derived seed, so the
// result equals train_ovo_serial bit for bit.
OvOModel train_ovo(std::span<const SparseVector> x, std::span<const std::string> y, std::size_t dim,
                   const std::vector<std::string>& classes, const OvOTrainOptions& options);
OvOModel train_ovo_serial(std::span<const SparseVector> x, std::span<const std::string> y, std::size_t dim,
                          const std::vector<std::string>& classes, const OvOTrainOptions& options);

std::vector<std::string> predict_all(const OvOModel& model, std::span<const SparseVector> x);
std::vector<std::string> predict_all_serial(const OvOModel& model, std::span<const SparseVector> x);

class MajorityModel {
public:
    MajorityModel() = default;
    explicit MajorityModel(std::string label) : label_(std::move(label)) {}
    const std::string& label() const { return label_; }
    const std::string& predict(const SparseVector&) const { return label_; }

private:
    std::string label_;
};

// Most frequent label; ties resolved by position in `class_order` (labels
// missing from the order sort after it, lexicographically).
MajorityModel train_majority(std::span<const std::string> labels, const std::vector<std::string>& class_order);

}  // namespace papageno::models
