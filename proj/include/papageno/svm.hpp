#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "papageno/sparse.hpp"

namespace papageno::models {

enum class ClassWeight { balanced, none };

std::string_view to_string(ClassWeight cw);
ClassWeight parse_class_weight(std::string_view s);

struct SolverOptions {
    double tolerance = 1e-4;        // stop once max |projected gradient| <= tolerance
    std::size_t max_epochs = 1000;
    std::uint64_t seed = 1;         // coordinate permutation stream
    bool fit_bias = true;           // constant-1 feature, regularized with w
    bool record_history = false;    // dual objective after every epoch
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::string positive_class;
    std::string negative_class;

    double decision(const SparseVector& x) const { return dot(x, weights) + bias; }

    nlohmann::json to_json() const;
    static LinearModel from_json(const nlohmann::json& j);
};

// 0 <= alpha[i] <= cap[i] at all times.
struct DualState {
    std::vector<double> alpha;
    std::vector<double> cap;
};

struct TrainStats {
    std::size_t epochs = 0;
    bool converged = false;
    double kkt_residual = 0.0;
    double dual_objective = 0.0;
    double primal_objective = 0.0;
    std::vector<double> dual_history;
};

struct BinaryResult {
    LinearModel model;
    DualState dual;
    TrainStats stats;
};

// L2-regularized hinge-loss SVM
//   min_w 1/2 |w|^2 + sum_i C_i max(0, 1 - y_i (w.x_i + b)),  C_i = C * weight(y_i)
// solved in the dual by coordinate descent over a seeded permutation each epoch.
// Labels are +1/-1; both must be present.
BinaryResult train_binary_svm(std::span<const SparseVector> x, std::span<const int> y, std::size_t dim,
                              double c, double positive_weight, double negative_weight,
                              const SolverOptions& options = {});

// Objectives in the augmented space (bias counted in the norm when fitted).
double primal_objective(const LinearModel& model, std::span<const SparseVector> x, std::span<const int> y,
                        std::span<const double> cap, bool fit_bias);
double dual_objective(const LinearModel& model, std::span<const double> alpha, bool fit_bias);

// weight(c) = n / (k * n_c) over `classes`; a declared class with no
// examples is an error.
std::map<std::string, double> balanced_weights(std::span<const std::string> labels,
                                               const std::vector<std::string>& classes);

}  // namespace papageno::models
