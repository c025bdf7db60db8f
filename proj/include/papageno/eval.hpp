#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "papageno/predictions.hpp"
#include "papageno/stats.hpp"

namespace papageno::eval {

using stats::Interval;

// Rows are true labels, columns predictions.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<std::uint64_t>> counts;

    std::size_t size() const { return classes.size(); }
    std::uint64_t total() const;
    std::uint64_t row_total(std::size_t i) const;
    std::uint64_t column_total(std::size_t j) const;
    std::uint64_t trace() const;
    std::optional<std::size_t> index_of(std::string_view label) const;
};

ConfusionMatrix confusion(std::span<const std::string> truth, std::span<const std::string> predicted,
                          const std::vector<std::string>& classes);

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
    // Absent when the denominator is zero or the row averages several runs.
    std::optional<Interval> precision_ci;
    std::optional<Interval> recall_ci;
};

// Undefined precision/recall (zero denominator) is reported as 0.
ClassMetrics class_metrics(const ConfusionMatrix& cm, std::size_t class_index, double confidence = 0.95);

struct MacroMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
};

MacroMetrics macro(const ConfusionMatrix& cm);
MacroMetrics macro(std::span<const ClassMetrics> per_class, double accuracy);

struct KappaResult {
    double kappa = 0.0;
    double po = 0.0;
    double pe = 0.0;
    double se = 0.0;
    Interval ci;
    std::size_t n = 0;
};

// Two raters over the same items. CI is kappa +/- 1.96 * SE with the
// asymptotic SE sqrt(po (1 - po) / (n (1 - pe)^2)), clipped to [-1, 1].
KappaResult cohens_kappa(std::span<const std::string> a, std::span<const std::string> b);

// Percentile bootstrap over items.
Interval kappa_bootstrap_ci(std::span<const std::string> a, std::span<const std::string> b,
                            std::size_t replicates, std::uint64_t seed, double confidence = 0.95);

struct ReportMeta {
    std::string model;
    std::string task;
    std::string split;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> run;  // absent for single runs and for means
};

struct MetricsReport {
    ReportMeta meta;
    std::optional<ConfusionMatrix> confusion;  // absent on mean-over-runs reports
    std::vector<ClassMetrics> per_class;
    MacroMetrics macro;
    std::size_t runs = 1;
};

MetricsReport evaluate(std::span<const std::string> truth, std::span<const std::string> predicted,
                       const std::vector<std::string>& classes, ReportMeta meta = {});

// Unweighted mean of per-class and macro values across runs of one model on
// one split.
MetricsReport mean_report(std::span<const MetricsReport> runs);

struct EvalSplit {
    std::string name;  // "validation", "test"
    std::vector<std::string> ids;
    std::vector<std::string> truth;
};

struct ModelRuns {
    std::string name;
    std::vector<PredictionSet> runs;
};

// One report per model, split and run; models with several runs also get a
// mean report per split. Missing predictions throw naming the id.
std::vector<MetricsReport> benchmark(std::span<const ModelRuns> models, std::span<const EvalSplit> splits,
                                     const std::vector<std::string>& classes, const std::string& task);

// Half-up rounding used for display (internal values keep full precision).
double round_half_up(double value, int decimals = 2);

nlohmann::json to_json(const MetricsReport& report);
nlohmann::json to_json(const KappaResult& k);
MetricsReport report_from_json(const nlohmann::json& j);

// Aligned text table: one row per report with Pr/Re/F1/Acc at 2 decimals.
std::string format_table(std::span<const MetricsReport> reports);
// Per-class rows with intervals.
std::string format_class_table(const MetricsReport& report);

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm);
// Row-normalized percentages, one row per true class.
void write_confusion_normalized_csv(std::ostream& out, const ConfusionMatrix& cm);

}  // namespace papageno::eval
