#include "papageno/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "papageno/csv.hpp"
#include "papageno/error.hpp"
#include "papageno/random.hpp"

namespace papageno::eval {

using nlohmann::json;

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts) t += std::accumulate(row.begin(), row.end(), std::uint64_t{0});
    return t;
}

std::uint64_t ConfusionMatrix::row_total(std::size_t i) const {
    return std::accumulate(counts[i].begin(), counts[i].end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::column_total(std::size_t j) const {
    std::uint64_t t = 0;
    for (const auto& row : counts) t += row[j];
    return t;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
}

std::optional<std::size_t> ConfusionMatrix::index_of(std::string_view label) const {
    auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) return std::nullopt;
    return static_cast<std::size_t>(it - classes.begin());
}

ConfusionMatrix confusion(std::span<const std::string> truth, std::span<const std::string> predicted,
                          const std::vector<std::string>& classes) {
    if (truth.size() != predicted.size()) {
        throw Error("confusion: " + std::to_string(truth.size()) + " true labels vs " +
                    std::to_string(predicted.size()) + " predictions");
    }
    if (truth.empty()) throw Error("confusion: no items");
    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts.assign(classes.size(), std::vector<std::uint64_t>(classes.size(), 0));
    std::map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < classes.size(); ++i) index.emplace(classes[i], i);
    for (std::size_t k = 0; k < truth.size(); ++k) {
        auto t = index.find(truth[k]);
        auto p = index.find(predicted[k]);
        if (t == index.end()) throw Error("confusion: unknown true label '" + truth[k] + "'");
        if (p == index.end()) throw Error("confusion: unknown predicted label '" + predicted[k] + "'");
        ++cm.counts[t->second][p->second];
    }
    return cm;
}

ClassMetrics class_metrics(const ConfusionMatrix& cm, std::size_t c, double confidence) {
    ClassMetrics m;
    m.label = cm.classes.at(c);
    const std::uint64_t tp = cm.counts[c][c];
    const std::uint64_t predicted = cm.column_total(c);
    const std::uint64_t actual = cm.row_total(c);
    m.support = actual;
    if (predicted > 0) {
        m.precision = static_cast<double>(tp) / static_cast<double>(predicted);
        m.precision_ci = stats::clopper_pearson(tp, predicted, confidence);
    }
    if (actual > 0) {
        m.recall = static_cast<double>(tp) / static_cast<double>(actual);
        m.recall_ci = stats::clopper_pearson(tp, actual, confidence);
    }
    if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

MacroMetrics macro(std::span<const ClassMetrics> per_class, double accuracy) {
    MacroMetrics out;
    out.accuracy = accuracy;
    if (per_class.empty()) return out;
    for (const auto& m : per_class) {
        out.precision += m.precision;
        out.recall += m.recall;
        out.f1 += m.f1;
    }
    const auto k = static_cast<double>(per_class.size());
    out.precision /= k;
    out.recall /= k;
    out.f1 /= k;
    return out;
}

MacroMetrics macro(const ConfusionMatrix& cm) {
    std::vector<ClassMetrics> per;
    for (std::size_t c = 0; c < cm.size(); ++c) per.push_back(class_metrics(cm, c));
    const auto total = cm.total();
    return macro(per, total ? static_cast<double>(cm.trace()) / static_cast<double>(total) : 0.0);
}

KappaResult cohens_kappa(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.size() != b.size()) {
        throw Error("cohens_kappa: rater lengths differ (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
    }
    if (a.size() < 2) throw Error("cohens_kappa: need at least 2 items");
    std::map<std::string_view, std::pair<std::size_t, std::size_t>> marginals;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++marginals[a[i]].first;
        ++marginals[b[i]].second;
        if (a[i] == b[i]) ++agree;
    }
    const auto n = static_cast<double>(a.size());
    KappaResult r;
    r.n = a.size();
    r.po = static_cast<double>(agree) / n;
    for (const auto& [label, counts] : marginals) {
        r.pe += (static_cast<double>(counts.first) / n) * (static_cast<double>(counts.second) / n);
    }
    if (r.pe >= 1.0) {
        if (r.po < 1.0) throw Error("cohens_kappa: chance agreement is 1 but raters disagree");
        r.kappa = 1.0;
        r.ci = {1.0, 1.0};
        return r;
    }
    r.kappa = (r.po - r.pe) / (1.0 - r.pe);
    r.se = std::sqrt(r.po * (1.0 - r.po) / (n * (1.0 - r.pe) * (1.0 - r.pe)));
    r.ci = {std::max(-1.0, r.kappa - 1.96 * r.se), std::min(1.0, r.kappa + 1.96 * r.se)};
    return r;
}

Interval kappa_bootstrap_ci(std::span<const std::string> a, std::span<const std::string> b,
                            std::size_t replicates, std::uint64_t seed, double confidence) {
    if (a.size() != b.size() || a.size() < 2) throw Error("kappa_bootstrap_ci: need paired samples");
    if (replicates < 2) throw Error("kappa_bootstrap_ci: need at least 2 replicates");
    Rng rng(seed);
    std::vector<double> kappas;
    kappas.reserve(replicates);
    std::vector<std::string> ra(a.size());
    std::vector<std::string> rb(b.size());
    for (std::size_t r = 0; r < replicates; ++r) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const auto j = static_cast<std::size_t>(rng.below(a.size()));
            ra[i] = a[j];
            rb[i] = b[j];
        }
        // degenerate resamples (every item in one class) carry no information
        try {
            kappas.push_back(cohens_kappa(ra, rb).kappa);
        } catch (const Error&) {
        }
    }
    if (kappas.empty()) throw Error("kappa_bootstrap_ci: every resample was degenerate");
    std::sort(kappas.begin(), kappas.end());
    const double alpha = 1.0 - confidence;
    auto q = [&](double p) {
        const auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(kappas.size() - 1)));
        return kappas[std::min(idx, kappas.size() - 1)];
    };
    return {q(alpha / 2.0), q(1.0 - alpha / 2.0)};
}

MetricsReport evaluate(std::span<const std::string> truth, std::span<const std::string> predicted,
                       const std::vector<std::string>& classes, ReportMeta meta) {
    MetricsReport r;
    r.meta = std::move(meta);
    r.confusion = confusion(truth, predicted, classes);
    for (std::size_t c = 0; c < classes.size(); ++c) r.per_class.push_back(class_metrics(*r.confusion, c));
    r.macro = macro(r.per_class, static_cast<double>(r.confusion->trace()) /
                                     static_cast<double>(r.confusion->total()));
    return r;
}

MetricsReport mean_report(std::span<const MetricsReport> runs) {
    if (runs.empty()) throw Error("mean_report: no runs");
    MetricsReport out;
    out.meta = runs.front().meta;
    out.meta.run.reset();
    out.runs = runs.size();
    const auto k = static_cast<double>(runs.size());
    out.per_class.resize(runs.front().per_class.size());
    for (std::size_t c = 0; c < out.per_class.size(); ++c) out.per_class[c].label = runs.front().per_class[c].label;
    for (const auto& r : runs) {
        if (r.per_class.size() != out.per_class.size()) throw Error("mean_report: class sets differ");
        for (std::size_t c = 0; c < out.per_class.size(); ++c) {
            out.per_class[c].precision += r.per_class[c].precision / k;
            out.per_class[c].recall += r.per_class[c].recall / k;
            out.per_class[c].f1 += r.per_class[c].f1 / k;
            out.per_class[c].support = r.per_class[c].support;
        }
        out.macro.precision += r.macro.precision / k;
        out.macro.recall += r.macro.recall / k;
        out.macro.f1 += r.macro.f1 / k;
        out.macro.accuracy += r.macro.accuracy / k;
    }
    return out;
}

std::vector<MetricsReport> benchmark(std::span<const ModelRuns> models, std::span<const EvalSplit> splits,
                                     const std::vector<std::string>& classes, const std::string& task) {
    std::vector<MetricsReport> out;
    for (const auto& model : models) {
        if (model.runs.empty()) throw Error("benchmark: model " + model.name + " has no runs");
        for (const auto& split : splits) {
            if (split.ids.size() != split.truth.size()) throw Error("benchmark: split " + split.name + " is ragged");
            std::vector<MetricsReport> per_run;
            for (std::size_t r = 0; r < model.runs.size(); ++r) {
                std::vector<std::string> predicted;
                predicted.reserve(split.ids.size());
                for (const auto& id : split.ids) predicted.push_back(model.runs[r].at(id));
                ReportMeta meta{model.name, task, split.name, std::nullopt, std::nullopt};
                if (model.runs.size() > 1) meta.run = r + 1;
                per_run.push_back(evaluate(split.truth, predicted, classes, meta));
            }
            out.insert(out.end(), per_run.begin(), per_run.end());
            if (per_run.size() > 1) out.push_back(mean_report(per_run));
        }
    }
    return out;
}

double round_half_up(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    // the slack absorbs binary representation error at exact .5 boundaries
    return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

namespace {

json interval_json(const std::optional<Interval>& ci) {
    if (!ci) return nullptr;
    return json::array({ci->low, ci->high});
}

std::optional<Interval> interval_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return Interval{j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

json to_json(const MetricsReport& r) {
    json j;
    j["meta"] = {{"model", r.meta.model}, {"task", r.meta.task}, {"split", r.meta.split}};
    j["meta"]["seed"] = r.meta.seed ? json(*r.meta.seed) : json(nullptr);
    j["meta"]["run"] = r.meta.run ? json(*r.meta.run) : json(nullptr);
    j["runs"] = r.runs;
    j["macro"] = {{"precision", r.macro.precision},
                  {"recall", r.macro.recall},
                  {"f1", r.macro.f1},
                  {"accuracy", r.macro.accuracy}};
    j["per_class"] = json::array();
    for (const auto& m : r.per_class) {
        j["per_class"].push_back({{"label", m.label},
                                  {"precision", m.precision},
                                  {"recall", m.recall},
                                  {"f1", m.f1},
                                  {"support", m.support},
                                  {"precision_ci", interval_json(m.precision_ci)},
                                  {"recall_ci", interval_json(m.recall_ci)}});
    }
    if (r.confusion) {
        j["confusion"] = {{"classes", r.confusion->classes}, {"counts", r.confusion->counts}};
    } else {
        j["confusion"] = nullptr;
    }
    return j;
}

json to_json(const KappaResult& k) {
    return {{"kappa", k.kappa}, {"po", k.po}, {"pe", k.pe}, {"se", k.se},
            {"ci", json::array({k.ci.low, k.ci.high})}, {"n", k.n}};
}

MetricsReport report_from_json(const json& j) {
    MetricsReport r;
    const auto& meta = j.at("meta");
    r.meta.model = meta.at("model").get<std::string>();
    r.meta.task = meta.at("task").get<std::string>();
    r.meta.split = meta.at("split").get<std::string>();
    if (!meta.at("seed").is_null()) r.meta.seed = meta.at("seed").get<std::uint64_t>();
    if (!meta.at("run").is_null()) r.meta.run = meta.at("run").get<std::size_t>();
    r.runs = j.at("runs").get<std::size_t>();
    const auto& m = j.at("macro");
    r.macro = {m.at("precision").get<double>(), m.at("recall").get<double>(), m.at("f1").get<double>(),
               m.at("accuracy").get<double>()};
    for (const auto& c : j.at("per_class")) {
        ClassMetrics cm;
        cm.label = c.at("label").get<std::string>();
        cm.precision = c.at("precision").get<double>();
        cm.recall = c.at("recall").get<double>();
        cm.f1 = c.at("f1").get<double>();
        cm.support = c.at("support").get<std::uint64_t>();
        cm.precision_ci = interval_from(c.at("precision_ci"));
        cm.recall_ci = interval_from(c.at("recall_ci"));
        r.per_class.push_back(std::move(cm));
    }
    if (!j.at("confusion").is_null()) {
        ConfusionMatrix cm;
        cm.classes = j["confusion"].at("classes").get<std::vector<std::string>>();
        cm.counts = j["confusion"].at("counts").get<std::vector<std::vector<std::uint64_t>>>();
        r.confusion = std::move(cm);
    }
    return r;
}

namespace {

std::string fixed2(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << round_half_up(v, 2);
    return os.str();
}

}  // namespace

std::string format_table(std::span<const MetricsReport> reports) {
    std::size_t model_w = 5;
    std::size_t split_w = 5;
    for (const auto& r : reports) {
        std::string name = r.meta.model;
        if (r.meta.run) name += " #" + std::to_string(*r.meta.run);
        if (r.runs > 1) name += " (mean of " + std::to_string(r.runs) + ")";
        model_w = std::max(model_w, name.size());
        split_w = std::max(split_w, r.meta.split.size());
    }
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(model_w)) << "Model" << "  "
       << std::setw(static_cast<int>(split_w)) << "Split" << "    Pr    Re    F1   Acc\n";
    for (const auto& r : reports) {
        std::string name = r.meta.model;
        if (r.meta.run) name += " #" + std::to_string(*r.meta.run);
        if (r.runs > 1) name += " (mean of " + std::to_string(r.runs) + ")";
        os << std::left << std::setw(static_cast<int>(model_w)) << name << "  "
           << std::setw(static_cast<int>(split_w)) << r.meta.split << "  " << std::right << std::setw(4)
           << fixed2(r.macro.precision) << "  " << fixed2(r.macro.recall) << "  " << fixed2(r.macro.f1)
           << "  " << fixed2(r.macro.accuracy) << '\n';
    }
    return os.str();
}

std::string format_class_table(const MetricsReport& report) {
    std::size_t w = 5;
    for (const auto& m : report.per_class) w = std::max(w, m.label.size());
    auto ci = [](const std::optional<Interval>& i) {
        return i ? "[" + fixed2(i->low) + "-" + fixed2(i->high) + "]" : std::string("[  n/a  ]");
    };
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(w)) << "Class"
       << "      n  Precision              Recall                 F1\n";
    for (const auto& m : report.per_class) {
        os << std::left << std::setw(static_cast<int>(w)) << m.label << std::right << std::setw(7) << m.support
           << "  " << fixed2(m.precision) << " " << ci(m.precision_ci) << "  " << fixed2(m.recall) << " "
           << ci(m.recall_ci) << "  " << fixed2(m.f1) << '\n';
    }
    return os.str();
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm) {
    std::vector<std::string> header{"true\\predicted"};
    header.insert(header.end(), cm.classes.begin(), cm.classes.end());
    csv::write_row(out, header);
    for (std::size_t i = 0; i < cm.size(); ++i) {
        std::vector<std::string> row{cm.classes[i]};
        for (auto c : cm.counts[i]) row.push_back(std::to_string(c));
        csv::write_row(out, row);
    }
}

void write_confusion_normalized_csv(std::ostream& out, const ConfusionMatrix& cm) {
    std::vector<std::string> header{"true\\predicted"};
    header.insert(header.end(), cm.classes.begin(), cm.classes.end());
    csv::write_row(out, header);
    for (std::size_t i = 0; i < cm.size(); ++i) {
        std::vector<std::string> row{cm.classes[i]};
        const auto total = cm.row_total(i);
        for (auto c : cm.counts[i]) {
            std::ostringstream os;
            os << std::fixed << std::setprecision(2)
               << (total ? 100.0 * static_cast<double>(c) / static_cast<double>(total) : 0.0);
            row.push_back(os.str());
        }
        csv::write_row(out, row);
    }
}

}  // namespace papageno::eval
