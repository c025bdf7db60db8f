#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "papageno/corpus.hpp"
#include "papageno/error.hpp"
#include "papageno/eval.hpp"
#include "papageno/labeling.hpp"
#include "papageno/pipeline.hpp"
#include "papageno/service.hpp"
#include "papageno/signal.hpp"
#include "papageno/training.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace papageno;

namespace {

struct Globals {
    std::uint64_t seed = 42;
    bool json = false;
    int workers = 0;
};

struct PreprocessFlags {
    bool remove_digits = false;
    bool strip_digit_chars = false;
    bool remove_punctuation = false;
    bool remove_stopwords = false;
    std::string lemma_table;
    std::size_t max_tokens = 80;

    void add(CLI::App* cmd) {
        cmd->add_flag("--remove-digits", remove_digits, "Drop all-digit tokens");
        cmd->add_flag("--strip-digit-chars", strip_digit_chars, "Strip digit characters inside tokens");
        cmd->add_flag("--remove-punctuation", remove_punctuation, "Drop punctuation tokens");
        cmd->add_flag("--remove-stopwords", remove_stopwords, "Drop English stopwords");
        cmd->add_option("--lemma-table", lemma_table, "token<TAB>lemma file")->check(CLI::ExistingFile);
        cmd->add_option("--max-tokens", max_tokens, "Truncate documents to this many tokens")
            ->capture_default_str();
    }

    preprocess::PreprocessConfig config() const {
        preprocess::PreprocessConfig c;
        c.remove_digits = remove_digits;
        c.strip_digit_chars = strip_digit_chars;
        c.remove_punctuation = remove_punctuation;
        c.remove_stopwords = remove_stopwords;
        if (!lemma_table.empty()) c.lemma_table = preprocess::load_lemma_table(lemma_table);
        c.max_tokens = max_tokens;
        return c;
    }
};

Level parse_task(const std::string& s) {
    auto l = parse_level(s);
    if (!l) throw ValidationError("task", "expected 1, 2 or fine, got '" + s + "'");
    return *l;
}

std::optional<std::size_t> parse_top_n(const std::string& s) {
    if (s == "N" || s == "all" || s == "none") return std::nullopt;
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size() || v == 0) throw ValidationError("top-n", "expected a positive count or N");
    return v;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

std::string fmt(double v, int digits = 2) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

void emit(const Globals& g, const json& j, const std::string& text) {
    if (g.json) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << text;
    }
}

annotate::AnnotationService* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Suicide-prevention tweet classification and monitoring toolkit"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Seed for every randomized step")->capture_default_str();
    app.add_flag("--json", g.json, "Machine-readable output and errors");
    app.add_option("--workers", g.workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Keyword/exclusion/retweet/duplicate filtering");
    std::string in_path, out_path, keywords = "data/keywords.txt", exclusions = "data/exclusions.txt";
    bool keep_retweets = false;
    std::string date_from, date_to;
    ingest->add_option("--input", in_path, "Raw tweets (JSON lines)")->required()->check(CLI::ExistingFile);
    ingest->add_option("--output", out_path, "Filtered tweets (JSON lines)")->required();
    ingest->add_option("--keywords", keywords, "Search term list")->capture_default_str()->check(CLI::ExistingFile);
    ingest->add_option("--exclusions", exclusions, "Exclusion term list")
        ->capture_default_str()
        ->check(CLI::ExistingFile);
    ingest->add_flag("--keep-retweets", keep_retweets, "Skip the retweet filter");
    ingest->add_option("--from", date_from, "First day kept (YYYY-MM-DD)");
    ingest->add_option("--to", date_to, "Last day kept (YYYY-MM-DD)");

    // split
    auto* split = app.add_subcommand("split", "Stratified train/validation/test split");
    std::string split_in, split_dir, split_level = "fine";
    std::vector<double> ratios{0.64, 0.16, 0.20};
    split->add_option("--input", split_in, "Labeled tweets (JSON lines)")->required()->check(CLI::ExistingFile);
    split->add_option("--out-dir", split_dir, "Output directory")->required();
    split->add_option("--stratify", split_level, "Stratification level: fine, 1 or 2")->capture_default_str();
    split->add_option("--ratios", ratios, "Train, validation and test fractions")->expected(3);

    // train
    auto* train = app.add_subcommand("train", "Train the TF-IDF + SVM classifier or the majority baseline");
    std::string train_in, model_out, task = "1", class_weight = "balanced", top_n = "10000";
    double c_value = 0.82;
    int ngrams = 2;
    bool majority = false;
    PreprocessFlags pre;
    train->add_option("--train", train_in, "Training split (JSON lines)")->required()->check(CLI::ExistingFile);
    train->add_option("--model", model_out, "Output model file")->required();
    train->add_option("--task", task, "1 (six classes), 2 (binary) or fine")->capture_default_str();
    train->add_option("--C", c_value, "SVM regularization parameter")->capture_default_str();
    train->add_option("--ngrams", ngrams, "Largest n-gram order (1 or 2)")
        ->capture_default_str()
        ->check(CLI::Range(1, 2));
    train->add_option("--top-n", top_n, "Vocabulary cap by term frequency, or N for no cap")->capture_default_str();
    train->add_option("--class-weight", class_weight, "balanced or none")->capture_default_str();
    train->add_flag("--majority", majority, "Train the majority baseline instead");
    pre.add(train);

    // gridsearch
    auto* grid = app.add_subcommand("gridsearch", "Grid search on the validation split");
    std::string grid_train, grid_val, grid_csv, grid_best, grid_task = "1";
    models::GridSpec spec;
    std::vector<std::string> grid_top_n;
    std::vector<std::string> grid_weights;
    PreprocessFlags grid_pre;
    grid->add_option("--train", grid_train, "Training split")->required()->check(CLI::ExistingFile);
    grid->add_option("--validation", grid_val, "Validation split")->required()->check(CLI::ExistingFile);
    grid->add_option("--task", grid_task, "1, 2 or fine")->capture_default_str();
    grid->add_option("--out", grid_csv, "Ranked results CSV")->required();
    grid->add_option("--best", grid_best, "Write the best configuration as JSON");
    grid->add_option("--ngrams", spec.ngram_max, "n-gram orders to try");
    grid->add_option("--top-n", grid_top_n, "Vocabulary caps to try (N = no cap)");
    grid->add_option("--C", spec.c, "C values to try");
    grid->add_option("--class-weight", grid_weights, "Class weightings to try");
    grid_pre.add(grid);

    // cv
    auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
    std::string cv_in, cv_out, cv_task = "1", cv_weight = "balanced", cv_top_n = "10000";
    double cv_c = 0.82;
    int cv_ngrams = 2;
    std::size_t folds = 5;
    PreprocessFlags cv_pre;
    cv->add_option("--input", cv_in, "Labeled tweets")->required()->check(CLI::ExistingFile);
    cv->add_option("--out", cv_out, "Metrics JSON (folds and mean)");
    cv->add_option("--task", cv_task, "1, 2 or fine")->capture_default_str();
    cv->add_option("--k", folds, "Number of folds")->capture_default_str();
    cv->add_option("--C", cv_c, "SVM regularization parameter")->capture_default_str();
    cv->add_option("--ngrams", cv_ngrams, "Largest n-gram order")->capture_default_str()->check(CLI::Range(1, 2));
    cv->add_option("--top-n", cv_top_n, "Vocabulary cap or N")->capture_default_str();
    cv->add_option("--class-weight", cv_weight, "balanced or none")->capture_default_str();
    cv_pre.add(cv);

    // eval
    auto* ev = app.add_subcommand("eval", "Evaluate a model, a prediction file or a majority fixture");
    std::string ev_model, ev_input, ev_preds, ev_fixture, ev_out, ev_confusion, ev_split = "test", ev_task = "1";
    std::string ev_majority_label;
    auto* ev_model_opt = ev->add_option("--model", ev_model, "Trained model file")->check(CLI::ExistingFile);
    ev->add_option("--input", ev_input, "Labeled split to score")->check(CLI::ExistingFile);
    auto* ev_preds_opt =
        ev->add_option("--predictions", ev_preds, "External predictions CSV (id,label)")->check(CLI::ExistingFile);
    auto* ev_fixture_opt = ev->add_option("--majority-fixture", ev_fixture, "Class-count fixture JSON")
                               ->check(CLI::ExistingFile);
    ev->add_option("--majority-label", ev_majority_label, "Constant label (default: most frequent class)");
    ev->add_option("--task", ev_task, "Level for --predictions: 1, 2 or fine")->capture_default_str();
    ev->add_option("--split", ev_split, "Split name recorded in the report")->capture_default_str();
    ev->add_option("--out", ev_out, "Metrics JSON");
    ev->add_option("--confusion", ev_confusion, "Confusion matrix CSV");
    ev_model_opt->excludes(ev_preds_opt)->excludes(ev_fixture_opt);
    ev_preds_opt->excludes(ev_fixture_opt);

    // predict
    auto* pr = app.add_subcommand("predict", "Label tweets with a trained model");
    std::string pr_model, pr_in, pr_out, pr_name;
    pr->add_option("--model", pr_model, "Trained model file")->required()->check(CLI::ExistingFile);
    pr->add_option("--input", pr_in, "Tweets (JSON lines)")->required()->check(CLI::ExistingFile);
    pr->add_option("--output", pr_out, "Predictions CSV")->required();
    pr->add_option("--name", pr_name, "Model name recorded with the predictions");

    // kappa
    auto* kp = app.add_subcommand("kappa", "Cohen's kappa between two label files");
    std::string kp_a, kp_b, kp_level = "1", kp_exclude;
    std::size_t kp_boot = 0;
    kp->add_option("--a", kp_a, "First rater CSV (id,label)")->required()->check(CLI::ExistingFile);
    kp->add_option("--b", kp_b, "Second rater CSV (id,label)")->required()->check(CLI::ExistingFile);
    kp->add_option("--level", kp_level, "Level of the files and of the comparison")->capture_default_str();
    kp->add_option("--exclude", kp_exclude, "Drop items where either rater used this class");
    kp->add_option("--bootstrap", kp_boot, "Bootstrap replicates for a percentile CI (0 = off)");

    // volumes
    auto* vol = app.add_subcommand("volumes", "Daily shares and recall-adjusted prevalence");
    std::string vol_preds, vol_tweets, vol_out, vol_recalls, vol_plot, vol_level = "1";
    vol->add_option("--predictions", vol_preds, "Predictions CSV")->required()->check(CLI::ExistingFile);
    vol->add_option("--tweets", vol_tweets, "Tweets with dates")->check(CLI::ExistingFile);
    vol->add_option("--level", vol_level, "Level of the predictions")->capture_default_str();
    vol->add_option("--out", vol_out, "Daily series CSV");
    vol->add_option("--recalls", vol_recalls, "Metrics JSON whose per-class recalls adjust the shares")
        ->check(CLI::ExistingFile);
    vol->add_option("--plot", vol_plot, "SVG chart of the daily series");

    // peaks
    auto* pk = app.add_subcommand("peaks", "Largest daily peaks per category");
    std::string pk_preds, pk_tweets, pk_out, pk_level = "1";
    std::vector<std::string> pk_categories;
    std::size_t pk_k = 5;
    int pk_sep = 7;
    pk->add_option("--predictions", pk_preds, "Predictions CSV")->required()->check(CLI::ExistingFile);
    pk->add_option("--tweets", pk_tweets, "Tweets with dates")->required()->check(CLI::ExistingFile);
    pk->add_option("--level", pk_level, "Level of the predictions")->capture_default_str();
    pk->add_option("--category", pk_categories, "Categories to scan (default: all)");
    pk->add_option("-k,--top", pk_k, "Peaks per category")->capture_default_str()->check(CLI::PositiveNumber);
    pk->add_option("--min-separation", pk_sep, "Minimum days between peaks")->capture_default_str();
    pk->add_option("--out", pk_out, "Peak report CSV");

    // frequencies
    auto* fq = app.add_subcommand("frequencies", "Category distribution of a labeled or predicted set");
    std::string fq_labeled, fq_preds, fq_level = "fine", fq_pred_level = "1";
    auto* fq_l = fq->add_option("--labeled", fq_labeled, "Labeled tweets")->check(CLI::ExistingFile);
    auto* fq_p = fq->add_option("--predictions", fq_preds, "Predictions CSV")->check(CLI::ExistingFile);
    fq->add_option("--level", fq_level, "Level to report")->capture_default_str();
    fq->add_option("--predictions-level", fq_pred_level, "Level of the prediction file")->capture_default_str();
    fq_l->excludes(fq_p);

    // serve
    auto* sv = app.add_subcommand("serve", "Run the annotation service");
    std::string sv_host = "127.0.0.1", sv_journal = "labels.jsonl", sv_pool, sv_keywords = "data/category_keywords.json";
    int sv_port = 8080;
    std::vector<std::string> sv_preds;
    sv->add_option("--host", sv_host, "Bind address")->capture_default_str();
    sv->add_option("--port", sv_port, "Port")->capture_default_str();
    sv->add_option("--journal", sv_journal, "Append-only label store")->capture_default_str();
    sv->add_option("--pool", sv_pool, "Tweets available for rounds")->required()->check(CLI::ExistingFile);
    sv->add_option("--category-keywords", sv_keywords, "Keyword lists for keyword-seeded rounds")
        ->capture_default_str();
    sv->add_option("--predictions", sv_preds, "name=path prediction sets for model-seeded rounds");

    std::string command = "papageno";
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (g.json && e.get_exit_code() != 0) {
            std::cout << json{{"error", e.what()}, {"kind", "usage"}}.dump() << '\n';
            return e.get_exit_code();
        }
        return app.exit(e);
    }

#ifdef _OPENMP
    if (g.workers > 0) omp_set_num_threads(g.workers);
#endif

    try {
        if (ingest->parsed()) {
            command = "ingest";
            const auto config = corpus::load_filter_config(keywords, exclusions);
            corpus::FilterOptions opt;
            opt.keep_retweets = keep_retweets;
            if (!date_from.empty()) opt.date_from = parse_date(date_from);
            if (!date_to.empty()) opt.date_to = parse_date(date_to);
            const auto r = pipeline::ingest(in_path, out_path, config, opt);
            print_warnings(r.warnings);
            const auto& s = r.stats;
            std::ostringstream os;
            os << "input            " << s.input << "\nafter keywords   " << s.after_keywords
               << "\nafter exclusions " << s.after_exclusions << "\nafter retweets   " << s.after_retweets
               << "\nafter dedupe     " << s.after_dedupe << "\nafter dates      " << s.after_dates
               << "\nskipped lines    " << r.skipped << '\n';
            emit(g, pipeline::to_json(r), os.str());
        } else if (split->parsed()) {
            command = "split";
            corpus::SplitRatios sr{ratios[0], ratios[1], ratios[2]};
            const auto parts = pipeline::split(split_in, split_dir, g.seed, parse_task(split_level), sr);
            json j{{"train", parts.train.size()},
                   {"validation", parts.validation.size()},
                   {"test", parts.test.size()},
                   {"seed", g.seed}};
            emit(g, j,
                 "train " + std::to_string(parts.train.size()) + ", validation " +
                     std::to_string(parts.validation.size()) + ", test " + std::to_string(parts.test.size()) + '\n');
        } else if (train->parsed()) {
            command = "train";
            const auto level = parse_task(task);
            models::TextClassifier model =
                majority ? pipeline::train_majority(train_in, level, pre.config())
                         : [&] {
                               models::SvmConfig cfg;
                               cfg.c = c_value;
                               cfg.class_weight = models::parse_class_weight(class_weight);
                               cfg.features = {ngrams, parse_top_n(top_n)};
                               return pipeline::train_svm(train_in, level, cfg, pre.config(), g.seed);
                           }();
            model.save(model_out);
            json j{{"model", model_out}, {"kind", model.is_majority() ? "majority" : "svm"},
                   {"level", std::string(to_string(level))}};
            std::string text = "wrote " + model_out;
            if (!model.is_majority()) {
                j["vocabulary"] = model.tfidf().size();
                j["config"] = model.svm_config()->describe();
                text += " (" + model.svm_config()->describe() + ", " + std::to_string(model.tfidf().size()) +
                        " terms)";
            }
            emit(g, j, text + '\n');
        } else if (grid->parsed()) {
            command = "gridsearch";
            const auto level = parse_task(grid_task);
            if (!grid_top_n.empty()) {
                spec.top_n.clear();
                for (const auto& t : grid_top_n) spec.top_n.push_back(parse_top_n(t));
            }
            if (!grid_weights.empty()) {
                spec.class_weight.clear();
                for (const auto& w : grid_weights) spec.class_weight.push_back(models::parse_class_weight(w));
            }
            const auto cfg = grid_pre.config();
            const auto tr = pipeline::prepare(corpus::load_labeled(grid_train), level, cfg);
            const auto va = pipeline::prepare(corpus::load_labeled(grid_val), level, cfg);
            models::SolverOptions solver;
            solver.seed = g.seed;
            const auto configs = spec.expand();
#ifdef _OPENMP
            const int workers = g.workers > 0 ? g.workers : omp_get_max_threads();
#else
            const int workers = 1;
#endif
            const auto result = models::grid_search(tr.docs, tr.labels, va.docs, va.labels, level_classes(level),
                                                    configs, solver, workers);
            std::ofstream out(grid_csv);
            if (!out) throw IoError("cannot write " + grid_csv);
            models::write_grid_csv(out, result);
            const auto& best = result.ranked.front();
            json bj{{"C", best.config.c},
                    {"ngram_max", best.config.features.ngram_max},
                    {"top_n", best.config.features.top_n ? json(*best.config.features.top_n) : json("N")},
                    {"class_weight", std::string(models::to_string(best.config.class_weight))},
                    {"kernel", result.kernel},
                    {"validation_macro_f1", best.validation->f1}};
            if (!grid_best.empty()) pipeline::write_json(grid_best, bj);
            emit(g, bj,
                 "best: " + best.config.describe() + " macro F1 " + fmt(best.validation->f1, 4) + " (" +
                     std::to_string(configs.size()) + " configs)\n");
        } else if (cv->parsed()) {
            command = "cv";
            const auto level = parse_task(cv_task);
            const auto data = pipeline::prepare(corpus::load_labeled(cv_in), level, cv_pre.config());
            models::SvmConfig cfg;
            cfg.c = cv_c;
            cfg.class_weight = models::parse_class_weight(cv_weight);
            cfg.features = {cv_ngrams, parse_top_n(cv_top_n)};
            models::SolverOptions solver;
            solver.seed = g.seed;
            auto result = models::cross_validate(data.docs, data.labels, level_classes(level), cfg, folds, g.seed,
                                                 solver);
            for (auto& f : result.folds) f.meta.task = std::string(to_string(level));
            result.mean.meta.task = std::string(to_string(level));
            json j{{"folds", json::array()}, {"mean", eval::to_json(result.mean)}};
            for (const auto& f : result.folds) j["folds"].push_back(eval::to_json(f));
            if (!cv_out.empty()) pipeline::write_json(cv_out, j);
            std::vector<eval::MetricsReport> all = result.folds;
            all.push_back(result.mean);
            emit(g, j, eval::format_table(all));
        } else if (ev->parsed()) {
            command = "eval";
            eval::MetricsReport report;
            if (!ev_fixture.empty()) {
                const auto d = pipeline::load_distribution(ev_fixture);
                std::string label = ev_majority_label;
                if (label.empty()) {
                    std::vector<std::string> labels;
                    for (const auto& [c, n] : d.counts) labels.insert(labels.end(), n, c);
                    label = models::train_majority(labels, level_classes(d.level)).label();
                }
                report = pipeline::evaluate_constant(d.counts, label, d.level);
            } else if (!ev_model.empty()) {
                if (ev_input.empty()) throw ValidationError("input", "--input is required with --model");
                const auto model = models::TextClassifier::load(ev_model);
                report = pipeline::evaluate(model, ev_input, model.is_majority() ? "majority" : "tfidf_svm", ev_split);
            } else if (!ev_preds.empty()) {
                if (ev_input.empty()) throw ValidationError("input", "--input is required with --predictions");
                const auto level = parse_task(ev_task);
                const auto preds = load_external_predictions(ev_preds, level);
                const auto set = corpus::load_labeled(ev_input);
                std::vector<std::string> predicted;
                for (const auto& e : set.entries) predicted.push_back(preds.at(e.tweet.id));
                report = eval::evaluate(set.labels(level), predicted, level_classes(level),
                                        {preds.model, std::string(to_string(level)), ev_split, std::nullopt,
                                         std::nullopt});
            } else {
                throw ValidationError("eval", "one of --model, --predictions or --majority-fixture is required");
            }
            if (!ev_out.empty()) pipeline::write_json(ev_out, eval::to_json(report));
            if (!ev_confusion.empty() && report.confusion) {
                std::ofstream out(ev_confusion);
                if (!out) throw IoError("cannot write " + ev_confusion);
                eval::write_confusion_csv(out, *report.confusion);
            }
            emit(g, eval::to_json(report), eval::format_table(std::span(&report, 1)) + '\n' +
                                               eval::format_class_table(report));
        } else if (pr->parsed()) {
            command = "predict";
            const auto model = models::TextClassifier::load(pr_model);
            const auto loaded = corpus::load_tweets(pr_in);
            print_warnings(loaded.warnings);
            const auto name = pr_name.empty() ? fs::path(pr_model).stem().string() : pr_name;
            const auto preds = pipeline::predict(model, loaded.tweets, name);
            std::ofstream out(pr_out);
            if (!out) throw IoError("cannot write " + pr_out);
            write_predictions(out, preds);
            emit(g, {{"predictions", preds.size()}, {"output", pr_out}},
                 "wrote " + std::to_string(preds.size()) + " predictions to " + pr_out + '\n');
        } else if (kp->parsed()) {
            command = "kappa";
            const auto level = parse_task(kp_level);
            const auto a = load_external_predictions(kp_a, level);
            const auto b = load_external_predictions(kp_b, level);
            if (!kp_exclude.empty() && !is_label_at(kp_exclude, level)) {
                throw ValidationError("exclude", "'" + kp_exclude + "' is not a class at this level");
            }
            std::vector<std::string> xa, xb;
            for (const auto& id : a.order) {
                if (!b.contains(id)) continue;
                const auto& la = a.at(id);
                const auto& lb = b.at(id);
                if (!kp_exclude.empty() && (la == kp_exclude || lb == kp_exclude)) continue;
                xa.push_back(la);
                xb.push_back(lb);
            }
            if (xa.size() < 2) throw Error("fewer than 2 items rated by both files");
            const auto k = eval::cohens_kappa(xa, xb);
            auto j = eval::to_json(k);
            std::string text = "kappa " + fmt(k.kappa, 3) + " (95% CI " + fmt(k.ci.low, 3) + "-" +
                               fmt(k.ci.high, 3) + "), n=" + std::to_string(k.n) + '\n';
            if (kp_boot > 0) {
                const auto ci = eval::kappa_bootstrap_ci(xa, xb, kp_boot, g.seed);
                j["bootstrap_ci"] = {ci.low, ci.high};
                text += "bootstrap CI " + fmt(ci.low, 3) + "-" + fmt(ci.high, 3) + '\n';
            }
            emit(g, j, text);
        } else if (vol->parsed()) {
            command = "volumes";
            const auto level = parse_task(vol_level);
            const auto preds = load_external_predictions(vol_preds, level);
            json j;
            std::ostringstream text;
            const auto freq = signal::category_frequencies(preds, level);
            j["shares"] = json::object();
            for (const auto& [c, s] : freq) {
                j["shares"][c] = s;
                text << c << ' ' << fmt(s) << "%\n";
            }
            if (!vol_recalls.empty()) {
                const auto recalls = pipeline::recalls_from_report(vol_recalls);
                std::vector<std::pair<std::string, double>> relevant;
                std::string residual_class;
                for (const auto& [c, s] : freq) {
                    if (c == "irrelevant" || c == "off_topic") {
                        residual_class = c;
                        continue;
                    }
                    relevant.emplace_back(c, s);
                }
                const auto est = signal::recall_adjust(relevant, recalls);
                print_warnings(est.warnings);
                text << "recall-adjusted:\n";
                for (const auto& a : est.relevant) {
                    j["adjusted"][a.category] = {{"raw", a.raw}, {"recall", a.recall}, {"adjusted", a.adjusted}};
                    text << a.category << ' ' << fmt(a.adjusted) << "% (raw " << fmt(a.raw) << "%, recall "
                         << fmt(a.recall) << ")\n";
                }
                j["residual"] = {{"class", residual_class}, {"share", est.residual}, {"clamped", est.residual_clamped}};
                text << residual_class << " (residual) " << fmt(est.residual) << "%\n";
            }
            if (!vol_out.empty() || !vol_plot.empty()) {
                if (vol_tweets.empty()) throw ValidationError("tweets", "--tweets is required for daily output");
                const auto tweets = corpus::load_tweets(vol_tweets);
                const auto series = signal::daily_shares(preds, tweets.tweets, level_classes(level));
                if (!vol_out.empty()) {
                    std::ofstream out(vol_out);
                    if (!out) throw IoError("cannot write " + vol_out);
                    signal::write_daily_csv(out, series);
                }
                if (!vol_plot.empty()) {
                    std::ofstream out(vol_plot);
                    if (!out) throw IoError("cannot write " + vol_plot);
                    signal::write_svg_chart(out, series, "Daily share of tweets per category");
                }
                j["days"] = series.rows.size();
            }
            emit(g, j, text.str());
        } else if (pk->parsed()) {
            command = "peaks";
            const auto level = parse_task(pk_level);
            const auto preds = load_external_predictions(pk_preds, level);
            const auto tweets = corpus::load_tweets(pk_tweets);
            const auto series = signal::daily_shares(preds, tweets.tweets, level_classes(level));
            const auto cats = pk_categories.empty() ? level_classes(level) : pk_categories;
            std::map<std::string, std::vector<signal::Peak>> peaks;
            json j = json::object();
            std::ostringstream text;
            for (const auto& c : cats) {
                peaks[c] = signal::detect_peaks(series, c, pk_k, pk_sep);
                j[c] = json::array();
                for (const auto& p : peaks[c]) {
                    j[c].push_back({{"date", format_date(p.date)}, {"share", p.share}});
                    text << c << ' ' << format_date(p.date) << ' ' << fmt(p.share) << "%\n";
                }
            }
            if (!pk_out.empty()) {
                std::ofstream out(pk_out);
                if (!out) throw IoError("cannot write " + pk_out);
                signal::write_peaks_csv(out, peaks, cats);
            }
            emit(g, j, text.str());
        } else if (fq->parsed()) {
            command = "frequencies";
            const auto level = parse_task(fq_level);
            std::vector<std::pair<std::string, double>> freq;
            if (!fq_labeled.empty()) {
                freq = signal::category_frequencies(corpus::load_labeled(fq_labeled), level);
            } else if (!fq_preds.empty()) {
                freq = signal::category_frequencies(load_external_predictions(fq_preds, parse_task(fq_pred_level)),
                                                    level);
            } else {
                throw ValidationError("frequencies", "one of --labeled or --predictions is required");
            }
            json j = json::object();
            std::ostringstream text;
            for (const auto& [c, s] : freq) {
                j[c] = s;
                text << c << ' ' << fmt(s) << "%\n";
            }
            emit(g, j, text.str());
        } else if (sv->parsed()) {
            command = "serve";
            annotate::ServiceContext ctx;
            const auto pool = corpus::load_tweets(sv_pool);
            print_warnings(pool.warnings);
            ctx.pool = pool.tweets;
            if (fs::exists(sv_keywords)) ctx.keywords = annotate::load_category_keywords(sv_keywords);
            for (const auto& spec_str : sv_preds) {
                const auto eq = spec_str.find('=');
                if (eq == std::string::npos) throw ValidationError("predictions", "expected name=path");
                const auto name = spec_str.substr(0, eq);
                const auto path = spec_str.substr(eq + 1);
                // prediction files may be at any level; try the finer ones first
                std::optional<PredictionSet> set;
                std::string last_error;
                for (auto level : {Level::fine, Level::task1, Level::task2}) {
                    try {
                        set = load_external_predictions(path, level, name);
                        break;
                    } catch (const Error& e) {
                        last_error = e.what();
                    }
                }
                if (!set) throw Error("cannot load predictions " + path + ": " + last_error);
                ctx.predictions.emplace(name, std::move(*set));
            }
            annotate::LabelStore store(sv_journal);
            annotate::AnnotationService service(store, std::move(ctx));
            g_service = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "serving /api/v1 on http://" << sv_host << ':' << sv_port << '\n';
            if (!service.listen(sv_host, sv_port)) throw Error("cannot listen on " + sv_host + ":" + std::to_string(sv_port));
        }
    } catch (const std::exception& e) {
        if (g.json) {
            json j{{"error", e.what()}, {"command", command}};
            if (const auto* v = dynamic_cast<const ValidationError*>(&e)) j["field"] = v->field();
            std::cout << j.dump() << '\n';
        } else {
            std::cerr << "error: " << e.what() << '\n';
        }
        return 1;
    }
    return 0;
}
