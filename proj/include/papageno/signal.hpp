#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "papageno/corpus.hpp"
#include "papageno/predictions.hpp"
#include "papageno/taxonomy.hpp"

namespace papageno::signal {

struct DailyRow {
    std::chrono::sys_days date;
    std::size_t total = 0;
    std::vector<std::size_t> counts;  // parallel to DailySeries::categories
    std::vector<double> shares;       // percent
};

struct DailySeries {
    std::vector<std::string> categories;
    std::vector<DailyRow> rows;  // ascending by date, empty days omitted

    std::size_t index_of(const std::string& category) const;  // throws if unknown
};

// Groups predictions by UTC day of their tweet. Every prediction must have a
// tweet with a timestamp.
DailySeries daily_shares(const PredictionSet& predictions, const corpus::TweetSet& tweets,
                         const std::vector<std::string>& categories);

void write_daily_csv(std::ostream& out, const DailySeries& series);

struct AdjustedShare {
    std::string category;
    double raw = 0.0;
    double recall = 1.0;
    double adjusted = 0.0;
};

struct PrevalenceEstimate {
    std::vector<AdjustedShare> relevant;
    double residual = 0.0;      // 100 minus the adjusted relevant shares
    bool residual_clamped = false;
    std::vector<std::string> warnings;
};

// adjusted = raw / recall for each relevant category; the residual is the
// remaining share, clamped to 0 (with a warning) if negative.
PrevalenceEstimate recall_adjust(const std::vector<std::pair<std::string, double>>& raw_shares,
                                 const std::map<std::string, double>& recalls);

struct Peak {
    std::chrono::sys_days date;
    double share = 0.0;
};

// Strict local maxima (edges need only beat their one neighbour), picked
// greedily by share, pairwise at least `min_separation_days` apart.
std::vector<Peak> detect_peaks(const DailySeries& series, const std::string& category, std::size_t k = 5,
                               int min_separation_days = 7);

void write_peaks_csv(std::ostream& out, const std::map<std::string, std::vector<Peak>>& peaks,
                     const std::vector<std::string>& category_order);

// Percent of items per class at `level`; classes in level order.
std::vector<std::pair<std::string, double>> category_frequencies(std::span<const std::string> labels,
                                                                 Level level);
std::vector<std::pair<std::string, double>> category_frequencies(const corpus::LabeledSet& set, Level level);
std::vector<std::pair<std::string, double>> category_frequencies(const PredictionSet& set, Level level);

// Line chart with one series per category.
void write_svg_chart(std::ostream& out, const DailySeries& series, const std::string& title = {});

}  // namespace papageno::signal
