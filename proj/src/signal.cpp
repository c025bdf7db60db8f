#include "papageno/signal.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "papageno/csv.hpp"
#include "papageno/error.hpp"
#include "papageno/timeutil.hpp"

namespace papageno::signal {

namespace {

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

const char* const kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02",
                                "#a6761d", "#666666", "#1f78b4", "#b2df8a", "#fb9a99", "#cab2d6"};

}  // namespace

std::size_t DailySeries::index_of(const std::string& category) const {
    auto it = std::find(categories.begin(), categories.end(), category);
    if (it == categories.end()) throw Error("unknown category '" + category + "'");
    return static_cast<std::size_t>(it - categories.begin());
}

DailySeries daily_shares(const PredictionSet& predictions, const corpus::TweetSet& tweets,
                         const std::vector<std::string>& categories) {
    std::unordered_map<std::string, const corpus::Tweet*> by_id;
    for (const auto& t : tweets) by_id.emplace(t.id, &t);

    DailySeries series;
    series.categories = categories;
    std::map<std::chrono::sys_days, DailyRow> days;
    for (const auto& id : predictions.order) {
        auto it = by_id.find(id);
        if (it == by_id.end() || !it->second->timestamp) {
            throw Error("no date for predicted tweet " + id);
        }
        const auto day = std::chrono::floor<std::chrono::days>(*it->second->timestamp);
        auto& row = days[day];
        if (row.counts.empty()) {
            row.date = day;
            row.counts.assign(categories.size(), 0);
        }
        row.counts[series.index_of(predictions.at(id))] += 1;
        row.total += 1;
    }
    for (auto& [day, row] : days) {
        row.shares.resize(row.counts.size());
        for (std::size_t c = 0; c < row.counts.size(); ++c) {
            row.shares[c] = 100.0 * static_cast<double>(row.counts[c]) / static_cast<double>(row.total);
        }
        series.rows.push_back(std::move(row));
    }
    return series;
}

void write_daily_csv(std::ostream& out, const DailySeries& series) {
    std::vector<std::string> header{"date", "total"};
    header.insert(header.end(), series.categories.begin(), series.categories.end());
    csv::write_row(out, header);
    for (const auto& row : series.rows) {
        std::vector<std::string> fields{format_date(row.date), std::to_string(row.total)};
        for (double s : row.shares) fields.push_back(fixed(s, 4));
        csv::write_row(out, fields);
    }
}

PrevalenceEstimate recall_adjust(const std::vector<std::pair<std::string, double>>& raw_shares,
                                 const std::map<std::string, double>& recalls) {
    PrevalenceEstimate est;
    double sum = 0.0;
    for (const auto& [category, raw] : raw_shares) {
        if (raw < 0.0) throw ValidationError(category, "raw share must be >= 0");
        auto it = recalls.find(category);
        if (it == recalls.end()) throw ValidationError(category, "no recall given");
        const double r = it->second;
        if (!(r > 0.0) || r > 1.0) {
            throw ValidationError(category, "recall must be in (0, 1], got " + std::to_string(r));
        }
        AdjustedShare a{category, raw, r, raw / r};
        sum += a.adjusted;
        est.relevant.push_back(a);
    }
    est.residual = 100.0 - sum;
    if (est.residual < 0.0) {
        est.warnings.push_back("adjusted relevant shares sum to " + fixed(sum, 2) +
                               "%, above 100; residual clamped to 0");
        est.residual = 0.0;
        est.residual_clamped = true;
    }
    return est;
}

std::vector<Peak> detect_peaks(const DailySeries& series, const std::string& category, std::size_t k,
                               int min_separation_days) {
    if (series.rows.empty()) throw Error("detect_peaks: empty series");
    if (k == 0) throw ValidationError("k", "must be >= 1");
    const auto c = series.index_of(category);
    const auto& rows = series.rows;
    const std::size_t n = rows.size();

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        if (n == 1) break;
        const double v = rows[i].shares[c];
        const bool left = i == 0 || v > rows[i - 1].shares[c];
        const bool right = i + 1 == n || v > rows[i + 1].shares[c];
        if (left && right) candidates.push_back(i);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return rows[a].shares[c] > rows[b].shares[c]; });

    std::vector<Peak> peaks;
    for (std::size_t i : candidates) {
        if (peaks.size() == k) break;
        const bool far = std::all_of(peaks.begin(), peaks.end(), [&](const Peak& p) {
            return std::abs((rows[i].date - p.date).count()) >= min_separation_days;
        });
        if (far) peaks.push_back({rows[i].date, rows[i].shares[c]});
    }
    return peaks;
}

void write_peaks_csv(std::ostream& out, const std::map<std::string, std::vector<Peak>>& peaks,
                     const std::vector<std::string>& category_order) {
    csv::write_row(out, {"category", "date", "share", "rank"});
    for (const auto& category : category_order) {
        auto it = peaks.find(category);
        if (it == peaks.end()) continue;
        std::size_t rank = 0;
        for (const auto& p : it->second) {
            csv::write_row(out, {category, format_date(p.date), fixed(p.share, 4), std::to_string(++rank)});
        }
    }
}

std::vector<std::pair<std::string, double>> category_frequencies(std::span<const std::string> labels,
                                                                 Level level) {
    if (labels.empty()) throw Error("category_frequencies: empty set");
    const auto& classes = level_classes(level);
    std::map<std::string, std::size_t> counts;
    for (const auto& l : labels) counts[map_label(l, level)] += 1;
    std::vector<std::pair<std::string, double>> out;
    for (const auto& c : classes) {
        out.emplace_back(c, 100.0 * static_cast<double>(counts[c]) / static_cast<double>(labels.size()));
    }
    return out;
}

std::vector<std::pair<std::string, double>> category_frequencies(const corpus::LabeledSet& set, Level level) {
    const auto labels = set.labels(level);
    return category_frequencies(labels, level);
}

std::vector<std::pair<std::string, double>> category_frequencies(const PredictionSet& set, Level level) {
    std::vector<std::string> labels;
    labels.reserve(set.order.size());
    for (const auto& id : set.order) labels.push_back(set.at(id));
    return category_frequencies(labels, level);
}

void write_svg_chart(std::ostream& out, const DailySeries& series, const std::string& title) {
    constexpr double width = 960, height = 420, left = 60, right = 200, top = 40, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    double ymax = 1.0;
    for (const auto& r : series.rows) {
        for (double s : r.shares) ymax = std::max(ymax, s);
    }
    ymax = std::ceil(ymax / 10.0) * 10.0;
    const std::size_t n = series.rows.size();
    auto x_at = [&](std::size_t i) { return left + (n <= 1 ? plot_w / 2 : plot_w * double(i) / double(n - 1)); };
    auto y_at = [&](double v) { return top + plot_h * (1.0 - v / ymax); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        out << "<text x=\"" << left << "\" y=\"22\" font-size=\"14\">" << title << "</text>\n";
    }
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = ymax * t / 4.0;
        out << "<text x=\"" << left - 6 << "\" y=\"" << y_at(v) + 4 << "\" text-anchor=\"end\">" << fixed(v, 0)
            << "%</text>\n";
    }
    if (n > 0) {
        for (std::size_t i : {std::size_t{0}, n - 1}) {
            out << "<text x=\"" << x_at(i) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
                << format_date(series.rows[i].date) << "</text>\n";
        }
    }
    for (std::size_t c = 0; c < series.categories.size(); ++c) {
        const char* colour = kPalette[c % std::size(kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            out << (i ? " " : "") << fixed(x_at(i), 1) << ',' << fixed(y_at(series.rows[i].shares[c]), 1);
        }
        out << "\"/>\n";
        const double ly = top + 14.0 * double(c);
        out << "<rect x=\"" << left + plot_w + 12 << "\" y=\"" << ly << "\" width=\"10\" height=\"10\" fill=\""
            << colour << "\"/>\n";
        out << "<text x=\"" << left + plot_w + 26 << "\" y=\"" << ly + 9 << "\">" << series.categories[c]
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace papageno::signal
