#include "papageno/predictions.hpp"

#include <fstream>

#include "papageno/csv.hpp"
#include "papageno/error.hpp"

namespace papageno {

void PredictionSet::add(const std::string& id, const std::string& label) {
    if (!labels.emplace(id, label).second) throw ValidationError("id", "duplicate id " + id);
    order.push_back(id);
}

const std::string& PredictionSet::at(const std::string& id) const {
    auto it = labels.find(id);
    if (it == labels.end()) {
        throw Error("missing prediction for id " + id + (model.empty() ? "" : " (model " + model + ")"));
    }
    return it->second;
}

PredictionSet read_predictions(std::istream& in, Level level, std::string model_name) {
    PredictionSet set;
    set.model = std::move(model_name);
    set.level = level;
    std::vector<std::string> row;
    if (!csv::read_row(in, row) || row.size() < 2 || row[0] != "id" || row[1] != "label") {
        throw ValidationError("header", "expected 'id,label'");
    }
    std::size_t rowno = 1;
    while (csv::read_row(in, row)) {
        ++rowno;
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 2) {
            throw ValidationError("row " + std::to_string(rowno), "expected 2 fields");
        }
        if (!is_label_at(row[1], level)) {
            throw ValidationError("row " + std::to_string(rowno),
                                  "unknown label '" + row[1] + "' for level " + std::string(to_string(level)));
        }
        if (set.contains(row[0])) {
            throw ValidationError("row " + std::to_string(rowno), "duplicate id " + row[0]);
        }
        set.add(row[0], row[1]);
    }
    return set;
}

PredictionSet load_external_predictions(const std::filesystem::path& path, Level level,
                                        std::string model_name) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    if (model_name.empty()) model_name = path.stem().string();
    return read_predictions(in, level, std::move(model_name));
}

void write_predictions(std::ostream& out, const PredictionSet& set) {
    csv::write_row(out, {"id", "label"});
    for (const auto& id : set.order) csv::write_row(out, {id, set.labels.at(id)});
}

}  // namespace papageno
