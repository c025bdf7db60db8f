#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "papageno/taxonomy.hpp"

namespace papageno {

// Per-tweet labels from one model run, keyed by tweet id. `order` keeps the
// file order so that written files are reproducible.
struct PredictionSet {
    std::string model;
    Level level = Level::task1;
    std::map<std::string, std::string> labels;
    std::vector<std::string> order;

    void add(const std::string& id, const std::string& label);  // throws on duplicate id
    const std::string& at(const std::string& id) const;         // throws naming the id
    bool contains(const std::string& id) const { return labels.contains(id); }
    std::size_t size() const { return labels.size(); }
};

// CSV with header `id,label`. Unknown labels (for `level`) and duplicate ids
// are errors naming the row.
PredictionSet load_external_predictions(const std::filesystem::path& path, Level level,
                                        std::string model_name = {});
PredictionSet read_predictions(std::istream& in, Level level, std::string model_name = {});
void write_predictions(std::ostream& out, const PredictionSet& set);

}  // namespace papageno
