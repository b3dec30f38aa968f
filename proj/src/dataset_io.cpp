#include "hwrec/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

namespace hwrec {

using nlohmann::json;

namespace {

Character character_from_json(const json& j, std::size_t line_no) {
    Character c;
    if (!j.contains("strokes") || !j["strokes"].is_array()) {
        throw DataError("missing 'strokes' array at line " + std::to_string(line_no));
    }
    for (const auto& js : j["strokes"]) {
        if (!js.is_array()) {
            throw DataError("stroke is not an array at line " + std::to_string(line_no));
        }
        Stroke s;
        for (const auto& jp : js) {
            if (!jp.is_array() || jp.size() != 2 || !jp[0].is_number() || !jp[1].is_number()) {
                throw DataError("point is not a [x,y] pair at line " + std::to_string(line_no));
            }
            Point p{jp[0].get<double>(), jp[1].get<double>()};
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
                throw DataError("non-finite coordinate at line " + std::to_string(line_no));
            }
            s.points.push_back(p);
        }
        if (s.points.empty()) {
            throw DataError("empty stroke at line " + std::to_string(line_no));
        }
        c.strokes.push_back(std::move(s));
    }
    if (c.strokes.empty()) {
        throw DataError("character with no strokes at line " + std::to_string(line_no));
    }
    if (j.contains("preprocessed")) c.preprocessed = j["preprocessed"].get<bool>();
    if (j.contains("spans")) {
        const auto& sp = j["spans"];
        if (!sp.is_array() || sp.size() != 2) {
            throw DataError("'spans' must be [span_x, span_y] at line " + std::to_string(line_no));
        }
        c.span_x = sp[0].get<double>();
        c.span_y = sp[1].get<double>();
    }
    return c;
}

json character_to_json(const Character& c, const std::string& label) {
    json j;
    j["label"] = label;
    json strokes = json::array();
    for (const auto& s : c.strokes) {
        json stroke = json::array();
        for (const auto& p : s.points) stroke.push_back(json::array({p.x, p.y}));
        strokes.push_back(std::move(stroke));
    }
    j["strokes"] = std::move(strokes);
    if (c.preprocessed) {
        j["preprocessed"] = true;
        j["spans"] = json::array({c.span_x, c.span_y});
    }
    return j;
}

} // namespace

Dataset parse_dataset(const std::string& path, Role role) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file '" + path + "'");

    Dataset ds;
    ds.role = role;
    std::unordered_map<std::string, int> index_of; // label name -> 0-based class index

    std::string line;
    std::size_t line_no = 0;
    std::size_t samples = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("malformed line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.contains("label") || !j["label"].is_string()) {
            throw DataError("missing string 'label' at line " + std::to_string(line_no));
        }
        const std::string label = j["label"].get<std::string>();
        Character c = character_from_json(j, line_no);

        auto it = index_of.find(label);
        int idx;
        if (it == index_of.end()) {
            idx = static_cast<int>(ds.classes.size());
            index_of.emplace(label, idx);
            ds.label_names.push_back(label);
            ds.classes.emplace_back();
        } else {
            idx = it->second;
        }
        ds.classes[static_cast<std::size_t>(idx)].push_back(std::move(c));
        ++samples;
    }
    if (samples == 0) throw DataError("dataset file '" + path + "' contains no samples");
    if (role == Role::train) {
        for (std::size_t k = 0; k < ds.classes.size(); ++k) {
            if (ds.classes[k].empty()) {
                throw DataError("training class '" + ds.label_names[k] + "' has no samples");
            }
        }
    }
    return ds;
}

void write_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    for (std::size_t k = 0; k < ds.classes.size(); ++k) {
        for (const auto& c : ds.classes[k]) {
            out << character_to_json(c, ds.label_names[k]).dump() << '\n';
        }
    }
    if (!out) throw DataError("write to '" + path + "' failed");
}

} // namespace hwrec
