#include "lsp/predictions.hpp"

#include <fstream>
#include <sstream>

#include "lsp/diagnostics.hpp"
#include "json_util.hpp"

namespace lsp {

int binary_label(const PredictionRecord& record) {
    if (record.invalid) return 0;
    return record.label == "1" ? 1 : 0;
}

std::string predictions_to_jsonl(const PredictionSet& set) {
    std::string out;
    for (const auto& r : set.records) {
        nlohmann::json line;
        line["id"] = r.id;
        if (r.label == "0" || r.label == "1") {
            line["label"] = r.label == "1" ? 1 : 0;
        } else {
            line["label"] = r.label;
        }
        line["evidence"] = r.evidence;
        line["invalid"] = r.invalid;
        if (r.trace) line["trace"] = detail::trace_to_json_value(*r.trace);
        if (r.raw) line["raw"] = *r.raw;
        if (r.error) line["error"] = *r.error;
        out += line.dump();
        out += "\n";
    }
    return out;
}

void write_predictions(const std::string& path, const PredictionSet& set) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << predictions_to_jsonl(set);
    if (!out) throw IoError("failed writing '" + path + "'");
}

PredictionSet read_predictions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open predictions file '" + path + "'");

    PredictionSet set;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto where = path + ":" + std::to_string(line_no);
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw Error(where + ": not a JSON object");
        }
        PredictionRecord r;
        if (!j.contains("id")) throw Error(where + ": missing \"id\"");
        if (j["id"].is_string()) r.id = j["id"].get<std::string>();
        else if (j["id"].is_number_integer()) r.id = std::to_string(j["id"].get<std::int64_t>());
        else throw Error(where + ": \"id\" must be a string or integer");

        if (!j.contains("label")) throw Error(where + ": missing \"label\"");
        const auto& label = j["label"];
        if (label.is_number_integer()) {
            const auto v = label.get<std::int64_t>();
            if (v != 0 && v != 1) throw Error(where + ": label must be 0 or 1, got " +
                                              std::to_string(v));
            r.label = v ? "1" : "0";
        } else if (label.is_boolean()) {
            r.label = label.get<bool>() ? "1" : "0";
        } else if (label.is_string()) {
            r.label = label.get<std::string>();
        } else {
            throw Error(where + ": \"label\" must be an integer, boolean, or string");
        }

        if (j.contains("evidence") && j["evidence"].is_string()) {
            r.evidence = j["evidence"].get<std::string>();
        }
        if (j.contains("invalid")) {
            if (!j["invalid"].is_boolean()) throw Error(where + ": \"invalid\" must be boolean");
            r.invalid = j["invalid"].get<bool>();
        }
        if (j.contains("raw") && j["raw"].is_string()) r.raw = j["raw"].get<std::string>();
        if (j.contains("error") && j["error"].is_string()) {
            r.error = j["error"].get<std::string>();
            r.invalid = true;
        }
        set.records.push_back(std::move(r));
    }
    return set;
}

}  // namespace lsp
