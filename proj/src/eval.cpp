#include "lsp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "lsp/diagnostics.hpp"
#include "lsp/stats.hpp"

namespace lsp {

namespace {

std::string id_from_json(const nlohmann::json& j, const std::string& where) {
    const auto& id = j.at("id");
    if (id.is_string()) return id.get<std::string>();
    if (id.is_number_integer()) return std::to_string(id.get<std::int64_t>());
    throw Error(where + ": \"id\" must be a string or integer");
}

// Aligns predictions to gold order; throws on any id mismatch.
std::vector<std::pair<int, int>> paired_labels(const std::vector<DatasetItem>& gold,
                                               const PredictionSet& pred) {
    std::map<std::string, int> by_id;
    std::string dupes;
    for (const auto& r : pred.records) {
        if (!by_id.emplace(r.id, binary_label(r)).second) {
            dupes += dupes.empty() ? r.id : ", " + r.id;
        }
    }
    if (!dupes.empty()) throw Error("duplicate prediction ids: " + dupes);

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(gold.size());
    std::string missing;
    for (const auto& item : gold) {
        auto it = by_id.find(item.id);
        if (it == by_id.end()) {
            missing += missing.empty() ? item.id : ", " + item.id;
            continue;
        }
        pairs.emplace_back(item.label, it->second);
        by_id.erase(it);
    }
    std::string extra;
    for (const auto& [id, _] : by_id) extra += extra.empty() ? id : ", " + id;
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "prediction ids do not match the dataset";
        if (!missing.empty()) msg += "; missing: " + missing;
        if (!extra.empty()) msg += "; unexpected: " + extra;
        throw Error(msg);
    }
    return pairs;
}

ConfusionCounts count_confusion(const std::vector<std::pair<int, int>>& pairs) {
    ConfusionCounts c;
    for (const auto& [gold, pred] : pairs) {
        if (gold == 1 && pred == 1) ++c.tp;
        else if (gold == 0 && pred == 1) ++c.fp;
        else if (gold == 1 && pred == 0) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double statistic_of(const ConfusionCounts& c, Statistic s) {
    const Metrics m = compute_metrics(c);
    switch (s) {
        case Statistic::accuracy: return m.accuracy;
        case Statistic::precision: return m.precision;
        case Statistic::recall: return m.recall;
        case Statistic::f1: return m.f1;
    }
    return 0.0;
}

double quantile(const std::vector<double>& sorted, double q) {
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

std::vector<DatasetItem> load_dataset(const std::string& path, int task) {
    if (task != 1 && task != 2) throw Error("task must be 1 or 2");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset file '" + path + "'");

    std::vector<DatasetItem> items;
    std::set<std::string> ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw Error(where + ": not a JSON object");

        static const std::set<std::string> task1_keys = {"id", "text", "label"};
        static const std::set<std::string> task2_keys = {"id", "text", "drug", "effect", "label"};
        const auto& allowed = task == 1 ? task1_keys : task2_keys;
        for (const auto& [key, _] : j.items()) {
            if (!allowed.count(key)) {
                throw Error(where + ": unexpected field \"" + key + "\" for task " +
                            std::to_string(task));
            }
        }
        for (const auto& key : allowed) {
            if (!j.contains(key)) throw Error(where + ": missing field \"" + key + "\"");
        }

        DatasetItem item;
        item.id = id_from_json(j, where);
        if (!ids.insert(item.id).second) throw Error(where + ": duplicate id " + item.id);
        if (!j["text"].is_string()) throw Error(where + ": \"text\" must be a string");
        item.text = j["text"].get<std::string>();
        if (!j["label"].is_number_integer()) {
            throw Error(where + ": \"label\" must be an integer 0 or 1");
        }
        const auto label = j["label"].get<std::int64_t>();
        if (label != 0 && label != 1) {
            throw Error(where + ": \"label\" must be 0 or 1, got " + std::to_string(label));
        }
        item.label = static_cast<int>(label);
        if (task == 2) {
            for (const char* key : {"drug", "effect"}) {
                if (!j[key].is_string() || j[key].get<std::string>().empty()) {
                    throw Error(where + ": \"" + key + "\" must be a non-empty string");
                }
            }
            item.drug = j["drug"].get<std::string>();
            item.effect = j["effect"].get<std::string>();
        }
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<TaskInstance> to_instances(const std::vector<DatasetItem>& items) {
    std::vector<TaskInstance> instances;
    instances.reserve(items.size());
    for (const auto& item : items) {
        instances.push_back({item.id, item.text, item.drug, item.effect, item.label});
    }
    return instances;
}

ConfusionCounts confusion(const std::vector<DatasetItem>& gold, const PredictionSet& pred) {
    return count_confusion(paired_labels(gold, pred));
}

Metrics compute_metrics(const ConfusionCounts& c) {
    const std::size_t n = c.total();
    if (n == 0) throw Error("metrics need at least one item");
    Metrics m;
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(n);
    m.precision = c.tp + c.fp == 0
                      ? 0.0
                      : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    m.recall = c.tp + c.fn == 0 ? 0.0
                                : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    m.f1 = m.precision + m.recall == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

std::string statistic_name(Statistic s) {
    switch (s) {
        case Statistic::accuracy: return "accuracy";
        case Statistic::precision: return "precision";
        case Statistic::recall: return "recall";
        case Statistic::f1: return "f1";
    }
    return "?";
}

BootstrapCI bootstrap_ci(const std::vector<DatasetItem>& gold, const PredictionSet& pred,
                         Statistic statistic, int resamples, double level, std::uint64_t seed) {
    if (gold.empty()) throw Error("bootstrap needs at least one item");
    if (resamples < 1) throw Error("resample count must be positive");
    if (level <= 0.0 || level >= 1.0) throw Error("confidence level must be in (0, 1)");

    const auto pairs = paired_labels(gold, pred);
    const std::size_t n = pairs.size();

    std::vector<double> stats(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        auto rng = resample_stream(seed, static_cast<std::uint64_t>(b));
        ConfusionCounts c;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& [g, p] = pairs[bounded_draw(rng, n)];
            if (g == 1 && p == 1) ++c.tp;
            else if (g == 0 && p == 1) ++c.fp;
            else if (g == 1 && p == 0) ++c.fn;
            else ++c.tn;
        }
        stats[static_cast<std::size_t>(b)] = statistic_of(c, statistic);
    }
    std::sort(stats.begin(), stats.end());

    BootstrapCI ci;
    ci.statistic = statistic;
    ci.point = statistic_of(count_confusion(pairs), statistic);
    const double alpha = 1.0 - level;
    ci.lower = quantile(stats, alpha / 2.0);
    ci.upper = quantile(stats, 1.0 - alpha / 2.0);
    ci.resamples = resamples;
    ci.seed = seed;
    return ci;
}

McNemarResult mcnemar(const std::vector<DatasetItem>& gold, const PredictionSet& pred_a,
                      const PredictionSet& pred_b) {
    const auto pairs_a = paired_labels(gold, pred_a);
    const auto pairs_b = paired_labels(gold, pred_b);

    McNemarResult r;
    for (std::size_t i = 0; i < pairs_a.size(); ++i) {
        const bool a_correct = pairs_a[i].second == pairs_a[i].first;
        const bool b_correct = pairs_b[i].second == pairs_b[i].first;
        if (!a_correct && b_correct) ++r.n01;
        else if (a_correct && !b_correct) ++r.n10;
    }
    const std::size_t discordant = r.n01 + r.n10;
    if (discordant == 0) {
        r.chi2 = 0.0;
        r.p_value = 1.0;
        return r;
    }
    const double diff =
        std::fabs(static_cast<double>(r.n01) - static_cast<double>(r.n10)) - 1.0;
    r.chi2 = diff * diff / static_cast<double>(discordant);
    r.p_value = chi2_p_value(r.chi2);
    return r;
}

MetricsReport build_report(const std::vector<PredictionSet>& runs,
                           const std::vector<DatasetItem>& gold, std::uint64_t seed,
                           int resamples) {
    MetricsReport report;
    report.seed = seed;
    report.resamples = resamples;

    std::vector<const PredictionSet*> ordered;
    ordered.reserve(runs.size());
    for (const auto& r : runs) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
        return std::tie(a->model, a->method) < std::tie(b->model, b->method);
    });

    for (const auto* run : ordered) {
        RunReport rr;
        rr.method = run->method;
        rr.model = run->model;
        rr.n = run->records.size();
        std::size_t invalid = 0;
        for (const auto& rec : run->records) invalid += rec.invalid ? 1 : 0;
        rr.invalid_rate = rr.n == 0 ? 0.0
                                    : static_cast<double>(invalid) / static_cast<double>(rr.n);
        rr.confusion = confusion(gold, *run);
        rr.point = compute_metrics(rr.confusion);
        for (Statistic s : {Statistic::accuracy, Statistic::precision, Statistic::recall,
                            Statistic::f1}) {
            rr.intervals.push_back(bootstrap_ci(gold, *run, s, resamples, 0.95, seed));
        }
        report.runs.push_back(std::move(rr));
    }

    for (std::size_t i = 0; i < ordered.size(); ++i) {
        for (std::size_t j = i + 1; j < ordered.size(); ++j) {
            McNemarPair pair;
            pair.a = ordered[i]->model + "/" + ordered[i]->method;
            pair.b = ordered[j]->model + "/" + ordered[j]->method;
            pair.result = mcnemar(gold, *ordered[i], *ordered[j]);
            report.pairs.push_back(std::move(pair));
        }
    }
    return report;
}

std::string report_to_json(const MetricsReport& report) {
    nlohmann::json j;
    j["seed"] = report.seed;
    j["resamples"] = report.resamples;
    j["runs"] = nlohmann::json::array();
    for (const auto& run : report.runs) {
        nlohmann::json metrics;
        for (const auto& ci : run.intervals) {
            metrics[statistic_name(ci.statistic)] = {
                {"point", ci.point}, {"lower", ci.lower}, {"upper", ci.upper}};
        }
        j["runs"].push_back({{"method", run.method},
                             {"model", run.model},
                             {"n", run.n},
                             {"invalid_rate", run.invalid_rate},
                             {"confusion",
                              {{"tp", run.confusion.tp},
                               {"fp", run.confusion.fp},
                               {"fn", run.confusion.fn},
                               {"tn", run.confusion.tn}}},
                             {"metrics", metrics}});
    }
    j["mcnemar"] = nlohmann::json::array();
    for (const auto& pair : report.pairs) {
        j["mcnemar"].push_back({{"a", pair.a},
                                {"b", pair.b},
                                {"n01", pair.result.n01},
                                {"n10", pair.result.n10},
                                {"chi2", pair.result.chi2},
                                {"p", pair.result.p_value}});
    }
    return j.dump(2) + "\n";
}

std::string report_to_table(const MetricsReport& report) {
    std::string out;
    char row[256];
    std::snprintf(row, sizeof row, "%-16s %-12s %6s %-22s %-22s %-22s %-22s %8s\n", "method",
                  "model", "n", "accuracy", "precision", "recall", "f1", "invalid");
    out += row;
    for (const auto& run : report.runs) {
        std::string cells[4];
        for (std::size_t i = 0; i < run.intervals.size() && i < 4; ++i) {
            const auto& ci = run.intervals[i];
            cells[i] = fmt("%.4f", ci.point) + " [" + fmt("%.4f", ci.lower) + ", " +
                       fmt("%.4f", ci.upper) + "]";
        }
        std::snprintf(row, sizeof row, "%-16s %-12s %6zu %-22s %-22s %-22s %-22s %8s\n",
                      run.method.c_str(), run.model.c_str(), run.n, cells[0].c_str(),
                      cells[1].c_str(), cells[2].c_str(), cells[3].c_str(),
                      fmt("%.4f", run.invalid_rate).c_str());
        out += row;
    }
    for (const auto& pair : report.pairs) {
        std::snprintf(row, sizeof row, "McNemar %s vs %s: n01=%zu n10=%zu chi2=%s p=%s\n",
                      pair.a.c_str(), pair.b.c_str(), pair.result.n01, pair.result.n10,
                      fmt("%.6f", pair.result.chi2).c_str(),
                      fmt("%.6g", pair.result.p_value).c_str());
        out += row;
    }
    return out;
}

}  // namespace lsp
