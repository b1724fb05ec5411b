#ifndef LSP_EVAL_HPP
#define LSP_EVAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lsp/predictions.hpp"
#include "lsp/task.hpp"

namespace lsp {

struct DatasetItem {
    std::string id;
    std::string text;
    std::optional<std::string> drug;    // Task 2 only
    std::optional<std::string> effect;  // Task 2 only
    int label = 0;                      // gold, 0 or 1
};

// JSONL, one item per line. Task 1: {"id","text","label"};
// Task 2 adds "drug" and "effect". Strict schema, duplicate ids rejected,
// errors carry the line number.
std::vector<DatasetItem> load_dataset(const std::string& path, int task);

std::vector<TaskInstance> to_instances(const std::vector<DatasetItem>& items);

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::size_t total() const { return tp + fp + fn + tn; }
};

struct Metrics {
    double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
};

// Positive class is 1; invalid predictions count as 0. Requires identical
// id sets; mismatches raise an Error naming the offenders.
ConfusionCounts confusion(const std::vector<DatasetItem>& gold, const PredictionSet& pred);

// Zero-denominator cases (precision/recall/f1) return 0 by convention.
Metrics compute_metrics(const ConfusionCounts& c);

enum class Statistic { accuracy, precision, recall, f1 };

std::string statistic_name(Statistic s);

struct BootstrapCI {
    Statistic statistic = Statistic::accuracy;
    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    int resamples = 1000;
    std::uint64_t seed = 0;
};

// Percentile CI: resample items with replacement B times, recompute the
// statistic, take the 2.5%/97.5% quantiles (for level 0.95). Streams are
// derived from the seed by resample index, so runs are reproducible and
// resamples may be computed in any order.
BootstrapCI bootstrap_ci(const std::vector<DatasetItem>& gold, const PredictionSet& pred,
                         Statistic statistic, int resamples, double level, std::uint64_t seed);

struct McNemarResult {
    std::size_t n01 = 0;  // A wrong, B correct
    std::size_t n10 = 0;  // A correct, B wrong
    double chi2 = 0.0;
    double p_value = 1.0;
};

// Continuity-corrected chi2 = (|n01-n10|-1)^2 / (n01+n10); the degenerate
// n01+n10 = 0 case reports chi2 = 0, p = 1.
McNemarResult mcnemar(const std::vector<DatasetItem>& gold, const PredictionSet& pred_a,
                      const PredictionSet& pred_b);

struct RunReport {
    std::string method;
    std::string model;
    std::size_t n = 0;
    double invalid_rate = 0.0;
    ConfusionCounts confusion;
    Metrics point;
    std::vector<BootstrapCI> intervals;  // accuracy, precision, recall, f1
};

struct McNemarPair {
    std::string a;  // "model/method"
    std::string b;
    McNemarResult result;
};

struct MetricsReport {
    std::vector<RunReport> runs;    // sorted by (model, method)
    std::vector<McNemarPair> pairs;  // all k(k-1)/2 comparisons
    std::uint64_t seed = 0;
    int resamples = 1000;
};

MetricsReport build_report(const std::vector<PredictionSet>& runs,
                           const std::vector<DatasetItem>& gold, std::uint64_t seed,
                           int resamples = 1000);

std::string report_to_json(const MetricsReport& report);

// Aligned plain-text table plus one McNemar line per pair.
std::string report_to_table(const MetricsReport& report);

}  // namespace lsp

#endif
