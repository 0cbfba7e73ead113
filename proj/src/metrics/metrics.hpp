#pragma once

// Confusion counts, accuracy / precision / recall / F1 with macro and
// weighted averages, ROC/AUC via threshold sweep, and classification-report
// rendering.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace acdl::metrics {

struct ConfusionMatrix {
    int64_t tp = 0, tn = 0, fp = 0, fn = 0;  // positive class = label 1

    int64_t total() const { return tp + tn + fp + fn; }
};

ConfusionMatrix confusion(const std::vector<int>& labels, const std::vector<int>& predictions);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int64_t support = 0;
    // Zero-denominator metrics are reported as 0 with the flag cleared.
    bool precision_defined = true;
    bool recall_defined = true;
    bool f1_defined = true;
};

struct BasicMetrics {
    double accuracy = 0.0;  // (tp+tn)/total
    std::array<ClassMetrics, 2> per_class;  // index = class label
};

BasicMetrics basic_metrics(const ConfusionMatrix& cm);

struct Averages {
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

Averages macro_average(const std::array<ClassMetrics, 2>& per_class);
Averages weighted_average(const std::array<ClassMetrics, 2>& per_class);

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocResult {
    std::vector<RocPoint> points;  // ascending fpr, from (0,0) to (1,1)
    double auc = 0.0;
};

// Threshold sweep over the unique scores (predict positive when
// score >= threshold). Requires at least one positive and one negative label.
RocResult roc_auc(const std::vector<int>& labels, const std::vector<double>& scores);

struct MetricsReport {
    std::array<std::string, 2> class_names;
    ConfusionMatrix cm;
    BasicMetrics basic;
    Averages macro;
    Averages weighted;
    RocResult roc;
};

MetricsReport compute_report(const std::vector<int>& labels, const std::vector<double>& scores,
                             const std::array<std::string, 2>& class_names,
                             double threshold = 0.5);

// Fixed-width classification report (two decimals, round half up).
std::string render_report(const MetricsReport& report);

// Full-precision structured form.
void write_report_json(const MetricsReport& report, const std::filesystem::path& path);
MetricsReport read_report_json(const std::filesystem::path& path);

// CSV "threshold,fpr,tpr".
void write_roc_csv(const RocResult& roc, const std::filesystem::path& path);

}  // namespace acdl::metrics
