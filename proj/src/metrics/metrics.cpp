#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace acdl::metrics {

ConfusionMatrix confusion(const std::vector<int>& labels, const std::vector<int>& predictions) {
    if (labels.empty()) throw ValueError("confusion: empty input");
    if (labels.size() != predictions.size()) {
        throw ValueError("confusion: " + std::to_string(labels.size()) + " labels vs " +
                         std::to_string(predictions.size()) + " predictions");
    }
    ConfusionMatrix cm;
    for (size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i], p = predictions[i];
        if ((y != 0 && y != 1) || (p != 0 && p != 1)) {
            throw ValueError("confusion: values must be 0 or 1");
        }
        if (y == 1 && p == 1) ++cm.tp;
        else if (y == 0 && p == 0) ++cm.tn;
        else if (y == 0 && p == 1) ++cm.fp;
        else ++cm.fn;
    }
    return cm;
}

namespace {

ClassMetrics class_metrics(int64_t tp, int64_t fp, int64_t fn, int64_t support) {
    ClassMetrics m;
    m.support = support;
    if (tp + fp == 0) {
        m.precision_defined = false;
    } else {
        m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn == 0) {
        m.recall_defined = false;
    } else {
        m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    if (!m.precision_defined || !m.recall_defined || m.precision + m.recall == 0.0) {
        m.f1_defined = m.precision_defined && m.recall_defined;
        m.f1 = 0.0;
    } else {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    return m;
}

}  // namespace

BasicMetrics basic_metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw ValueError("basic_metrics: empty confusion matrix");
    BasicMetrics out;
    out.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    // Positive class (label 1) straight from the matrix; the negative class
    // swaps the roles of positives and negatives.
    out.per_class[1] = class_metrics(cm.tp, cm.fp, cm.fn, cm.tp + cm.fn);
    out.per_class[0] = class_metrics(cm.tn, cm.fn, cm.fp, cm.tn + cm.fp);
    return out;
}

Averages macro_average(const std::array<ClassMetrics, 2>& per_class) {
    Averages a;
    a.precision = (per_class[0].precision + per_class[1].precision) / 2.0;
    a.recall = (per_class[0].recall + per_class[1].recall) / 2.0;
    a.f1 = (per_class[0].f1 + per_class[1].f1) / 2.0;
    return a;
}

Averages weighted_average(const std::array<ClassMetrics, 2>& per_class) {
    const double total = static_cast<double>(per_class[0].support + per_class[1].support);
    if (total == 0.0) throw ValueError("weighted_average: zero total support");
    Averages a;
    for (int c = 0; c < 2; ++c) {
        const double w = static_cast<double>(per_class[static_cast<size_t>(c)].support) / total;
        a.precision += w * per_class[static_cast<size_t>(c)].precision;
        a.recall += w * per_class[static_cast<size_t>(c)].recall;
        a.f1 += w * per_class[static_cast<size_t>(c)].f1;
    }
    return a;
}

RocResult roc_auc(const std::vector<int>& labels, const std::vector<double>& scores) {
    if (labels.size() != scores.size()) {
        throw ValueError("roc_auc: " + std::to_string(labels.size()) + " labels vs " +
                         std::to_string(scores.size()) + " scores");
    }
    int64_t pos = 0, neg = 0;
    for (const int y : labels) {
        if (y != 0 && y != 1) throw ValueError("roc_auc: labels must be 0 or 1");
        (y == 1 ? pos : neg) += 1;
    }
    if (pos == 0 || neg == 0) {
        throw ValueError("roc_auc: need at least one positive and one negative label");
    }

    std::vector<size_t> idx(labels.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });

    RocResult out;
    double max_score = scores[idx.front()];
    out.points.push_back({max_score + 1.0, 0.0, 0.0});
    int64_t tp = 0, fp = 0;
    size_t i = 0;
    while (i < idx.size()) {
        const double t = scores[idx[i]];
        // Consume every sample tied at this threshold before emitting a point.
        while (i < idx.size() && scores[idx[i]] == t) {
            (labels[idx[i]] == 1 ? tp : fp) += 1;
            ++i;
        }
        out.points.push_back({t, static_cast<double>(fp) / static_cast<double>(neg),
                              static_cast<double>(tp) / static_cast<double>(pos)});
    }
    double auc = 0.0;
    for (size_t k = 1; k < out.points.size(); ++k) {
        const auto& a = out.points[k - 1];
        const auto& b = out.points[k];
        auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    out.auc = auc;
    return out;
}

MetricsReport compute_report(const std::vector<int>& labels, const std::vector<double>& scores,
                             const std::array<std::string, 2>& class_names, double threshold) {
    std::vector<int> predictions;
    predictions.reserve(scores.size());
    for (const double s : scores) predictions.push_back(s >= threshold ? 1 : 0);
    MetricsReport r;
    r.class_names = class_names;
    r.cm = confusion(labels, predictions);
    r.basic = basic_metrics(r.cm);
    r.macro = macro_average(r.basic.per_class);
    r.weighted = weighted_average(r.basic.per_class);
    r.roc = roc_auc(labels, scores);
    return r;
}

namespace {

// Two decimals, round half up (0.005 -> "0.01").
std::string fmt2(double v) {
    const double r = std::floor(v * 100.0 + 0.5) / 100.0;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", r);
    return buf;
}

void render_row(std::ostringstream& os, const std::string& name, double p, double r, double f1,
                const std::string& support) {
    os << name;
    for (size_t i = name.size(); i < 14; ++i) os << ' ';
    auto cell = [&os](const std::string& s) {
        for (size_t i = s.size(); i < 11; ++i) os << ' ';
        os << s;
    };
    cell(fmt2(p));
    cell(fmt2(r));
    cell(fmt2(f1));
    cell(support);
    os << "\n";
}

}  // namespace

std::string render_report(const MetricsReport& report) {
    std::ostringstream os;
    os << "              ";
    for (const char* h : {"Precision", "Recall", "F1-Score", "Support"}) {
        const std::string s(h);
        for (size_t i = s.size(); i < 11; ++i) os << ' ';
        os << s;
    }
    os << "\n";
    const auto& pc = report.basic.per_class;
    render_row(os, report.class_names[0], pc[0].precision, pc[0].recall, pc[0].f1,
               std::to_string(pc[0].support));
    render_row(os, report.class_names[1], pc[1].precision, pc[1].recall, pc[1].f1,
               std::to_string(pc[1].support));
    render_row(os, "Macro Avg", report.macro.precision, report.macro.recall, report.macro.f1,
               std::to_string(report.cm.total()));
    render_row(os, "Weighted Avg", report.weighted.precision, report.weighted.recall,
               report.weighted.f1, std::to_string(report.cm.total()));
    os << "\n";
    os << "Accuracy: " << fmt2(report.basic.accuracy)
       << "   [accuracy = (tp+tn)/total = (" << report.cm.tp << "+" << report.cm.tn << ")/"
       << report.cm.total() << "]\n";
    os << "AUC: " << fmt2(report.roc.auc) << "\n";
    bool flagged = false;
    for (int c = 0; c < 2; ++c) {
        const auto& m = pc[static_cast<size_t>(c)];
        if (!m.precision_defined || !m.recall_defined || !m.f1_defined) flagged = true;
    }
    if (flagged) os << "Note: metrics with a zero denominator are reported as 0.\n";
    return os.str();
}

namespace {

nlohmann::json class_to_json(const ClassMetrics& m, const std::string& name) {
    return {{"name", name},
            {"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1},
            {"support", m.support},
            {"precision_defined", m.precision_defined},
            {"recall_defined", m.recall_defined},
            {"f1_defined", m.f1_defined}};
}

ClassMetrics class_from_json(const nlohmann::json& j) {
    ClassMetrics m;
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f1 = j.at("f1").get<double>();
    m.support = j.at("support").get<int64_t>();
    m.precision_defined = j.at("precision_defined").get<bool>();
    m.recall_defined = j.at("recall_defined").get<bool>();
    m.f1_defined = j.at("f1_defined").get<bool>();
    return m;
}

}  // namespace

void write_report_json(const MetricsReport& report, const std::filesystem::path& path) {
    nlohmann::json j;
    j["classes"] = {class_to_json(report.basic.per_class[0], report.class_names[0]),
                    class_to_json(report.basic.per_class[1], report.class_names[1])};
    j["accuracy"] = report.basic.accuracy;
    j["macro"] = {{"precision", report.macro.precision}, {"recall", report.macro.recall}, {"f1", report.macro.f1}};
    j["weighted"] = {{"precision", report.weighted.precision},
                     {"recall", report.weighted.recall},
                     {"f1", report.weighted.f1}};
    j["confusion"] = {{"tp", report.cm.tp}, {"tn", report.cm.tn}, {"fp", report.cm.fp}, {"fn", report.cm.fn}};
    j["auc"] = report.roc.auc;
    nlohmann::json roc = nlohmann::json::array();
    for (const RocPoint& p : report.roc.points) {
        roc.push_back({{"threshold", p.threshold}, {"fpr", p.fpr}, {"tpr", p.tpr}});
    }
    j["roc"] = std::move(roc);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("short write to " + path.string());
}

MetricsReport read_report_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("report not found: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    MetricsReport r;
    r.class_names[0] = j.at("classes").at(0).at("name").get<std::string>();
    r.class_names[1] = j.at("classes").at(1).at("name").get<std::string>();
    r.basic.per_class[0] = class_from_json(j.at("classes").at(0));
    r.basic.per_class[1] = class_from_json(j.at("classes").at(1));
    r.basic.accuracy = j.at("accuracy").get<double>();
    r.macro = {j.at("macro").at("precision").get<double>(), j.at("macro").at("recall").get<double>(),
               j.at("macro").at("f1").get<double>()};
    r.weighted = {j.at("weighted").at("precision").get<double>(),
                  j.at("weighted").at("recall").get<double>(),
                  j.at("weighted").at("f1").get<double>()};
    r.cm.tp = j.at("confusion").at("tp").get<int64_t>();
    r.cm.tn = j.at("confusion").at("tn").get<int64_t>();
    r.cm.fp = j.at("confusion").at("fp").get<int64_t>();
    r.cm.fn = j.at("confusion").at("fn").get<int64_t>();
    r.roc.auc = j.at("auc").get<double>();
    for (const auto& p : j.at("roc")) {
        r.roc.points.push_back({p.at("threshold").get<double>(), p.at("fpr").get<double>(),
                                p.at("tpr").get<double>()});
    }
    return r;
}

void write_roc_csv(const RocResult& roc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "threshold,fpr,tpr\n";
    for (const RocPoint& p : roc.points) {
        char line[96];
        std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g\n", p.threshold, p.fpr, p.tpr);
        out << line;
    }
}

}  // namespace acdl::metrics
