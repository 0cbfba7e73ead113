#include "train/trainer.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "core/rng.hpp"
#include "nn/losses.hpp"
#include "nn/optim.hpp"

namespace acdl::train {

namespace {

TensorF labels_tensor(const std::vector<int>& labels) {
    std::vector<float> v(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) v[i] = static_cast<float>(labels[i]);
    return TensorF::from_data({static_cast<int>(labels.size())}, std::move(v));
}

int count_correct(std::span<const float> scores, const std::vector<int>& labels) {
    int correct = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        const int pred = scores[i] >= 0.5f ? 1 : 0;
        if (pred == labels[i]) ++correct;
    }
    return correct;
}

TensorF flatten_scores(const TensorF& out) {
    if (out.rank() == 2 && out.dim(1) == 1) return reshape(out, {out.dim(0)});
    if (out.rank() == 1) return out;
    throw ShapeError("classifier output must be [N,1], got " + shape_str(out.shape()));
}

}  // namespace

TrainResult train_classifier(nn::ModelGraph& model, const data::LabeledBatch& train_data,
                             const data::LabeledBatch& val_data, const TrainRun& run,
                             std::ostream* progress) {
    if (!model.is_classifier()) throw ValueError("train_classifier: model is not a classifier");
    if (run.batch_size < 1) throw ValueError("train_classifier: batch size must be >= 1");
    const int n = train_data.images.dim(0);

    RandomSource rng = RandomSource(run.seed).fork(11);
    nn::AdamHyper hyper;
    hyper.alpha = run.lr;
    nn::Adam<float> adam(hyper);
    const auto trainable = model.trainable_params();

    TrainResult result;
    std::vector<std::vector<float>> best_snapshot;

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= run.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        int64_t seen = 0;
        int correct = 0;
        for (int at = 0; at < n; at += run.batch_size) {
            const int bs = std::min(run.batch_size, n - at);
            const std::vector<int> rows(order.begin() + at, order.begin() + at + bs);
            data::LabeledBatch batch = data::gather(train_data, rows);
            nn::ForwardCtx ctx{true, &rng};
            try {
                TensorF scores = flatten_scores(model.forward(batch.images, ctx));
                TensorF loss = nn::bce_loss(scores, labels_tensor(batch.labels));
                loss_sum += static_cast<double>(loss.item()) * bs;
                correct += count_correct(scores.values(), batch.labels);
                seen += bs;
                model.zero_grad();
                loss.backward();
                adam.step(trainable);
            } catch (const NumericError& e) {
                throw Error("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
            }
        }

        CurvePoint point;
        point.epoch = epoch;
        point.train_loss = loss_sum / static_cast<double>(seen);
        point.train_acc = static_cast<double>(correct) / static_cast<double>(seen);

        EvalResult val = evaluate(model, val_data, run.batch_size);
        point.val_loss = val.loss;
        point.val_acc = val.accuracy;
        result.curves.push_back(point);

        if (progress) {
            char line[160];
            std::snprintf(line, sizeof(line),
                          "epoch=%d split=train loss=%.6f acc=%.6f\nepoch=%d split=val loss=%.6f acc=%.6f\n",
                          epoch, point.train_loss, point.train_acc, epoch, point.val_loss,
                          point.val_acc);
            (*progress) << line << std::flush;
        }

        if (run.select_best_val && (result.best_epoch == 0 || point.val_acc > result.best_val_acc)) {
            result.best_epoch = epoch;
            result.best_val_acc = point.val_acc;
            best_snapshot = model.snapshot();
        }
        if (run.target_train_acc > 0.0 && point.train_acc >= run.target_train_acc) break;
    }

    if (run.select_best_val && !best_snapshot.empty()) model.restore(best_snapshot);
    return result;
}

EvalResult evaluate(nn::ModelGraph& model, const data::LabeledBatch& data, int batch_size) {
    const int n = data.images.dim(0);
    if (n == 0) throw ValueError("evaluate: empty split");
    EvalResult result;
    result.labels = data.labels;
    result.scores.reserve(static_cast<size_t>(n));
    nn::ForwardCtx ctx;  // eval mode
    double loss_sum = 0.0;
    for (int at = 0; at < n; at += batch_size) {
        const int bs = std::min(batch_size, n - at);
        std::vector<int> rows(static_cast<size_t>(bs));
        std::iota(rows.begin(), rows.end(), at);
        data::LabeledBatch batch = data::gather(data, rows);
        TensorF scores = flatten_scores(model.forward(batch.images, ctx));
        TensorF loss = nn::bce_loss(scores.detach(), labels_tensor(batch.labels));
        loss_sum += static_cast<double>(loss.item()) * bs;
        const auto sv = scores.values();
        result.scores.insert(result.scores.end(), sv.begin(), sv.end());
    }
    result.predictions.reserve(result.scores.size());
    for (const float s : result.scores) result.predictions.push_back(s >= 0.5f ? 1 : 0);
    result.loss = loss_sum / static_cast<double>(n);
    result.accuracy =
        static_cast<double>(count_correct(result.scores, result.labels)) / static_cast<double>(n);
    return result;
}

void log_curves(const std::vector<CurvePoint>& curves, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
    for (const CurvePoint& p : curves) {
        char line[160];
        std::snprintf(line, sizeof(line), "%d,%.6f,%.6f,%.6f,%.6f\n", p.epoch, p.train_loss,
                      p.train_acc, p.val_loss, p.val_acc);
        out << line;
    }
    if (!out) throw IoError("short write to " + path.string());
}

std::vector<CurvePoint> read_curves(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "epoch,train_loss,train_acc,val_loss,val_acc") {
        throw FormatError(path.string() + ": bad curve header");
    }
    std::vector<CurvePoint> curves;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CurvePoint p;
        std::istringstream ss(line);
        char c;
        if (!(ss >> p.epoch >> c >> p.train_loss >> c >> p.train_acc >> c >> p.val_loss >> c >> p.val_acc)) {
            throw FormatError(path.string() + ": bad curve row '" + line + "'");
        }
        curves.push_back(p);
    }
    return curves;
}

}  // namespace acdl::train
