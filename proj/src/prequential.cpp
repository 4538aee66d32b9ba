#include "imbstream/prequential.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace imbs {

WindowedConfusion::WindowedConfusion(std::size_t num_classes, std::size_t window)
    : window_(window), tp_(num_classes, 0), support_(num_classes, 0) {
    if (window == 0) throw std::invalid_argument("window must be positive");
}

void WindowedConfusion::add(ClassIndex truth, ClassIndex predicted) {
    if (buffer_.size() == window_) {
        const auto [old_truth, old_pred] = buffer_.front();
        buffer_.pop_front();
        --support_[old_truth];
        if (old_truth == old_pred) --tp_[old_truth];
    }
    buffer_.emplace_back(truth, predicted);
    ++support_[truth];
    if (truth == predicted) ++tp_[truth];
}

std::vector<std::optional<double>> recall_per_class(std::span<const std::size_t> tp,
                                                    std::span<const std::size_t> support) {
    std::vector<std::optional<double>> out(tp.size());
    for (std::size_t k = 0; k < tp.size(); ++k) {
        if (support[k] > 0) out[k] = static_cast<double>(tp[k]) / static_cast<double>(support[k]);
    }
    return out;
}

std::vector<std::optional<double>> recall_per_class(const WindowedConfusion& confusion) {
    return recall_per_class(confusion.true_positives(), confusion.support());
}

double gmean(std::span<const double> recalls) {
    if (recalls.empty()) return 0.0;
    double product = 1.0;
    for (double r : recalls) product *= r;
    return std::pow(product, 1.0 / static_cast<double>(recalls.size()));
}

std::optional<double> gmean(const std::vector<std::optional<double>>& recalls) {
    std::vector<double> present;
    for (const auto& r : recalls) {
        if (r) present.push_back(*r);
    }
    if (present.empty()) return std::nullopt;
    return gmean(std::span<const double>(present));
}

std::optional<double> EvalSeries::gmean_at(std::uint64_t t) const {
    for (const auto& p : points) {
        if (p.t == t) return p.gmean;
    }
    return std::nullopt;
}

Snapshots EvalSeries::snapshots(const SnapshotMarkers& markers) const {
    Snapshots s;
    s.start = gmean_at(markers.start);
    s.pre = gmean_at(markers.pre_drift);
    s.post = gmean_at(markers.post_drift);
    if (!points.empty()) s.end = points.back().gmean;
    return s;
}

double EvalSeries::mean_gmean(std::uint64_t after) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& p : points) {
        if (p.t > after && p.gmean) {
            sum += *p.gmean;
            ++n;
        }
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

EvalSeries prequential_run(const std::function<bool(LabeledExample&)>& next, OnlineClassifier& classifier,
                           std::size_t num_classes, std::size_t window,
                           std::vector<std::pair<ClassIndex, ClassIndex>>* log) {
    EvalSeries series;
    series.window = window;
    WindowedConfusion confusion(num_classes, window);
    LabeledExample ex;
    std::uint64_t n = 0;
    while (next(ex)) {
        const ClassIndex predicted = classifier.predict(ex.x);
        confusion.add(ex.y, predicted);
        if (log) log->emplace_back(ex.y, predicted);
        classifier.train(ex.x, ex.y);
        ++n;
        if (n % window == 0) {
            SeriesPoint p;
            p.t = n;
            p.recalls = recall_per_class(confusion);
            p.gmean = gmean(p.recalls);
            series.points.push_back(std::move(p));
        }
    }
    return series;
}

EvalSeries prequential_run(std::span<const LabeledExample> stream, OnlineClassifier& classifier,
                           std::size_t num_classes, std::size_t window,
                           std::vector<std::pair<ClassIndex, ClassIndex>>* log) {
    std::size_t i = 0;
    return prequential_run(
        [&](LabeledExample& ex) {
            if (i >= stream.size()) return false;
            ex = stream[i++];
            return true;
        },
        classifier, num_classes, window, log);
}

namespace {
void put_value(std::ostream& os, const std::optional<double>& v) {
    if (!v) return;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", *v);
    os << buf;
}
}  // namespace

void write_results_header(std::ostream& os, std::size_t num_classes) {
    os << "t,classifier,stream_id";
    for (std::size_t k = 0; k < num_classes; ++k) os << ",recall_c" << k;
    os << ",gmean\n";
}

void write_results_rows(std::ostream& os, const EvalSeries& series, const std::string& classifier,
                        const std::string& stream_id) {
    for (const auto& p : series.points) {
        os << p.t << ',' << classifier << ',' << stream_id;
        for (const auto& r : p.recalls) {
            os << ',';
            put_value(os, r);
        }
        os << ',';
        put_value(os, p.gmean);
        os << '\n';
    }
}

void write_snapshot_header(std::ostream& os) { os << "stream_id,classifier,start,pre,post,end\n"; }

void write_snapshot_row(std::ostream& os, const std::string& stream_id, const std::string& classifier,
                        const Snapshots& s) {
    os << stream_id << ',' << classifier << ',';
    put_value(os, s.start);
    os << ',';
    put_value(os, s.pre);
    os << ',';
    put_value(os, s.post);
    os << ',';
    put_value(os, s.end);
    os << '\n';
}

}  // namespace imbs
