#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "imbstream/classifier.hpp"
#include "imbstream/stream_model.hpp"

namespace imbs {

inline constexpr std::size_t kDefaultWindow = 1000;

// Sliding window of the last W (true, predicted) pairs with incrementally
// maintained per-class true-positive and support counters.
class WindowedConfusion {
public:
    WindowedConfusion(std::size_t num_classes, std::size_t window);

    void add(ClassIndex truth, ClassIndex predicted);
    std::size_t size() const { return buffer_.size(); }
    std::size_t window() const { return window_; }
    const std::vector<std::size_t>& true_positives() const { return tp_; }
    const std::vector<std::size_t>& support() const { return support_; }
    const std::deque<std::pair<ClassIndex, ClassIndex>>& contents() const { return buffer_; }

private:
    std::size_t window_;
    std::deque<std::pair<ClassIndex, ClassIndex>> buffer_;
    std::vector<std::size_t> tp_;
    std::vector<std::size_t> support_;
};

// recall_k = TP_k / support_k; nullopt for classes absent from the window.
std::vector<std::optional<double>> recall_per_class(const WindowedConfusion& confusion);
std::vector<std::optional<double>> recall_per_class(std::span<const std::size_t> tp,
                                                    std::span<const std::size_t> support);

// Geometric mean of the given recalls.
double gmean(std::span<const double> recalls);
// Geometric mean over present classes only; nullopt if none is present.
std::optional<double> gmean(const std::vector<std::optional<double>>& recalls);

struct SeriesPoint {
    std::uint64_t t = 0;
    std::vector<std::optional<double>> recalls;
    std::optional<double> gmean;

    bool operator==(const SeriesPoint&) const = default;
};

struct SnapshotMarkers {
    std::uint64_t start = 10'000;
    std::uint64_t pre_drift = 70'000;
    std::uint64_t post_drift = 100'000;
};

struct Snapshots {
    std::optional<double> start, pre, post, end;
};

struct EvalSeries {
    std::size_t window = kDefaultWindow;
    std::vector<SeriesPoint> points;

    // G-mean of the point at example index t (nullopt if no such point).
    std::optional<double> gmean_at(std::uint64_t t) const;
    Snapshots snapshots(const SnapshotMarkers& markers = {}) const;
    // Mean of windowed G-means over points with t > after.
    double mean_gmean(std::uint64_t after = 0) const;
};

// Test-then-train over any single-pass source. `next` fills the example and
// returns false when the source is exhausted.
EvalSeries prequential_run(const std::function<bool(LabeledExample&)>& next, OnlineClassifier& classifier,
                           std::size_t num_classes, std::size_t window = kDefaultWindow,
                           std::vector<std::pair<ClassIndex, ClassIndex>>* log = nullptr);

EvalSeries prequential_run(std::span<const LabeledExample> stream, OnlineClassifier& classifier,
                           std::size_t num_classes, std::size_t window = kDefaultWindow,
                           std::vector<std::pair<ClassIndex, ClassIndex>>* log = nullptr);

void write_results_header(std::ostream& os, std::size_t num_classes);
void write_results_rows(std::ostream& os, const EvalSeries& series, const std::string& classifier,
                        const std::string& stream_id);
void write_snapshot_header(std::ostream& os);
void write_snapshot_row(std::ostream& os, const std::string& stream_id, const std::string& classifier,
                        const Snapshots& s);

}  // namespace imbs
