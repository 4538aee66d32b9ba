#include "imbstream/labeler.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>

namespace imbs {

namespace {

constexpr std::uint32_t kLeafSize = 8;

double squared_distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < kNumAttributes; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

double box_distance(const Point& q, const Point& lo, const Point& hi) {
    double s = 0.0;
    for (std::size_t k = 0; k < kNumAttributes; ++k) {
        double d = 0.0;
        if (q[k] < lo[k]) d = lo[k] - q[k];
        else if (q[k] > hi[k]) d = q[k] - hi[k];
        s += d * d;
    }
    return s;
}

std::vector<std::uint64_t> positions(std::size_t n) {
    std::vector<std::uint64_t> keys(n);
    std::iota(keys.begin(), keys.end(), std::uint64_t{0});
    return keys;
}

}  // namespace

NeighborIndex::NeighborIndex(std::span<const Point> points, std::span<const std::uint64_t> keys)
    : points_(points.begin(), points.end()), keys_(keys.begin(), keys.end()), order_(points.size()) {
    if (keys.size() != points.size()) throw std::invalid_argument("NeighborIndex: one key per point required");
    std::iota(order_.begin(), order_.end(), 0u);
    if (!points_.empty()) build(0, static_cast<std::uint32_t>(points_.size()));
}

NeighborIndex::NeighborIndex(std::span<const Point> points) : NeighborIndex(points, positions(points.size())) {}

std::uint32_t NeighborIndex::build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Node n;
    n.begin = begin;
    n.end = end;
    n.lo.fill(std::numeric_limits<double>::infinity());
    n.hi.fill(-std::numeric_limits<double>::infinity());
    for (std::uint32_t i = begin; i < end; ++i) {
        const Point& p = points_[order_[i]];
        for (std::size_t k = 0; k < kNumAttributes; ++k) {
            n.lo[k] = std::min(n.lo[k], p[k]);
            n.hi[k] = std::max(n.hi[k], p[k]);
        }
    }
    if (end - begin > kLeafSize) {
        std::size_t axis = 0;
        for (std::size_t k = 1; k < kNumAttributes; ++k) {
            if (n.hi[k] - n.lo[k] > n.hi[axis] - n.lo[axis]) axis = k;
        }
        if (n.hi[axis] > n.lo[axis]) {
            const std::uint32_t mid = begin + (end - begin) / 2;
            std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                             [&](std::uint32_t a, std::uint32_t b) { return points_[a][axis] < points_[b][axis]; });
            n.leaf = false;
            n.axis = static_cast<std::uint8_t>(axis);
            n.split = points_[order_[mid]][axis];
            n.left = build(begin, mid);
            n.right = build(mid, end);
        }
    }
    nodes_[id] = n;
    return id;
}

std::vector<std::size_t> NeighborIndex::nearest(const Point& q, std::size_t k, std::size_t exclude) const {
    const std::size_t candidates = points_.size() - (exclude < points_.size() ? 1 : 0);
    if (k == 0) return {};
    if (candidates < k) {
        throw std::invalid_argument("window too small: need at least " + std::to_string(k) + " neighbours, have " +
                                    std::to_string(candidates));
    }
    using Entry = std::tuple<double, std::uint64_t, std::uint32_t>;  // (d2, key, position)
    std::priority_queue<Entry> best;  // worst on top

    auto visit = [&](auto&& self, std::uint32_t id) -> void {
        const Node& n = nodes_[id];
        if (best.size() == k && box_distance(q, n.lo, n.hi) > std::get<0>(best.top())) return;
        if (n.leaf) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                const std::uint32_t pos = order_[i];
                if (pos == exclude) continue;
                const Entry e{squared_distance(q, points_[pos]), keys_[pos], pos};
                if (best.size() < k) {
                    best.push(e);
                } else if (std::tie(std::get<0>(e), std::get<1>(e)) <
                           std::tie(std::get<0>(best.top()), std::get<1>(best.top()))) {
                    best.pop();
                    best.push(e);
                }
            }
            return;
        }
        const bool go_left = q[n.axis] <= n.split;
        self(self, go_left ? n.left : n.right);
        self(self, go_left ? n.right : n.left);
    };
    visit(visit, 0);

    std::vector<std::size_t> out(best.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = std::get<2>(best.top());
        best.pop();
    }
    return out;
}

std::vector<std::size_t> knn(std::span<const Point> points, std::size_t query, std::size_t k) {
    if (query >= points.size()) throw std::out_of_range("knn: query index out of range");
    return NeighborIndex(points).nearest_to(query, k);
}

const char* to_string(NeighborhoodType t) {
    switch (t) {
        case NeighborhoodType::Safe: return "safe";
        case NeighborhoodType::Borderline: return "borderline";
        case NeighborhoodType::Rare: return "rare";
        case NeighborhoodType::Outlier: return "outlier";
    }
    return "?";
}

NeighborhoodType classify_neighborhood(std::size_t same, std::size_t k) {
    if (k == 0 || same > k) throw std::invalid_argument("classify_neighborhood: need 0 <= same <= k, k > 0");
    // Integer form of same/k >= 0.7 and same/k >= 0.3.
    if (10 * same >= 7 * k) return NeighborhoodType::Safe;
    if (10 * same >= 3 * k) return NeighborhoodType::Borderline;
    if (same >= 1) return NeighborhoodType::Rare;
    return NeighborhoodType::Outlier;
}

std::vector<NeighborhoodType> label_types(std::span<const LabeledExample> window, std::size_t k) {
    if (window.size() < k + 1) {
        throw std::invalid_argument("window too small: " + std::to_string(window.size()) + " examples, need at least " +
                                    std::to_string(k + 1));
    }
    std::vector<Point> points;
    std::vector<std::uint64_t> keys;
    points.reserve(window.size());
    keys.reserve(window.size());
    for (const auto& ex : window) {
        points.push_back(ex.x);
        keys.push_back(ex.t);
    }
    const NeighborIndex index(points, keys);
    std::vector<NeighborhoodType> tags(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) {
        std::size_t same = 0;
        for (std::size_t j : index.nearest_to(i, k)) same += window[j].y == window[i].y ? 1 : 0;
        tags[i] = classify_neighborhood(same, k);
    }
    return tags;
}

std::optional<TypeShares> type_distribution(std::span<const NeighborhoodType> tags,
                                            std::span<const LabeledExample> window, ClassIndex c) {
    if (tags.size() != window.size()) throw std::invalid_argument("type_distribution: one tag per example required");
    TypeShares shares{};
    std::size_t n = 0;
    for (std::size_t i = 0; i < window.size(); ++i) {
        if (window[i].y != c) continue;
        shares[static_cast<std::size_t>(tags[i])] += 1.0;
        ++n;
    }
    if (n == 0) return std::nullopt;
    for (double& v : shares) v /= static_cast<double>(n);
    return shares;
}

std::size_t TypeHistogram::class_total(ClassIndex c) const {
    std::size_t n = 0;
    for (std::size_t v : counts.at(c)) n += v;
    return n;
}

std::optional<TypeShares> TypeHistogram::shares(ClassIndex c) const {
    const std::size_t n = class_total(c);
    if (n == 0) return std::nullopt;
    TypeShares out{};
    for (std::size_t i = 0; i < kNumNeighborhoodTypes; ++i) {
        out[i] = static_cast<double>(counts[c][i]) / static_cast<double>(n);
    }
    return out;
}

TypeHistogram make_histogram(std::span<const LabeledExample> window, std::span<const NeighborhoodType> tags,
                             std::size_t num_classes) {
    if (tags.size() != window.size()) throw std::invalid_argument("make_histogram: one tag per example required");
    TypeHistogram h;
    h.counts.assign(num_classes, {});
    if (!window.empty()) {
        h.window_start = window.front().t;
        h.window_end = window.back().t;
    }
    for (std::size_t i = 0; i < window.size(); ++i) {
        if (window[i].y >= num_classes) throw std::out_of_range("make_histogram: class index out of range");
        ++h.counts[window[i].y][static_cast<std::size_t>(tags[i])];
    }
    return h;
}

std::vector<TypeHistogram> label_windows(std::span<const LabeledExample> stream, std::size_t num_classes,
                                         std::size_t k, std::size_t window) {
    if (window == 0) throw std::invalid_argument("window must be positive");
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    for (std::size_t begin = 0; begin < stream.size(); begin += window) {
        ranges.emplace_back(begin, std::min(stream.size(), begin + window));
    }
    if (ranges.size() > 1 && ranges.back().second - ranges.back().first < k + 1) {
        const std::size_t end = ranges.back().second;
        ranges.pop_back();
        ranges.back().second = end;
    }
    std::vector<TypeHistogram> out;
    for (const auto& [begin, end] : ranges) {
        const auto w = stream.subspan(begin, end - begin);
        const auto tags = label_types(w, k);
        out.push_back(make_histogram(w, tags, num_classes));
    }
    return out;
}

void write_type_csv(std::ostream& os, std::span<const TypeHistogram> windows) {
    os << "window_end,class,safe,borderline,rare,outlier\n";
    char buf[32];
    for (const auto& h : windows) {
        for (ClassIndex c = 0; c < h.counts.size(); ++c) {
            os << h.window_end << ',' << c;
            const auto s = h.shares(c);
            for (std::size_t i = 0; i < kNumNeighborhoodTypes; ++i) {
                os << ',';
                if (s) {
                    std::snprintf(buf, sizeof(buf), "%.6f", (*s)[i]);
                    os << buf;
                }
            }
            os << '\n';
        }
    }
}

}  // namespace imbs
