#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "imbstream/stream_model.hpp"

namespace imbs {

inline constexpr std::size_t kDefaultNeighbors = 5;

// Exact k-nearest-neighbour search over a fixed point set (k-d tree).
// Distances are Euclidean; equal distances are ordered by `keys` (ascending),
// so results do not depend on the order the points were supplied in.
class NeighborIndex {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    NeighborIndex(std::span<const Point> points, std::span<const std::uint64_t> keys);
    // Keys default to the positions 0..n-1.
    explicit NeighborIndex(std::span<const Point> points);

    // Positions of the k nearest points to q, closest first, skipping `exclude`.
    // Throws std::invalid_argument if fewer than k candidates exist.
    std::vector<std::size_t> nearest(const Point& q, std::size_t k, std::size_t exclude = npos) const;
    // Neighbourhood of points[i] without i itself.
    std::vector<std::size_t> nearest_to(std::size_t i, std::size_t k) const { return nearest(points_[i], k, i); }
    std::size_t size() const { return points_.size(); }

private:
    struct Node {
        std::uint32_t begin = 0, end = 0;  // range in order_
        std::uint32_t left = 0, right = 0;
        std::uint8_t axis = 0;
        bool leaf = true;
        double split = 0.0;
        Point lo{}, hi{};
    };
    std::uint32_t build(std::uint32_t begin, std::uint32_t end);

    std::vector<Point> points_;
    std::vector<std::uint64_t> keys_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

// Positions of the k nearest points to points[query], excluding query.
std::vector<std::size_t> knn(std::span<const Point> points, std::size_t query, std::size_t k);

enum class NeighborhoodType : std::uint8_t { Safe, Borderline, Rare, Outlier };
inline constexpr std::size_t kNumNeighborhoodTypes = 4;
const char* to_string(NeighborhoodType t);

// Type from the number of same-class neighbours s among k. For k=5:
// 5,4 Safe; 3,2 Borderline; 1 Rare; 0 Outlier. Other k use the same
// fractions (s/k >= 0.7 Safe, >= 0.3 Borderline).
NeighborhoodType classify_neighborhood(std::size_t same, std::size_t k);

// Tags every example of the window. Ties between equidistant neighbours go
// to the lower example index t. Throws std::invalid_argument if the window
// holds fewer than k+1 examples.
std::vector<NeighborhoodType> label_types(std::span<const LabeledExample> window, std::size_t k = kDefaultNeighbors);

using TypeShares = std::array<double, kNumNeighborhoodTypes>;

// Normalised {safe, borderline, rare, outlier} histogram of class c, or
// nullopt when c has no example in the window.
std::optional<TypeShares> type_distribution(std::span<const NeighborhoodType> tags,
                                            std::span<const LabeledExample> window, ClassIndex c);

struct TypeHistogram {
    std::uint64_t window_start = 0;  // t of first example
    std::uint64_t window_end = 0;    // t of last example
    std::vector<std::array<std::size_t, kNumNeighborhoodTypes>> counts;  // per class

    std::size_t class_total(ClassIndex c) const;
    std::optional<TypeShares> shares(ClassIndex c) const;
};

TypeHistogram make_histogram(std::span<const LabeledExample> window, std::span<const NeighborhoodType> tags,
                             std::size_t num_classes);

// Labels consecutive windows of `window` examples. A trailing remainder too
// small to label is merged into the previous window; a window larger than
// the stream yields a single window.
std::vector<TypeHistogram> label_windows(std::span<const LabeledExample> stream, std::size_t num_classes,
                                         std::size_t k = kDefaultNeighbors, std::size_t window = 1000);

// CSV `window_end,class,safe,borderline,rare,outlier` with proportions;
// classes absent from a window get empty fields.
void write_type_csv(std::ostream& os, std::span<const TypeHistogram> windows);

}  // namespace imbs
