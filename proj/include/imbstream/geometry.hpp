#pragma once

#include <cstdint>
#include <random>

#include "imbstream/stream_model.hpp"

namespace imbs {

using Rng = std::mt19937_64;

struct Ellipsoid {
    Point center{};
    Point radii{};

    // sqrt(sum_d ((p_d - c_d) / r_d)^2); the point is inside iff this is <= 1.
    double normalized_radius(const Point& p) const;
    bool contains(const Point& p) const { return normalized_radius(p) <= 1.0; }
    Ellipsoid scaled(double factor) const;
    double max_radius() const;
    double min_radius() const;
    // Lower bound on the Euclidean distance from p to the ellipsoid surface
    // (exact for spheres); negative when p is inside.
    double surface_distance(const Point& p) const;
    bool inside_unit_cube() const;

    bool operator==(const Ellipsoid&) const = default;
};

double distance(const Point& a, const Point& b);
Point lerp(const Point& a, const Point& b, double t);

// Conservative: true unless the bounding spheres are disjoint.
bool may_intersect(const Ellipsoid& a, const Ellipsoid& b);
// Sufficient: true when the inscribed spheres overlap.
bool surely_intersect(const Ellipsoid& a, const Ellipsoid& b);

// Incremented whenever Gaussian rejection gives up and returns the center.
struct SamplingCounters {
    std::uint64_t gaussian_fallbacks = 0;
};

inline constexpr int kGaussianAttempts = 1000;

Point sample_in_ellipsoid(const Ellipsoid& e, Distribution dist, Rng& rng, SamplingCounters* counters = nullptr);

// Uniform over the shell between e scaled by `inner` and e scaled by `outer`.
Point sample_in_shell(const Ellipsoid& e, double inner, double outer, Rng& rng);

Point sample_in_unit_cube(Rng& rng);
// Uniformly distributed unit vector.
Point random_direction(Rng& rng);

}  // namespace imbs
