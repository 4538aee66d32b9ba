#include "imbstream/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace imbs {

namespace {

// Uniform direction on the unit sphere scaled by a radius in [0,1].
Point unit_ball_point(double radius, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Point dir{};
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto& v : dir) {
            v = normal(rng);
            norm += v * v;
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& v : dir) v = v / norm * radius;
    return dir;
}

Point place(const Ellipsoid& e, const Point& unit) {
    Point p{};
    for (std::size_t d = 0; d < kNumAttributes; ++d) p[d] = e.center[d] + unit[d] * e.radii[d];
    return p;
}

}  // namespace

double Ellipsoid::normalized_radius(const Point& p) const {
    double s = 0.0;
    for (std::size_t d = 0; d < kNumAttributes; ++d) {
        const double z = (p[d] - center[d]) / radii[d];
        s += z * z;
    }
    return std::sqrt(s);
}

Ellipsoid Ellipsoid::scaled(double factor) const {
    Ellipsoid e = *this;
    for (auto& r : e.radii) r *= factor;
    return e;
}

double Ellipsoid::max_radius() const { return *std::max_element(radii.begin(), radii.end()); }
double Ellipsoid::min_radius() const { return *std::min_element(radii.begin(), radii.end()); }

double Ellipsoid::surface_distance(const Point& p) const {
    const double dc = distance(p, center);
    if (contains(p)) return -(max_radius() - dc);
    return dc - max_radius();
}

bool Ellipsoid::inside_unit_cube() const {
    for (std::size_t d = 0; d < kNumAttributes; ++d) {
        if (center[d] - radii[d] < 0.0 || center[d] + radii[d] > 1.0) return false;
    }
    return true;
}

double distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < kNumAttributes; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    return std::sqrt(s);
}

Point lerp(const Point& a, const Point& b, double t) {
    Point p{};
    for (std::size_t d = 0; d < kNumAttributes; ++d) p[d] = (1.0 - t) * a[d] + t * b[d];
    return p;
}

bool may_intersect(const Ellipsoid& a, const Ellipsoid& b) {
    return distance(a.center, b.center) <= a.max_radius() + b.max_radius();
}

bool surely_intersect(const Ellipsoid& a, const Ellipsoid& b) {
    return distance(a.center, b.center) < a.min_radius() + b.min_radius();
}

Point sample_in_ellipsoid(const Ellipsoid& e, Distribution dist, Rng& rng, SamplingCounters* counters) {
    if (dist == Distribution::Uniform) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double radius = std::pow(u(rng), 1.0 / static_cast<double>(kNumAttributes));
        return place(e, unit_ball_point(radius, rng));
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int attempt = 0; attempt < kGaussianAttempts; ++attempt) {
        Point p{};
        for (std::size_t d = 0; d < kNumAttributes; ++d) p[d] = e.center[d] + normal(rng) * e.radii[d] / 3.0;
        if (e.contains(p)) return p;
    }
    if (counters) ++counters->gaussian_fallbacks;
    return e.center;
}

Point sample_in_shell(const Ellipsoid& e, double inner, double outer, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    constexpr double n = static_cast<double>(kNumAttributes);
    const double lo = std::pow(inner, n);
    const double hi = std::pow(outer, n);
    const double radius = std::pow(lo + u(rng) * (hi - lo), 1.0 / n);
    return place(e, unit_ball_point(radius, rng));
}

Point random_direction(Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Point u{};
    double n = 0.0;
    while (n == 0.0) {
        n = 0.0;
        for (auto& v : u) {
            v = normal(rng);
            n += v * v;
        }
    }
    n = std::sqrt(n);
    for (auto& v : u) v /= n;
    return u;
}

Point sample_in_unit_cube(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Point p{};
    for (auto& v : p) v = u(rng);
    return p;
}

}  // namespace imbs
