#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "imbstream/geometry.hpp"
#include "imbstream/stream_model.hpp"

namespace imbs {

inline constexpr int kPlacementAttempts = 10'000;

class PlacementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SubCluster {
    Ellipsoid region;
    double weight = 1.0;

    bool operator==(const SubCluster&) const = default;
};

struct ClassRegion {
    ClassRole role = ClassRole::Minority;
    std::vector<SubCluster> subclusters;
    // Old generator majority: the unit cube minus every minority core.
    bool complement = false;

    bool operator==(const ClassRegion&) const = default;
};

// Geometric placement of every class at one point in time.
struct ClassLayout {
    GeneratorVariant variant = GeneratorVariant::Old;
    double border_width = 0.3;
    std::vector<ClassRegion> classes;

    Ellipsoid core(const SubCluster& s) const { return s.region.scaled(1.0 - border_width); }
    Ellipsoid outer(const SubCluster& s) const { return s.region.scaled(1.0 + border_width); }

    // True if p lies in the safe core of a weighted sub-cluster of any class other than `own`.
    bool in_foreign_core(const Point& p, ClassIndex own) const;
    bool in_own_core(const Point& p, ClassIndex own) const;
    // True if p lies in the (1+beta)-inflation of any minority sub-cluster.
    bool in_any_minority_outer(const Point& p) const;
    // Smallest surface distance from p to a weighted sub-cluster of class c.
    double own_surface_distance(const Point& p, ClassIndex c) const;
    double max_radius(ClassIndex c) const;

    bool operator==(const ClassLayout&) const = default;
};

// Deterministic function of the config (including its seed).
ClassLayout build_layout(const ValidatedConfig& config);

// Radius of one sub-cluster when a class of base radius r is divided into n parts
// of equal total volume.
double subcluster_radius(double base_radius, int n);

// Conservative bounding-sphere check over weighted sub-clusters: within each
// class always, and across minority classes for the old generator (the new
// generator overlaps minority classes on purpose).
bool subclusters_disjoint(const ClassLayout& layout);

// Draws a candidate minority region with the given radii following the
// variant's placement rule (old: inside the central box, widening to the
// whole cube when `central` is false; new: centered on the majority
// surface). The caller checks intersections.
Ellipsoid random_minority_region(const ClassLayout& layout, const Point& radii, bool central, Rng& rng);

// Derived RNG for a named purpose so that layout planning and sampling
// draw from independent sequences.
Rng derived_rng(std::uint64_t seed, std::uint64_t purpose);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace imbs
