#include "imbstream/layout.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace imbs {

namespace {

constexpr std::uint64_t kLayoutPurpose = 0x6c61796f7574ULL;  // "layout"

Point uniform_in_box(double lo, double hi, Rng& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    Point p{};
    for (auto& v : p) v = u(rng);
    return p;
}


Point sphere_radii(double r) {
    Point p{};
    p.fill(r);
    return p;
}

Point elliptic_radii(double r, Rng& rng) {
    std::uniform_real_distribution<double> jitter(0.85, 1.15);
    Point p{};
    for (auto& v : p) v = r * jitter(rng);
    return p;
}

bool clear_of(const Ellipsoid& e, const std::vector<Ellipsoid>& placed) {
    for (const auto& other : placed) {
        if (may_intersect(e, other)) return false;
    }
    return true;
}

void place_old(const ValidatedConfig& vc, ClassLayout& layout, Rng& rng) {
    const StreamConfig& c = vc.config();
    const double beta = c.geometry.border_width;
    std::vector<Ellipsoid> placed;
    for (ClassIndex ci = 0; ci < c.classes.size(); ++ci) {
        const ClassSpec& cls = c.classes[ci];
        if (cls.role == ClassRole::Majority) {
            layout.classes[ci].complement = true;
            continue;
        }
        const double r = subcluster_radius(c.geometry.minority_radius, cls.n_subclusters);
        const double margin = (1.0 + beta) * r;
        for (int s = 0; s < cls.n_subclusters; ++s) {
            bool ok = false;
            for (int attempt = 0; attempt < kPlacementAttempts && !ok; ++attempt) {
                // Prefer the middle of the space; widen to the whole cube if crowded.
                const bool central = attempt < kPlacementAttempts / 2;
                const double lo = central ? std::max(margin, 0.25) : margin;
                const double hi = central ? std::min(1.0 - margin, 0.75) : 1.0 - margin;
                if (lo > hi) continue;
                Ellipsoid e{uniform_in_box(lo, hi, rng), sphere_radii(r)};
                if (!e.scaled(1.0 + beta).inside_unit_cube() || !clear_of(e, placed)) continue;
                placed.push_back(e);
                layout.classes[ci].subclusters.push_back({e, 1.0 / cls.n_subclusters});
                ok = true;
            }
            if (!ok) {
                throw PlacementError("cannot place sub-cluster " + std::to_string(s) + " of class '" + cls.name +
                                     "' without intersections after " + std::to_string(kPlacementAttempts) +
                                     " attempts");
            }
        }
    }
}

void place_new(const ValidatedConfig& vc, ClassLayout& layout, Rng& rng) {
    const StreamConfig& c = vc.config();
    const double beta = c.geometry.border_width;
    Point middle{};
    middle.fill(0.5);
    const Ellipsoid majority{middle, elliptic_radii(c.geometry.new_majority_radius, rng)};

    std::optional<Ellipsoid> previous_minority;
    for (ClassIndex ci = 0; ci < c.classes.size(); ++ci) {
        const ClassSpec& cls = c.classes[ci];
        if (cls.role == ClassRole::Majority) {
            layout.classes[ci].subclusters.push_back({majority, 1.0});
            continue;
        }
        const double r = subcluster_radius(c.geometry.minority_radius, cls.n_subclusters);
        std::vector<Ellipsoid> own;
        for (int s = 0; s < cls.n_subclusters; ++s) {
            bool ok = false;
            for (int attempt = 0; attempt < kPlacementAttempts && !ok; ++attempt) {
                // Centers sit on the majority surface so every minority region
                // straddles the majority region.
                const Point u = random_direction(rng);
                Point center{};
                for (std::size_t d = 0; d < kNumAttributes; ++d) center[d] = middle[d] + u[d] * majority.radii[d];
                Ellipsoid e{center, elliptic_radii(r, rng)};
                if (!e.scaled(1.0 + beta).inside_unit_cube() || !clear_of(e, own)) continue;
                // Chain the first sub-cluster of consecutive minority classes so
                // that minority classes overlap pairwise along the chain.
                if (s == 0 && previous_minority) {
                    const double gap = distance(e.center, previous_minority->center);
                    const double reach = e.min_radius() + previous_minority->min_radius();
                    if (gap > 0.8 * reach || gap < 0.5 * reach) continue;
                }
                own.push_back(e);
                ok = true;
            }
            if (!ok) {
                throw PlacementError("cannot place sub-cluster " + std::to_string(s) + " of class '" + cls.name +
                                     "' after " + std::to_string(kPlacementAttempts) + " attempts");
            }
        }
        previous_minority = own.front();
        for (const auto& e : own) layout.classes[ci].subclusters.push_back({e, 1.0 / cls.n_subclusters});
    }
}

}  // namespace

Ellipsoid random_minority_region(const ClassLayout& layout, const Point& radii, bool central, Rng& rng) {
    Ellipsoid e{{}, radii};
    if (layout.variant == GeneratorVariant::Old) {
        const double margin = (1.0 + layout.border_width) * e.max_radius();
        double lo = central ? std::max(margin, 0.25) : margin;
        double hi = central ? std::min(1.0 - margin, 0.75) : 1.0 - margin;
        if (lo > hi) lo = hi = 0.5;
        e.center = uniform_in_box(lo, hi, rng);
        return e;
    }
    const Ellipsoid* majority = nullptr;
    for (const auto& cls : layout.classes) {
        if (cls.role == ClassRole::Majority && !cls.subclusters.empty()) majority = &cls.subclusters.front().region;
    }
    const Point u = random_direction(rng);
    for (std::size_t d = 0; d < kNumAttributes; ++d) {
        e.center[d] = majority ? majority->center[d] + u[d] * majority->radii[d] : 0.5 + 0.3 * u[d];
    }
    return e;
}

bool ClassLayout::in_foreign_core(const Point& p, ClassIndex own) const {
    for (ClassIndex c = 0; c < classes.size(); ++c) {
        if (c == own) continue;
        for (const auto& s : classes[c].subclusters) {
            if (s.weight > 0.0 && core(s).contains(p)) return true;
        }
    }
    return false;
}

bool ClassLayout::in_own_core(const Point& p, ClassIndex own) const {
    for (const auto& s : classes[own].subclusters) {
        if (s.weight > 0.0 && core(s).contains(p)) return true;
    }
    return false;
}

bool ClassLayout::in_any_minority_outer(const Point& p) const {
    for (const auto& cls : classes) {
        if (cls.role == ClassRole::Majority) continue;
        for (const auto& s : cls.subclusters) {
            if (s.weight > 0.0 && outer(s).contains(p)) return true;
        }
    }
    return false;
}

double ClassLayout::own_surface_distance(const Point& p, ClassIndex c) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : classes[c].subclusters) {
        if (s.weight > 0.0) best = std::min(best, s.region.surface_distance(p));
    }
    return best;
}

double ClassLayout::max_radius(ClassIndex c) const {
    double best = 0.0;
    for (const auto& s : classes[c].subclusters) {
        if (s.weight > 0.0) best = std::max(best, s.region.max_radius());
    }
    return best;
}

double subcluster_radius(double base_radius, int n) {
    return base_radius * std::pow(1.0 / static_cast<double>(n), 1.0 / static_cast<double>(kNumAttributes));
}

bool subclusters_disjoint(const ClassLayout& layout) {
    std::vector<std::pair<ClassIndex, const Ellipsoid*>> all;
    for (ClassIndex c = 0; c < layout.classes.size(); ++c) {
        if (layout.classes[c].role == ClassRole::Majority) continue;
        for (const auto& s : layout.classes[c].subclusters) {
            if (s.weight > 0.0) all.emplace_back(c, &s.region);
        }
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            const bool same_class = all[i].first == all[j].first;
            if (!same_class && layout.variant == GeneratorVariant::New) continue;
            if (may_intersect(*all[i].second, *all[j].second)) return false;
        }
    }
    return true;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng derived_rng(std::uint64_t seed, std::uint64_t purpose) {
    return Rng(splitmix64(seed ^ splitmix64(purpose)));
}

ClassLayout build_layout(const ValidatedConfig& config) {
    ClassLayout layout;
    layout.variant = config->generator;
    layout.border_width = config->geometry.border_width;
    layout.classes.resize(config.num_classes());
    for (ClassIndex c = 0; c < config.num_classes(); ++c) layout.classes[c].role = config->classes[c].role;
    Rng rng = derived_rng(config->seed, kLayoutPurpose);
    if (config->generator == GeneratorVariant::Old) {
        place_old(config, layout, rng);
    } else {
        place_new(config, layout, rng);
    }
    return layout;
}

}  // namespace imbs
