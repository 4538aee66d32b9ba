#include "imbstream/drift.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace imbs {

namespace {

constexpr std::uint64_t kPlanPurpose = 0x647269667470ULL;  // "driftp"
constexpr int kPlanAttempts = 50;
constexpr int kTrajectorySteps = 100;

bool is_geometry(DriftKind k) { return k == DriftKind::Split || k == DriftKind::Move; }

TypeProportions lerp_types(const TypeProportions& a, const TypeProportions& b, double p) {
    TypeProportions out{(1.0 - p) * a.safe + p * b.safe, (1.0 - p) * a.borderline + p * b.borderline,
                        (1.0 - p) * a.rare + p * b.rare};
    const double s = out.sum();
    out.safe /= s;
    out.borderline /= s;
    out.rare /= s;
    return out;
}

}  // namespace

double progress(const DriftSpec& spec, std::uint64_t t) {
    if (t <= spec.t_start) return 0.0;
    if (t >= spec.t_end) return 1.0;
    return static_cast<double>(t - spec.t_start) / static_cast<double>(spec.t_end - spec.t_start);
}

DriftEngine::DriftEngine(const ValidatedConfig& config)
    : config_(config.config()), minority_(config.minority_classes()), base_(build_layout(config)) {
    for (const auto& d : config_.drifts) drift_targets_.push_back(config.targets(d));

    bool any_geometry = false;
    for (const auto& d : config_.drifts) any_geometry = any_geometry || is_geometry(d.kind);
    if (!any_geometry) return;

    Rng rng = derived_rng(config_.seed, kPlanPurpose);
    for (int attempt = 0; attempt < kPlanAttempts; ++attempt) {
        auto plans = plan_geometry(rng);
        if (plans.empty()) continue;
        if (trajectory_clear(plans)) {
            plans_ = std::move(plans);
            return;
        }
    }
    throw PlacementError("cannot plan split/move targets without intersecting sub-clusters after " +
                         std::to_string(kPlanAttempts) + " attempts");
}

namespace {

// A sub-cluster travelling in a straight line while drift progress goes 0 -> 1.
struct Path {
    Point from{};
    Point to{};
    double radius = 0.0;
    ClassIndex cls = 0;
    bool split = false;
};

// Smallest centre distance of two paths driven by the same progress value.
double closest_approach(const Path& a, const Path& b) {
    Point d0{}, dv{};
    double dd = 0.0, dvdv = 0.0, d0dv = 0.0;
    for (std::size_t k = 0; k < kNumAttributes; ++k) {
        d0[k] = a.from[k] - b.from[k];
        dv[k] = (a.to[k] - a.from[k]) - (b.to[k] - b.from[k]);
        dd += d0[k] * d0[k];
        dvdv += dv[k] * dv[k];
        d0dv += d0[k] * dv[k];
    }
    double p = dvdv > 0.0 ? std::clamp(-d0dv / dvdv, 0.0, 1.0) : 0.0;
    return std::sqrt(std::max(0.0, dd + 2.0 * p * d0dv + p * p * dvdv));
}

bool paths_clear(const Path& a, const Path& b, GeneratorVariant variant) {
    if (a.cls != b.cls) {
        if (variant == GeneratorVariant::New) return true;
        return closest_approach(a, b) > a.radius + b.radius;
    }
    if (a.split || b.split) return distance(a.to, b.to) > a.radius + b.radius;
    return closest_approach(a, b) > a.radius + b.radius;
}

}  // namespace

std::vector<DriftEngine::GeometryPlan> DriftEngine::plan_geometry(Rng& rng) const {
    const GeometryParams& g = config_.geometry;
    std::vector<GeometryPlan> plans;

    // Sub-clusters that stay put, including split roots (they fade in place).
    std::vector<bool> moving(base_.classes.size(), false);
    for (std::size_t di = 0; di < config_.drifts.size(); ++di) {
        if (config_.drifts[di].kind != DriftKind::Move) continue;
        for (ClassIndex c : drift_targets_[di]) moving[c] = true;
    }
    std::vector<Path> paths;
    for (ClassIndex c = 0; c < base_.classes.size(); ++c) {
        if (base_.classes[c].role == ClassRole::Majority || moving[c]) continue;
        for (const auto& s : base_.classes[c].subclusters) {
            paths.push_back({s.region.center, s.region.center, s.region.max_radius(), c, false});
        }
    }
    // Split roots are exempt from checks against their own pieces.
    for (std::size_t di = 0; di < config_.drifts.size(); ++di) {
        if (config_.drifts[di].kind != DriftKind::Split) continue;
        for (ClassIndex c : drift_targets_[di]) {
            for (auto& p : paths) {
                if (p.cls == c) p.split = true;
            }
        }
    }

    for (std::size_t di = 0; di < config_.drifts.size(); ++di) {
        const DriftSpec& d = config_.drifts[di];
        if (!is_geometry(d.kind)) continue;
        for (ClassIndex c : drift_targets_[di]) {
            GeometryPlan plan{c, di, {}};
            const auto& origin = base_.classes[c].subclusters;
            const int n = d.kind == DriftKind::Split ? *d.to.subclusters : static_cast<int>(origin.size());
            for (int i = 0; i < n; ++i) {
                bool ok = false;
                for (int a = 0; a < kPlacementAttempts && !ok; ++a) {
                    Ellipsoid e;
                    Point from{};
                    if (d.kind == DriftKind::Split) {
                        const Ellipsoid& root = origin.front().region;
                        const double r = subcluster_radius(root.max_radius(), n);
                        std::uniform_real_distribution<double> dist(g.split_min_offset * root.max_radius(),
                                                                    g.split_max_offset * root.max_radius());
                        const Point dir = random_direction(rng);
                        const double len = dist(rng);
                        for (std::size_t k = 0; k < kNumAttributes; ++k) {
                            e.center[k] = root.center[k] + dir[k] * len;
                            e.radii[k] = root.radii[k] / root.max_radius() * r;
                        }
                        from = root.center;
                    } else {
                        e = random_minority_region(base_, origin[i].region.radii, a < kPlacementAttempts / 2, rng);
                        from = origin[i].region.center;
                    }
                    if (!e.scaled(1.0 + g.border_width).inside_unit_cube()) continue;
                    const Path candidate{from, e.center, e.max_radius(), c, d.kind == DriftKind::Split};
                    bool clear = true;
                    for (const auto& other : paths) {
                        if (!paths_clear(candidate, other, base_.variant)) {
                            clear = false;
                            break;
                        }
                    }
                    if (!clear) continue;
                    paths.push_back(candidate);
                    plan.targets.push_back(e);
                    ok = true;
                }
                if (!ok) return {};
            }
            plans.push_back(std::move(plan));
        }
    }
    return plans;
}

bool DriftEngine::trajectory_clear(const std::vector<GeometryPlan>& plans) const {
    // Sub-clusters fanning out of one splitting cluster necessarily overlap
    // while the split is in progress; only foreign pairs are checked then.
    DriftEngine probe = *this;
    probe.plans_ = plans;
    std::vector<std::uint64_t> times;
    for (const auto& plan : plans) {
        const DriftSpec& d = config_.drifts[plan.drift];
        for (int s = 0; s <= kTrajectorySteps; ++s) {
            times.push_back(d.t_start + (d.t_end - d.t_start) * static_cast<std::uint64_t>(s) / kTrajectorySteps);
        }
    }
    for (std::uint64_t t : times) {
        const ClassLayout layout = probe.layout_at(t);
        std::vector<bool> splitting(layout.classes.size(), false);
        for (const auto& plan : plans) {
            const DriftSpec& d = config_.drifts[plan.drift];
            const double p = progress(d, t);
            if (d.kind == DriftKind::Split && p > 0.0 && p < 1.0) splitting[plan.cls] = true;
        }
        for (ClassIndex a = 0; a < layout.classes.size(); ++a) {
            if (layout.classes[a].role == ClassRole::Majority) continue;
            for (ClassIndex b = a; b < layout.classes.size(); ++b) {
                if (layout.classes[b].role == ClassRole::Majority) continue;
                if (a == b && splitting[a]) continue;
                if (a != b && layout.variant == GeneratorVariant::New) continue;
                const auto& sa = layout.classes[a].subclusters;
                const auto& sb = layout.classes[b].subclusters;
                for (std::size_t i = 0; i < sa.size(); ++i) {
                    for (std::size_t j = (a == b ? i + 1 : 0); j < sb.size(); ++j) {
                        if (sa[i].weight > 0.0 && sb[j].weight > 0.0 && may_intersect(sa[i].region, sb[j].region)) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    return true;
}

ClassLayout DriftEngine::layout_at(std::uint64_t t) const {
    ClassLayout layout = base_;
    for (const auto& plan : plans_) {
        const DriftSpec& d = config_.drifts[plan.drift];
        const double p = progress(d, t);
        if (p == 0.0) continue;
        auto& subs = layout.classes[plan.cls].subclusters;
        if (d.kind == DriftKind::Split) {
            const SubCluster root = subs.front();
            subs.clear();
            if (p < 1.0) subs.push_back({root.region, 1.0 - p});
            const double w = p / static_cast<double>(plan.targets.size());
            for (const auto& target : plan.targets) {
                subs.push_back({Ellipsoid{lerp(root.region.center, target.center, p), target.radii}, w});
            }
        } else {
            for (std::size_t i = 0; i < subs.size(); ++i) {
                subs[i].region.center = lerp(subs[i].region.center, plan.targets[i].center, p);
            }
        }
    }
    return layout;
}

std::vector<double> DriftEngine::ratios_at(std::uint64_t t) const {
    std::vector<double> ratios;
    for (const auto& c : config_.classes) ratios.push_back(c.ratio);
    bool touched = false;
    for (std::size_t di = 0; di < config_.drifts.size(); ++di) {
        const DriftSpec& d = config_.drifts[di];
        if (d.kind != DriftKind::ImbalanceRatio) continue;
        const double p = progress(d, t);
        if (p == 0.0) continue;
        touched = true;
        const double r = p == 1.0 ? *d.to.ratio : (1.0 - p) * *d.from.ratio + p * *d.to.ratio;
        for (ClassIndex c : drift_targets_[di]) ratios[c] = r;
    }
    if (!touched) return ratios;

    // The majority class absorbs the remainder, then the vector is renormalized.
    double minority_sum = 0.0;
    ClassIndex majority = 0;
    for (ClassIndex c = 0; c < ratios.size(); ++c) {
        if (config_.classes[c].role == ClassRole::Minority) {
            minority_sum += ratios[c];
        } else {
            majority = c;
        }
    }
    ratios[majority] = 1.0 - minority_sum;
    double sum = 0.0;
    for (double r : ratios) sum += r;
    for (double& r : ratios) r /= sum;
    return ratios;
}

std::vector<TypeProportions> DriftEngine::types_at(std::uint64_t t) const {
    std::vector<TypeProportions> types;
    for (const auto& c : config_.classes) types.push_back(c.type_proportions);
    for (std::size_t di = 0; di < config_.drifts.size(); ++di) {
        const DriftSpec& d = config_.drifts[di];
        if (d.kind != DriftKind::TypeProportion) continue;
        const double p = progress(d, t);
        if (p == 0.0) continue;
        for (ClassIndex c : drift_targets_[di]) types[c] = p == 1.0 ? *d.to.types : lerp_types(*d.from.types, *d.to.types, p);
    }
    return types;
}

EffectiveState DriftEngine::state_at(std::uint64_t t) const {
    return EffectiveState{t, ratios_at(t), types_at(t), layout_at(t)};
}

bool DriftEngine::changing_at(std::uint64_t t) const {
    for (const auto& d : config_.drifts) {
        if (t > d.t_start && t <= d.t_end) return true;
    }
    return false;
}

EffectiveState effective_state(const ValidatedConfig& config, std::uint64_t t) {
    return DriftEngine(config).state_at(t);
}

}  // namespace imbs
