#pragma once

#include <cstdint>
#include <vector>

#include "imbstream/layout.hpp"
#include "imbstream/stream_model.hpp"

namespace imbs {

// 0 up to t_start, 1 from t_end on, linear in between.
double progress(const DriftSpec& spec, std::uint64_t t);

struct EffectiveState {
    std::uint64_t t = 0;
    std::vector<double> ratios;
    std::vector<TypeProportions> type_proportions;
    ClassLayout layout;

    bool operator==(const EffectiveState&) const = default;
};

// Time-varying view of a validated config. Split and move targets are drawn
// from the config seed at construction; construction fails with
// PlacementError if any interpolation step (1% increments) would make
// sub-clusters intersect.
class DriftEngine {
public:
    explicit DriftEngine(const ValidatedConfig& config);

    EffectiveState state_at(std::uint64_t t) const;
    std::vector<double> ratios_at(std::uint64_t t) const;
    std::vector<TypeProportions> types_at(std::uint64_t t) const;
    ClassLayout layout_at(std::uint64_t t) const;

    const ClassLayout& base_layout() const { return base_; }
    // True when any drift is in progress at t (parameters differ from t-1).
    bool changing_at(std::uint64_t t) const;

private:
    struct GeometryPlan {
        ClassIndex cls = 0;
        std::size_t drift = 0;
        std::vector<Ellipsoid> targets;
    };

    ClassLayout layout_for(const std::vector<double>& geometry_progress) const;
    std::vector<GeometryPlan> plan_geometry(Rng& rng) const;
    bool trajectory_clear(const std::vector<GeometryPlan>& plans) const;

    StreamConfig config_;
    std::vector<ClassIndex> minority_;
    std::vector<std::vector<ClassIndex>> drift_targets_;
    ClassLayout base_;
    std::vector<GeometryPlan> plans_;
};

// Pure convenience wrapper: builds the engine and evaluates it at t.
EffectiveState effective_state(const ValidatedConfig& config, std::uint64_t t);

}  // namespace imbs
