#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "imbstream/drift.hpp"
#include "imbstream/geometry.hpp"
#include "imbstream/layout.hpp"
#include "imbstream/stream_model.hpp"

namespace imbs {

inline constexpr int kRejectionBudget = 10'000;
// Bumped whenever the same config would yield a different stream.
inline constexpr std::uint32_t kGeneratorRevision = 1;

// Places single examples of a given class and type into the current layout.
// Holds the rare-island registry, so it is stateful across calls.
class ExampleSampler {
public:
    ExampleSampler(const GeometryParams& geometry, Distribution distribution);

    void set_state(const EffectiveState& state);
    const ClassLayout& layout() const { return state_.layout; }

    // Throws PlacementError if rejection sampling exceeds kRejectionBudget.
    Point sample(ClassIndex c, ExampleType type, Rng& rng);

    // Fraction of majority examples placed in the outer border bands.
    double majority_overlap_probability() const { return overlap_probability_; }
    const SamplingCounters& counters() const { return counters_; }

    // d_min for class c under the current layout.
    double rare_min_distance(ClassIndex c) const;
    double rare_max_distance(ClassIndex c) const;

private:
    struct Island {
        Point anchor{};
        int remaining = 0;
    };

    Point sample_safe(ClassIndex c, Rng& rng);
    Point sample_borderline(ClassIndex c, Rng& rng);
    Point sample_rare(ClassIndex c, Rng& rng);
    Point sample_majority(ClassIndex c, Rng& rng);
    const SubCluster& pick_subcluster(ClassIndex c, Rng& rng) const;
    bool anchor_valid(const Point& anchor, ClassIndex c) const;
    [[noreturn]] void budget_exceeded(ClassIndex c, ExampleType type) const;

    GeometryParams geometry_;
    Distribution distribution_;
    EffectiveState state_;
    std::vector<Island> islands_;
    std::vector<double> companion_;  // per class: majority mass placed in its border band
    double overlap_probability_ = 0.0;
    SamplingCounters counters_;
};

// Single-pass, deterministic stream of examples for a validated config.
class StreamGenerator {
public:
    explicit StreamGenerator(const ValidatedConfig& config);

    bool has_next() const { return position_ < length_; }
    // Precondition: has_next().
    LabeledExample next();
    std::uint64_t position() const { return position_; }
    std::uint64_t length() const { return length_; }
    std::size_t num_classes() const { return num_classes_; }

    const DriftEngine& engine() const { return engine_; }
    const ExampleSampler& sampler() const { return sampler_; }

private:
    std::uint64_t length_;
    std::size_t num_classes_;
    std::uint64_t position_ = 0;
    DriftEngine engine_;
    ExampleSampler sampler_;
    Rng rng_;
    std::vector<double> ratios_;
    std::vector<TypeProportions> types_;
};

std::vector<LabeledExample> generate_stream(const ValidatedConfig& config);

}  // namespace imbs
