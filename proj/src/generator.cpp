#include "imbstream/generator.hpp"

#include <cmath>
#include <string>

namespace imbs {

namespace {

constexpr std::uint64_t kSamplePurpose = 0x73616d706c65ULL;  // "sample"
constexpr double kMaxOverlapProbability = 0.9;

std::size_t pick(const std::vector<double>& weights, double u) {
    double total = 0.0;
    for (double w : weights) total += w;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last = i;
        acc += weights[i] / total;
        if (u < acc) return i;
    }
    return last;
}

bool in_unit_cube(const Point& p) {
    for (double v : p) {
        if (v < 0.0 || v > 1.0) return false;
    }
    return true;
}

// Share of a (1-beta, 1+beta) shell's volume that lies outside the surface.
double outer_shell_fraction(double beta) {
    constexpr double n = static_cast<double>(kNumAttributes);
    const double hi = std::pow(1.0 + beta, n);
    const double lo = std::pow(1.0 - beta, n);
    return hi > lo ? (hi - 1.0) / (hi - lo) : 0.0;
}

}  // namespace

ExampleSampler::ExampleSampler(const GeometryParams& geometry, Distribution distribution)
    : geometry_(geometry), distribution_(distribution) {}

void ExampleSampler::set_state(const EffectiveState& state) {
    state_ = state;
    const std::size_t n = state_.ratios.size();
    islands_.resize(n);
    companion_.assign(n, 0.0);

    ClassIndex majority = 0;
    double total = 0.0;
    const double outer = outer_shell_fraction(geometry_.border_width);
    for (ClassIndex c = 0; c < n; ++c) {
        if (state_.layout.classes[c].role == ClassRole::Majority) {
            majority = c;
            continue;
        }
        companion_[c] = geometry_.majority_overlap * state_.ratios[c] * state_.type_proportions[c].borderline * outer;
        total += companion_[c];
    }
    overlap_probability_ = state_.ratios[majority] > 0.0
                               ? std::min(kMaxOverlapProbability, total / state_.ratios[majority])
                               : 0.0;
}

const SubCluster& ExampleSampler::pick_subcluster(ClassIndex c, Rng& rng) const {
    const auto& subs = state_.layout.classes[c].subclusters;
    std::vector<double> w;
    w.reserve(subs.size());
    for (const auto& s : subs) w.push_back(s.weight);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return subs[pick(w, u(rng))];
}

void ExampleSampler::budget_exceeded(ClassIndex c, ExampleType type) const {
    throw PlacementError(std::string("rejection budget of ") + std::to_string(kRejectionBudget) +
                         " exceeded placing a " + to_string(type) + " example of class " + std::to_string(c));
}

Point ExampleSampler::sample(ClassIndex c, ExampleType type, Rng& rng) {
    if (state_.layout.classes[c].role == ClassRole::Majority) return sample_majority(c, rng);
    switch (type) {
        case ExampleType::Safe: return sample_safe(c, rng);
        case ExampleType::Borderline: return sample_borderline(c, rng);
        case ExampleType::Rare: return sample_rare(c, rng);
    }
    return sample_safe(c, rng);
}

Point ExampleSampler::sample_safe(ClassIndex c, Rng& rng) {
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
        const SubCluster& s = pick_subcluster(c, rng);
        const Point p = sample_in_ellipsoid(state_.layout.core(s), distribution_, rng, &counters_);
        if (!state_.layout.in_foreign_core(p, c)) return p;
    }
    budget_exceeded(c, ExampleType::Safe);
}

Point ExampleSampler::sample_borderline(ClassIndex c, Rng& rng) {
    const double beta = geometry_.border_width;
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
        const SubCluster& s = pick_subcluster(c, rng);
        const Point p = sample_in_shell(s.region, 1.0 - beta, 1.0 + beta, rng);
        if (in_unit_cube(p) && !state_.layout.in_foreign_core(p, c)) return p;
    }
    budget_exceeded(c, ExampleType::Borderline);
}

double ExampleSampler::rare_min_distance(ClassIndex c) const {
    return geometry_.rare_min_distance * state_.layout.max_radius(c);
}

double ExampleSampler::rare_max_distance(ClassIndex c) const {
    return geometry_.rare_max_distance * state_.layout.max_radius(c);
}

bool ExampleSampler::anchor_valid(const Point& anchor, ClassIndex c) const {
    const double rho = geometry_.rare_island_radius;
    for (double v : anchor) {
        if (v < rho || v > 1.0 - rho) return false;
    }
    if (state_.layout.in_any_minority_outer(anchor)) return false;
    const double d = state_.layout.own_surface_distance(anchor, c);
    return d > rare_min_distance(c) + rho && d <= rare_max_distance(c) + rho;
}

Point ExampleSampler::sample_rare(ClassIndex c, Rng& rng) {
    Island& island = islands_[c];
    if (island.remaining <= 0 || !anchor_valid(island.anchor, c)) {
        const ClassLayout& layout = state_.layout;
        const Ellipsoid* majority_region = nullptr;
        if (layout.variant == GeneratorVariant::New) {
            for (const auto& cls : layout.classes) {
                if (cls.role == ClassRole::Majority) majority_region = &cls.subclusters.front().region;
            }
        }
        bool found = false;
        for (int attempt = 0; attempt < kRejectionBudget && !found; ++attempt) {
            const Point a = majority_region ? sample_in_ellipsoid(*majority_region, Distribution::Uniform, rng)
                                            : sample_in_unit_cube(rng);
            if (anchor_valid(a, c)) {
                island.anchor = a;
                found = true;
            }
        }
        if (!found) budget_exceeded(c, ExampleType::Rare);
        std::uniform_int_distribution<int> group(1, 3);
        island.remaining = group(rng);
    }
    --island.remaining;
    Ellipsoid ball{island.anchor, {}};
    ball.radii.fill(geometry_.rare_island_radius);
    return sample_in_ellipsoid(ball, Distribution::Uniform, rng);
}

Point ExampleSampler::sample_majority(ClassIndex c, Rng& rng) {
    const ClassLayout& layout = state_.layout;
    const double beta = geometry_.border_width;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const bool in_band = overlap_probability_ > 0.0 && u(rng) < overlap_probability_;
    const std::size_t owner = in_band ? pick(companion_, u(rng)) : 0;
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
        Point p{};
        if (in_band) {
            const SubCluster& s = pick_subcluster(owner, rng);
            p = sample_in_shell(s.region, 1.0, 1.0 + beta, rng);
            if (!in_unit_cube(p)) continue;
        } else if (layout.classes[c].complement) {
            p = sample_in_unit_cube(rng);
        } else {
            const SubCluster& s = pick_subcluster(c, rng);
            p = sample_in_ellipsoid(layout.core(s), distribution_, rng, &counters_);
        }
        if (!layout.in_foreign_core(p, c)) return p;
    }
    budget_exceeded(c, ExampleType::Safe);
}

StreamGenerator::StreamGenerator(const ValidatedConfig& config)
    : length_(config->length),
      num_classes_(config.num_classes()),
      engine_(config),
      sampler_(config->geometry, config->distribution),
      rng_(derived_rng(config->seed, kSamplePurpose)) {
    const EffectiveState s = engine_.state_at(1);
    sampler_.set_state(s);
    ratios_ = s.ratios;
    types_ = s.type_proportions;
}

LabeledExample StreamGenerator::next() {
    const std::uint64_t t = ++position_;
    if (engine_.changing_at(t)) {
        const EffectiveState s = engine_.state_at(t);
        sampler_.set_state(s);
        ratios_ = s.ratios;
        types_ = s.type_proportions;
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LabeledExample ex;
    ex.t = t;
    ex.y = pick(ratios_, u(rng_));
    const TypeProportions& tp = types_[ex.y];
    const ExampleType type = static_cast<ExampleType>(pick({tp.safe, tp.borderline, tp.rare}, u(rng_)));
    ex.gen_type = sampler_.layout().classes[ex.y].role == ClassRole::Majority ? ExampleType::Safe : type;
    ex.x = sampler_.sample(ex.y, *ex.gen_type, rng_);
    return ex;
}

std::vector<LabeledExample> generate_stream(const ValidatedConfig& config) {
    StreamGenerator gen(config);
    std::vector<LabeledExample> out;
    out.reserve(gen.length());
    while (gen.has_next()) out.push_back(gen.next());
    return out;
}

}  // namespace imbs
