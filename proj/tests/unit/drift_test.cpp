#include <gtest/gtest.h>

#include <cmath>

#include "imbstream/drift.hpp"
#include "test_util.hpp"

using namespace imbs;
using imbs::testing::drift;
using imbs::testing::three_class;

namespace {

StreamConfig with_split(int n) {
    auto c = three_class(0.3, 0.3, 250'000);
    DriftSpec d = drift(DriftKind::Split);
    d.to.subclusters = n;
    c.drifts = {d};
    return c;
}

StreamConfig with_move(int n) {
    auto c = three_class(0.3, 0.3, 250'000);
    c.classes[1].n_subclusters = n;
    c.classes[2].n_subclusters = n;
    c.drifts = {drift(DriftKind::Move)};
    return c;
}

StreamConfig combined() {
    auto c = with_split(5);
    DriftSpec imb = drift(DriftKind::ImbalanceRatio);
    imb.to.ratio = 0.01;
    DriftSpec types = drift(DriftKind::TypeProportion);
    types.to.types = TypeProportions{0.4, 0.0, 0.6};
    c.drifts.push_back(imb);
    c.drifts.push_back(types);
    return c;
}

std::vector<std::uint64_t> drift_grid() {
    std::vector<std::uint64_t> ts;
    for (std::uint64_t t = 70'000; t <= 100'000; t += 300) ts.push_back(t);
    return ts;
}

}  // namespace

TEST(Progress, PinnedPoints) {
    const DriftSpec d = drift(DriftKind::ImbalanceRatio);
    EXPECT_EQ(progress(d, 1), 0.0);
    EXPECT_EQ(progress(d, 70'000), 0.0);
    EXPECT_DOUBLE_EQ(progress(d, 85'000), 0.5);
    EXPECT_EQ(progress(d, 100'000), 1.0);
    EXPECT_EQ(progress(d, 250'000), 1.0);
    double last = 0.0;
    for (std::uint64_t t = 70'000; t <= 100'000; t += 17) {
        const double p = progress(d, t);
        ASSERT_GE(p, last);
        last = p;
    }
}

TEST(DriftEngine, ImbalanceDriftReachesOnePercent) {
    auto c = three_class(0.3, 0.3, 250'000);
    DriftSpec d = drift(DriftKind::ImbalanceRatio);
    d.to.ratio = 0.01;
    c.drifts = {d};
    const auto s = effective_state(validate_or_throw(c), 100'000);
    ASSERT_EQ(s.ratios.size(), 3u);
    EXPECT_NEAR(s.ratios[0], 0.98, 1e-12);
    EXPECT_NEAR(s.ratios[1], 0.01, 1e-12);
    EXPECT_NEAR(s.ratios[2], 0.01, 1e-12);
}

TEST(DriftEngine, BorderlineDriftMidpoint) {
    auto c = three_class(0.1, 0.1, 250'000);
    DriftSpec d = drift(DriftKind::TypeProportion);
    d.to.types = TypeProportions{0.4, 0.6, 0.0};
    c.drifts = {d};
    const auto s = effective_state(validate_or_throw(c), 85'000);
    for (ClassIndex k : {1, 2}) {
        EXPECT_NEAR(s.type_proportions[k].safe, 0.7, 1e-12);
        EXPECT_NEAR(s.type_proportions[k].borderline, 0.3, 1e-12);
        EXPECT_NEAR(s.type_proportions[k].rare, 0.0, 1e-12);
    }
    EXPECT_EQ(s.type_proportions[0], TypeProportions{});
}

TEST(DriftEngine, SingleTargetDriftLeavesOtherClassesAlone) {
    auto c = three_class(0.1, 0.1, 250'000);
    DriftSpec d = drift(DriftKind::TypeProportion);
    d.target = "c2";
    d.to.types = TypeProportions{0.0, 0.0, 1.0};
    c.drifts = {d};
    const auto s = effective_state(validate_or_throw(c), 200'000);
    EXPECT_EQ(s.type_proportions[1], TypeProportions{});
    EXPECT_EQ(s.type_proportions[2], (TypeProportions{0.0, 0.0, 1.0}));
}

TEST(DriftEngine, SplitAtStartEqualsStationaryLayout) {
    const auto drifting = validate_or_throw(with_split(5));
    auto still = with_split(5);
    still.drifts.clear();
    const DriftEngine engine(drifting);
    EXPECT_EQ(engine.layout_at(70'000), build_layout(validate_or_throw(still)));
    EXPECT_EQ(engine.layout_at(70'000), engine.layout_at(1));
}

TEST(DriftEngine, SplitEndState) {
    for (int n : {3, 5, 7}) {
        const auto vc = validate_or_throw(with_split(n));
        const DriftEngine engine(vc);
        const ClassLayout start = engine.layout_at(1);
        const ClassLayout end = engine.layout_at(100'000);
        for (ClassIndex k : {1, 2}) {
            const auto& root = start.classes[k].subclusters.at(0).region;
            const auto& subs = end.classes[k].subclusters;
            ASSERT_EQ(subs.size(), static_cast<std::size_t>(n));
            for (const auto& s : subs) {
                EXPECT_DOUBLE_EQ(s.weight, 1.0 / n);
                const double off = distance(s.region.center, root.center);
                EXPECT_GE(off, 2.0 * root.max_radius() - 1e-12);
                EXPECT_LE(off, 4.0 * root.max_radius() + 1e-12);
                EXPECT_NEAR(s.region.max_radius(), subcluster_radius(root.max_radius(), n), 1e-12);
                EXPECT_TRUE(s.region.scaled(1.0 + vc->geometry.border_width).inside_unit_cube());
            }
        }
        EXPECT_TRUE(subclusters_disjoint(end)) << n;
    }
}

TEST(DriftEngine, SplitIsMonotone) {
    const DriftEngine engine(validate_or_throw(with_split(5)));
    const ClassLayout start = engine.layout_at(1);
    std::vector<double> last_offset(5, 0.0);
    double last_root = 1.0;
    for (std::uint64_t t : drift_grid()) {
        if (t == 70'000 || t == 100'000) continue;
        const ClassLayout layout = engine.layout_at(t);
        const auto& subs = layout.classes[1].subclusters;
        ASSERT_EQ(subs.size(), 6u);
        ASSERT_LE(subs[0].weight, last_root);
        last_root = subs[0].weight;
        double total = 0.0;
        for (std::size_t i = 0; i < subs.size(); ++i) {
            total += subs[i].weight;
            if (i == 0) continue;
            const double off = distance(subs[i].region.center, start.classes[1].subclusters[0].region.center);
            ASSERT_GE(off, last_offset[i - 1] - 1e-12);
            last_offset[i - 1] = off;
        }
        ASSERT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(DriftEngine, MovePathsStayDisjoint) {
    for (int n : {3, 5, 7}) {
        const DriftEngine engine(validate_or_throw(with_move(n)));
        const ClassLayout start = engine.layout_at(1);
        const ClassLayout end = engine.layout_at(100'000);
        ASSERT_NE(start, end);
        for (int step = 0; step <= 100; ++step) {
            const ClassLayout l = engine.layout_at(70'000 + 300 * static_cast<std::uint64_t>(step));
            ASSERT_TRUE(subclusters_disjoint(l)) << "n=" << n << " step " << step;
        }
        for (ClassIndex k : {1, 2}) {
            ASSERT_EQ(end.classes[k].subclusters.size(), static_cast<std::size_t>(n));
            for (std::size_t i = 0; i < end.classes[k].subclusters.size(); ++i) {
                EXPECT_EQ(end.classes[k].subclusters[i].region.radii, start.classes[k].subclusters[i].region.radii);
            }
        }
    }
}

TEST(DriftEngine, BoundaryAgreementAndStationarity) {
    const auto vc = validate_or_throw(combined());
    const DriftEngine engine(vc);
    const auto before = engine.state_at(1);
    for (std::uint64_t t : {2ull, 1'000ull, 69'999ull, 70'000ull}) {
        auto s = engine.state_at(t);
        s.t = 1;
        EXPECT_EQ(s, before) << t;
    }
    ASSERT_EQ(before.ratios.size(), 3u);
    EXPECT_NEAR(before.ratios[0], 0.4, 1e-12);
    EXPECT_NEAR(before.ratios[1], 0.3, 1e-12);
    EXPECT_EQ(before.type_proportions[1], TypeProportions{});

    const auto after = engine.state_at(100'000);
    for (std::uint64_t t : {100'001ull, 180'000ull, 250'000ull}) {
        auto s = engine.state_at(t);
        s.t = 100'000;
        EXPECT_EQ(s, after) << t;
    }
    EXPECT_EQ(after.type_proportions[1], (TypeProportions{0.4, 0.0, 0.6}));
    EXPECT_NEAR(after.ratios[1], 0.01, 1e-15);
    EXPECT_EQ(after.layout.classes[1].subclusters.size(), 5u);
}

TEST(DriftEngine, ScalarParametersAreMonotone) {
    const DriftEngine engine(validate_or_throw(combined()));
    auto prev = engine.state_at(70'000);
    for (std::uint64_t t : drift_grid()) {
        const auto s = engine.state_at(t);
        double sum = 0.0;
        for (double r : s.ratios) sum += r;
        ASSERT_NEAR(sum, 1.0, 1e-12);
        ASSERT_GE(s.ratios[0], prev.ratios[0]);
        for (ClassIndex k : {1, 2}) {
            ASSERT_LE(s.ratios[k], prev.ratios[k]);
            ASSERT_LE(s.type_proportions[k].safe, prev.type_proportions[k].safe + 1e-15);
            ASSERT_GE(s.type_proportions[k].rare, prev.type_proportions[k].rare - 1e-15);
            ASSERT_NEAR(s.type_proportions[k].sum(), 1.0, 1e-12);
        }
        prev = s;
    }
}

TEST(DriftEngine, ChangingOnlyInsideWindow) {
    const DriftEngine engine(validate_or_throw(combined()));
    EXPECT_FALSE(engine.changing_at(70'000));
    EXPECT_TRUE(engine.changing_at(70'001));
    EXPECT_TRUE(engine.changing_at(100'000));
    EXPECT_FALSE(engine.changing_at(100'001));
}

TEST(DriftEngine, PlanningIsDeterministic) {
    const auto vc = validate_or_throw(with_move(5));
    EXPECT_EQ(DriftEngine(vc).layout_at(100'000), DriftEngine(vc).layout_at(100'000));
}

TEST(DriftEngine, ImpossibleSplitIsAPlacementError) {
    auto c = with_split(7);
    c.geometry.split_min_offset = 20.0;
    c.geometry.split_max_offset = 30.0;
    const auto vc = validate_or_throw(c);
    EXPECT_THROW(DriftEngine{vc}, PlacementError);
}
