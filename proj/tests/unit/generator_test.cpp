#include <gtest/gtest.h>

#include <cmath>

#include "imbstream/generator.hpp"
#include "test_util.hpp"

using namespace imbs;
using imbs::testing::three_class;

namespace {

std::vector<std::size_t> class_counts(const std::vector<LabeledExample>& s, std::size_t k) {
    std::vector<std::size_t> n(k, 0);
    for (const auto& ex : s) ++n[ex.y];
    return n;
}

double five_sigma(double n, double p) { return 5.0 * std::sqrt(n * p * (1.0 - p)); }

}  // namespace

TEST(Generator, EmitsExactlyLengthExamples) {
    StreamGenerator gen(validate_or_throw(three_class(0.1, 0.1, 1234)));
    std::uint64_t n = 0;
    while (gen.has_next()) {
        const auto ex = gen.next();
        ASSERT_EQ(ex.t, ++n);
    }
    EXPECT_EQ(n, 1234u);
}

TEST(Generator, ImbalancedClassCountsWithinBinomialBand) {
    const auto s = generate_stream(validate_or_throw(three_class(0.1, 0.1, 200'000)));
    const auto n = class_counts(s, 3);
    EXPECT_GE(n[1], 19'000u);
    EXPECT_LE(n[1], 21'000u);
    EXPECT_GE(n[2], 19'000u);
    EXPECT_LE(n[2], 21'000u);
}

TEST(Generator, BalancedClassCountsWithinBinomialBand) {
    auto c = three_class(1.0 / 3.0, 1.0 / 3.0, 60'000);
    const auto n = class_counts(generate_stream(validate_or_throw(c)), 3);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(static_cast<double>(n[k]), 20'000.0, five_sigma(60'000, 1.0 / 3.0)) << "class " << k;
    }
}

TEST(Generator, SameSeedIsBitIdenticalOtherSeedDiffers) {
    auto c = three_class(0.1, 0.1, 20'000);
    c.classes[1].type_proportions = {0.4, 0.3, 0.3};
    const auto vc = validate_or_throw(c);
    const auto a = generate_stream(vc);
    const auto b = generate_stream(vc);
    EXPECT_EQ(a, b);
    c.seed = 99;
    EXPECT_NE(generate_stream(validate_or_throw(c)), a);
}

TEST(Generator, TypeFidelity) {
    auto c = three_class(0.2, 0.2, 100'000);
    c.classes[1].type_proportions = {0.2, 0.5, 0.3};
    c.classes[2].type_proportions = {0.6, 0.0, 0.4};
    const auto s = generate_stream(validate_or_throw(c));
    std::array<std::array<double, 3>, 3> counts{};
    std::array<double, 3> totals{};
    for (const auto& ex : s) {
        ASSERT_TRUE(ex.gen_type.has_value());
        counts[ex.y][static_cast<int>(*ex.gen_type)] += 1;
        totals[ex.y] += 1;
    }
    EXPECT_EQ(counts[0][0], totals[0]);
    for (ClassIndex k : {1, 2}) {
        const auto& p = c.classes[k].type_proportions;
        for (ExampleType t : {ExampleType::Safe, ExampleType::Borderline, ExampleType::Rare}) {
            EXPECT_NEAR(counts[k][static_cast<int>(t)], totals[k] * p[t], five_sigma(totals[k], p[t]) + 1e-9)
                << "class " << k << " type " << to_string(t);
        }
    }
}

TEST(Generator, AllSafeEmitsNoBorderlineOrRare) {
    for (const auto& ex : generate_stream(validate_or_throw(three_class(0.1, 0.1, 20'000)))) {
        ASSERT_EQ(ex.gen_type, ExampleType::Safe);
    }
}

TEST(Generator, ExamplesRespectTheirTypeGeometry) {
    auto c = three_class(0.15, 0.15, 100'000);
    c.classes[1].type_proportions = {0.4, 0.3, 0.3};
    c.classes[2].type_proportions = {0.4, 0.3, 0.3};
    const auto vc = validate_or_throw(c);
    StreamGenerator gen(vc);
    const double beta = c.geometry.border_width;
    const double rho = c.geometry.rare_island_radius;
    std::size_t checked[3] = {0, 0, 0};
    while (gen.has_next()) {
        const auto ex = gen.next();
        const ClassLayout& layout = gen.sampler().layout();
        for (double v : ex.x) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
        switch (*ex.gen_type) {
            case ExampleType::Safe:
                ASSERT_FALSE(layout.in_foreign_core(ex.x, ex.y)) << "t=" << ex.t;
                if (ex.y != 0) {
                    ASSERT_TRUE(layout.in_own_core(ex.x, ex.y)) << "t=" << ex.t;
                }
                ++checked[0];
                break;
            case ExampleType::Borderline: {
                bool in_band = false;
                for (const auto& s : layout.classes[ex.y].subclusters) {
                    const double r = s.region.normalized_radius(ex.x);
                    in_band |= r >= 1.0 - beta - 1e-9 && r <= 1.0 + beta + 1e-9;
                }
                ASSERT_TRUE(in_band) << "t=" << ex.t;
                ++checked[1];
                break;
            }
            case ExampleType::Rare: {
                const double d = layout.own_surface_distance(ex.x, ex.y);
                ASSERT_GT(d, gen.sampler().rare_min_distance(ex.y)) << "t=" << ex.t;
                ASSERT_LE(d, gen.sampler().rare_max_distance(ex.y) + 2.0 * rho + 1e-9) << "t=" << ex.t;
                ASSERT_FALSE(layout.in_foreign_core(ex.x, ex.y)) << "t=" << ex.t;
                ++checked[2];
                break;
            }
        }
    }
    EXPECT_GT(checked[1], 1000u);
    EXPECT_GT(checked[2], 1000u);
}

TEST(Generator, RareExamplesFormSmallIslands) {
    auto c = three_class(0.1, 0.1, 50'000);
    c.classes[1].type_proportions = {0.0, 0.0, 1.0};
    const auto s = generate_stream(validate_or_throw(c));
    std::vector<Point> rare;
    for (const auto& ex : s) {
        if (ex.y == 1) rare.push_back(ex.x);
    }
    // Islands hold at most three examples, so few same-class points lie within 2*rho.
    const double reach = 2.0 * c.geometry.rare_island_radius;
    for (std::size_t i = 0; i < rare.size(); i += 7) {
        int close = 0;
        for (std::size_t j = 0; j < rare.size(); ++j) close += j != i && distance(rare[i], rare[j]) <= reach;
        EXPECT_LE(close, 6) << i;
    }
}

TEST(Generator, NewGeneratorWithGaussianSampling) {
    auto c = three_class(0.1, 0.1, 20'000);
    c.generator = GeneratorVariant::New;
    c.distribution = Distribution::Gaussian;
    c.classes[1].type_proportions = {0.5, 0.5, 0.0};
    StreamGenerator gen(validate_or_throw(c));
    std::size_t n = 0;
    while (gen.has_next()) {
        const auto ex = gen.next();
        if (ex.y != 0 && ex.gen_type == ExampleType::Safe) {
            ASSERT_TRUE(gen.sampler().layout().in_own_core(ex.x, ex.y)) << ex.t;
        }
        ++n;
    }
    EXPECT_EQ(n, 20'000u);
}

TEST(Generator, GaussianRejectedForOldGenerator) {
    auto c = three_class(0.1, 0.1);
    c.distribution = Distribution::Gaussian;
    EXPECT_FALSE(validate_config(c).ok());
}
