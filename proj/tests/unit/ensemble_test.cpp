#include <gtest/gtest.h>

#include <random>

#include "imbstream/ensemble.hpp"

using namespace imbs;

namespace {

ClassSizeTracker tracker_with(std::vector<double> w) {
    detail::ByteWriter out;
    out.put_vector(w);
    out.put(0.9);
    out.put<std::uint64_t>(1);
    const auto bytes = out.take();
    detail::ByteReader in(bytes);
    ClassSizeTracker t(w.size());
    t.load(in);
    return t;
}

struct Blobs {
    std::mt19937_64 rng{99};
    std::normal_distribution<double> noise{0.0, 0.05};
    std::uniform_int_distribution<int> cls{0, 2};

    std::pair<Point, ClassIndex> next() {
        const auto y = static_cast<ClassIndex>(cls(rng));
        Point x{};
        for (auto& v : x) v = 0.5 + noise(rng);
        x[0] = 0.2 + 0.3 * static_cast<double>(y) + noise(rng);
        return {x, y};
    }
};

double accuracy(OnlineClassifier& m, int train, int test) {
    Blobs blobs;
    for (int i = 0; i < train; ++i) {
        const auto [x, y] = blobs.next();
        m.train(x, y);
    }
    int correct = 0;
    for (int i = 0; i < test; ++i) {
        const auto [x, y] = blobs.next();
        correct += m.predict(x) == y;
    }
    return static_cast<double>(correct) / test;
}

}  // namespace

TEST(ClassSizeTracker, SingleUpdateArithmetic) {
    ClassSizeTracker t = tracker_with({0.5, 0.5});
    t.update(1);
    EXPECT_NEAR(t.sizes()[0], 0.45, 1e-15);
    EXPECT_NEAR(t.sizes()[1], 0.55, 1e-15);
}

TEST(ClassSizeTracker, SumsToOneAfterEveryUpdate) {
    ClassSizeTracker t(4);
    std::mt19937_64 rng(3);
    std::discrete_distribution<int> pick{0.7, 0.1, 0.15, 0.05};
    for (int i = 0; i < 5000; ++i) {
        t.update(static_cast<ClassIndex>(pick(rng)));
        double s = 0.0;
        for (double v : t.sizes()) s += v;
        ASSERT_NEAR(s, 1.0, 1e-12);
    }
    EXPECT_EQ(t.updates(), 5000u);
}

TEST(ClassSizeTracker, SingleClassFeedDecaysGeometrically) {
    ClassSizeTracker t = tracker_with({0.5, 0.5});
    for (int n = 1; n <= 200; ++n) {
        t.update(0);
        ASSERT_NEAR(t.sizes()[1], 0.5 * std::pow(0.9, n), 1e-12);
    }
    EXPECT_NEAR(t.sizes()[0], 1.0, 1e-9);
}

TEST(ClassSizeTracker, UniformFeedConvergesToUniform) {
    ClassSizeTracker t(3);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> pick(0, 2);
    std::vector<double> mean(3, 0.0);
    constexpr int burn = 1000, n = 200'000;
    for (int i = 0; i < burn + n; ++i) {
        t.update(static_cast<ClassIndex>(pick(rng)));
        if (i >= burn) {
            for (int k = 0; k < 3; ++k) mean[k] += t.sizes()[k] / n;
        }
    }
    for (double m : mean) EXPECT_NEAR(m, 1.0 / 3.0, 0.005);
}

TEST(BaggingLambda, DocumentedValues) {
    const auto skewed = tracker_with({0.8, 0.1, 0.1});
    EXPECT_NEAR(bagging_lambda(BaggingVariant::OOB, skewed, 1), 8.0, 1e-12);
    EXPECT_NEAR(bagging_lambda(BaggingVariant::UOB, skewed, 0), 0.125, 1e-12);
    EXPECT_NEAR(bagging_lambda(BaggingVariant::OOB, skewed, 0), 1.0, 1e-12);
    EXPECT_NEAR(bagging_lambda(BaggingVariant::UOB, skewed, 2), 1.0, 1e-12);
    EXPECT_EQ(bagging_lambda(BaggingVariant::OB, skewed, 1), 1.0);
}

TEST(BaggingLambda, UniformTrackerReducesToOnlineBagging) {
    const auto uniform = tracker_with({0.25, 0.25, 0.25, 0.25});
    for (ClassIndex y = 0; y < 4; ++y) {
        for (auto v : {BaggingVariant::OB, BaggingVariant::OOB, BaggingVariant::UOB}) {
            EXPECT_EQ(bagging_lambda(v, uniform, y), 1.0);
        }
    }
}

TEST(BaggingLambda, OversamplingIsCapped) {
    const auto t = tracker_with({0.999, 0.001, 0.0});
    EXPECT_EQ(bagging_lambda(BaggingVariant::OOB, t, 1), kDefaultLambdaMax);
    EXPECT_EQ(bagging_lambda(BaggingVariant::OOB, t, 2), kDefaultLambdaMax);
    EXPECT_EQ(bagging_lambda(BaggingVariant::OOB, t, 1, 4.0), 4.0);
}

TEST(OnlineBagging, PoissonOneMonteCarlo) {
    std::mt19937_64 rng(12);
    std::poisson_distribution<int> poisson(1.0);
    double sum = 0.0;
    constexpr int n = 100'000;
    for (int i = 0; i < n; ++i) sum += poisson(rng);
    EXPECT_GE(sum / n, 0.99);
    EXPECT_LE(sum / n, 1.01);
}

TEST(OnlineBagging, ZeroLambdaNeverTrains) {
    // Class 2 never appears, so min_k w_k = 0 and UOB draws with lambda 0.
    OnlineBagging uob(BaggingVariant::UOB, 3, 1);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 3000; ++i) {
        uob.train(Point{u(rng), u(rng), u(rng), u(rng), u(rng)}, static_cast<ClassIndex>(i % 2));
        ASSERT_EQ(uob.last_lambda(), 0.0);
    }
    for (const auto& m : uob.members()) EXPECT_EQ(m.examples_seen(), 0u);
    EXPECT_EQ(uob.predict(Point{0.5, 0.5, 0.5, 0.5, 0.5}), 0u);
}

TEST(OnlineBagging, OBIsCompetitiveWithSingleTree) {
    HoeffdingTree tree(3);
    OnlineBagging ob(BaggingVariant::OB, 3, 5);
    const double a_tree = accuracy(tree, 10'000, 1000);
    const double a_ob = accuracy(ob, 10'000, 1000);
    EXPECT_GT(a_tree, 0.9);
    EXPECT_GE(a_ob, a_tree - 0.02);
}

TEST(OnlineBagging, FixedSeedIsBitReproducible) {
    for (auto v : {BaggingVariant::OB, BaggingVariant::OOB, BaggingVariant::UOB}) {
        OnlineBagging a(v, 3, 77), b(v, 3, 77), c(v, 3, 78);
        accuracy(a, 3000, 10);
        accuracy(b, 3000, 10);
        accuracy(c, 3000, 10);
        EXPECT_EQ(a.save(), b.save());
        EXPECT_NE(a.save(), c.save());
    }
}

TEST(OnlineBagging, SinglePassCounter) {
    OnlineBagging oob(BaggingVariant::OOB, 3, 2);
    accuracy(oob, 12'345, 0);
    EXPECT_EQ(oob.examples_seen(), 12'345u);
    EXPECT_EQ(oob.tracker().updates(), 12'345u);
    EXPECT_EQ(oob.members().size(), 15u);
}

TEST(OnlineBagging, PredictIsPureAndSnapshotsRoundTrip) {
    for (auto kind : {ClassifierKind::OB, ClassifierKind::OOB, ClassifierKind::UOB}) {
        auto m = make_classifier(kind, 3, 9);
        accuracy(*m, 4000, 0);
        const auto blob = m->save();
        Blobs probe;
        for (int i = 0; i < 100; ++i) {
            const auto [x, y] = probe.next();
            ASSERT_EQ(m->predict(x), m->predict(x));
        }
        EXPECT_EQ(m->save(), blob);

        auto copy = load_classifier(blob);
        EXPECT_EQ(copy->name(), to_string(kind));
        EXPECT_EQ(copy->save(), blob);
        // Both continue identically, RNG state included.
        accuracy(*m, 500, 0);
        accuracy(*copy, 500, 0);
        EXPECT_EQ(copy->save(), m->save());
    }
}

TEST(Classifier, KindNames) {
    for (auto k : kAllClassifiers) EXPECT_EQ(parse_classifier_kind(to_string(k)), k);
    EXPECT_THROW(parse_classifier_kind("svm"), std::invalid_argument);
}
