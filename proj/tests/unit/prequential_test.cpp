#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "imbstream/prequential.hpp"

using namespace imbs;

namespace {

// Test doubles with scripted predictions.
class Oracle : public OnlineClassifier {
public:
    explicit Oracle(const std::vector<LabeledExample>& s) : stream_(s) {}
    ClassIndex predict(const Point& x) const override {
        for (const auto& ex : stream_) {
            if (ex.x == x) return ex.y;
        }
        return 0;
    }
    void train(const Point&, ClassIndex) override { ++seen_; }
    std::string name() const override { return "oracle"; }
    std::uint64_t examples_seen() const override { return seen_; }
    std::vector<std::uint8_t> save() const override { return {}; }

private:
    const std::vector<LabeledExample>& stream_;
    std::uint64_t seen_ = 0;
};

class Constant : public OnlineClassifier {
public:
    explicit Constant(ClassIndex c) : c_(c) {}
    ClassIndex predict(const Point&) const override { return c_; }
    void train(const Point&, ClassIndex) override { ++seen_; }
    std::string name() const override { return "constant"; }
    std::uint64_t examples_seen() const override { return seen_; }
    std::vector<std::uint8_t> save() const override { return {}; }

private:
    ClassIndex c_;
    std::uint64_t seen_ = 0;
};

class RandomGuess : public OnlineClassifier {
public:
    ClassIndex predict(const Point& x) const override {
        // Deterministic hash of the point stands in for a coin.
        return static_cast<ClassIndex>(std::hash<double>{}(x[0] * 1e6 + x[1]) % 3);
    }
    void train(const Point&, ClassIndex) override {}
    std::string name() const override { return "random"; }
    std::uint64_t examples_seen() const override { return 0; }
    std::vector<std::uint8_t> save() const override { return {}; }
};

std::vector<LabeledExample> random_stream(std::size_t n, std::vector<double> probs, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::discrete_distribution<int> pick(probs.begin(), probs.end());
    std::vector<LabeledExample> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].t = i + 1;
        for (auto& v : out[i].x) v = u(rng);
        out[i].y = static_cast<ClassIndex>(pick(rng));
    }
    return out;
}

}  // namespace

TEST(GMean, KnownValues) {
    EXPECT_DOUBLE_EQ(gmean(std::vector<double>{1.0, 1.0, 1.0}), 1.0);
    EXPECT_EQ(gmean(std::vector<double>{0.0, 0.9, 0.9}), 0.0);
    EXPECT_NEAR(gmean(std::vector<double>{0.25, 0.5, 0.5}), 0.39685, 1e-5);
    EXPECT_NEAR(gmean(std::vector<double>{0.25, 0.5, 0.5}), std::cbrt(0.0625), 1e-15);
}

TEST(GMean, AbsentClassesAreSkipped) {
    const std::vector<std::optional<double>> r{1.0, std::nullopt, 0.25};
    EXPECT_DOUBLE_EQ(*gmean(r), 0.5);
    EXPECT_FALSE(gmean(std::vector<std::optional<double>>{std::nullopt, std::nullopt}).has_value());
}

TEST(GMean, BoundedByArithmeticMeanAndPermutationInvariant) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> r(2 + trial % 5);
        for (auto& v : r) v = u(rng);
        double am = 0.0;
        for (double v : r) am += v / static_cast<double>(r.size());
        const double g = gmean(r);
        ASSERT_GE(g, 0.0);
        ASSERT_LE(g, am + 1e-12);
        ASSERT_LE(g, *std::max_element(r.begin(), r.end()) + 1e-12);
        std::shuffle(r.begin(), r.end(), rng);
        ASSERT_NEAR(gmean(r), g, 1e-12);
    }
}

TEST(Recall, FromCounters) {
    const std::vector<std::size_t> tp{10, 5, 0}, support{10, 10, 0};
    const auto r = recall_per_class(tp, support);
    EXPECT_EQ(r[0], 1.0);
    EXPECT_EQ(r[1], 0.5);
    EXPECT_FALSE(r[2].has_value());
}

TEST(WindowedConfusion, MatchesRecomputationFromBuffer) {
    WindowedConfusion w(3, 50);
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> c(0, 2);
    for (int i = 0; i < 1000; ++i) {
        w.add(static_cast<ClassIndex>(c(rng)), static_cast<ClassIndex>(c(rng)));
        ASSERT_LE(w.size(), 50u);
        std::vector<std::size_t> tp(3, 0), sup(3, 0);
        for (const auto& [y, p] : w.contents()) {
            ++sup[y];
            tp[y] += y == p;
        }
        ASSERT_EQ(w.true_positives(), tp);
        ASSERT_EQ(w.support(), sup);
    }
    EXPECT_THROW(WindowedConfusion(3, 0), std::invalid_argument);
}

TEST(Prequential, OracleScoresOne) {
    const auto s = random_stream(5000, {0.8, 0.1, 0.1});
    Oracle oracle(s);
    const auto series = prequential_run(s, oracle, 3);
    ASSERT_EQ(series.points.size(), 5u);
    for (const auto& p : series.points) EXPECT_EQ(p.gmean, 1.0);
    EXPECT_EQ(oracle.examples_seen(), 5000u);
    EXPECT_EQ(series.mean_gmean(), 1.0);
}

TEST(Prequential, ConstantMajorityScoresZero) {
    const auto s = random_stream(5000, {0.9, 0.05, 0.05});
    Constant c(0);
    for (const auto& p : prequential_run(s, c, 3).points) {
        EXPECT_EQ(p.gmean, 0.0);
        EXPECT_EQ(p.recalls[0], 1.0);
    }
}

TEST(Prequential, RandomGuessNearOneThird) {
    const auto s = random_stream(20'000, {1.0, 1.0, 1.0});
    RandomGuess g;
    EXPECT_NEAR(prequential_run(s, g, 3).mean_gmean(), 1.0 / 3.0, 0.05);
}

TEST(Prequential, OnePointPerFullWindow) {
    const auto s = random_stream(2000, {1.0, 1.0});
    Constant c(1);
    const auto series = prequential_run(s, c, 2);
    ASSERT_EQ(series.points.size(), 2u);
    EXPECT_EQ(series.points[0].t, 1000u);
    EXPECT_EQ(series.points[1].t, 2000u);
    EXPECT_EQ(prequential_run(std::span(s).first(1999), c, 2).points.size(), 1u);
}

TEST(Prequential, WindowedRecallMatchesBatchRecallOverLog) {
    const auto s = random_stream(3500, {0.6, 0.3, 0.1}, 4);
    RandomGuess g;
    std::vector<std::pair<ClassIndex, ClassIndex>> log;
    const auto series = prequential_run(s, g, 3, 500, &log);
    ASSERT_EQ(log.size(), s.size());
    for (const auto& p : series.points) {
        std::vector<std::size_t> tp(3, 0), sup(3, 0);
        for (std::size_t i = p.t - 500; i < p.t; ++i) {
            ++sup[log[i].first];
            tp[log[i].first] += log[i].first == log[i].second;
        }
        for (std::size_t k = 0; k < 3; ++k) {
            ASSERT_TRUE(p.recalls[k].has_value());
            ASSERT_DOUBLE_EQ(*p.recalls[k], static_cast<double>(tp[k]) / static_cast<double>(sup[k]));
        }
    }
}

TEST(Prequential, AbsentClassLeavesRecallEmpty) {
    const auto s = random_stream(1000, {1.0, 1.0, 0.0});
    Oracle oracle(s);
    const auto series = prequential_run(s, oracle, 3);
    ASSERT_EQ(series.points.size(), 1u);
    EXPECT_FALSE(series.points[0].recalls[2].has_value());
    EXPECT_EQ(series.points[0].gmean, 1.0);
}

TEST(EvalSeries, SnapshotsAndMeans) {
    EvalSeries s;
    for (std::uint64_t t = 1000; t <= 150'000; t += 1000) {
        s.points.push_back({t, {}, t <= 70'000 ? 0.9 : 0.5});
    }
    const auto snap = s.snapshots();
    EXPECT_EQ(snap.start, 0.9);
    EXPECT_EQ(snap.pre, 0.9);
    EXPECT_EQ(snap.post, 0.5);
    EXPECT_EQ(snap.end, 0.5);
    EXPECT_NEAR(s.mean_gmean(70'000), 0.5, 1e-12);
    EXPECT_NEAR(s.mean_gmean(), (70 * 0.9 + 80 * 0.5) / 150.0, 1e-12);
    EXPECT_FALSE(s.gmean_at(1500).has_value());
    EXPECT_EQ(EvalSeries{}.mean_gmean(), 0.0);
    EXPECT_FALSE(EvalSeries{}.snapshots().end.has_value());
}

TEST(EvalSeries, CsvFormats) {
    EvalSeries s;
    s.points.push_back({1000, {1.0, 0.5, std::nullopt}, std::sqrt(0.5)});
    std::ostringstream os;
    write_results_header(os, 3);
    write_results_rows(os, s, "oob", "imb");
    EXPECT_EQ(os.str(),
              "t,classifier,stream_id,recall_c0,recall_c1,recall_c2,gmean\n"
              "1000,oob,imb,1.000000,0.500000,,0.707107\n");
    std::ostringstream snap;
    write_snapshot_header(snap);
    write_snapshot_row(snap, "imb", "oob", Snapshots{0.5, std::nullopt, 0.25, 1.0});
    EXPECT_EQ(snap.str(), "stream_id,classifier,start,pre,post,end\nimb,oob,0.500000,,0.250000,1.000000\n");
}
