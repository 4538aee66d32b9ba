#pragma once

#include <random>
#include <vector>

#include "imbstream/classifier.hpp"
#include "imbstream/hoeffding_tree.hpp"

namespace imbs {

enum class BaggingVariant { OB, OOB, UOB };

// Time-decayed class sizes: w_k <- theta * w_k + (1 - theta) * [y == k],
// renormalized after every update.
class ClassSizeTracker {
public:
    explicit ClassSizeTracker(std::size_t num_classes, double decay = 0.9);

    void update(ClassIndex y);
    const std::vector<double>& sizes() const { return w_; }
    std::uint64_t updates() const { return updates_; }
    double decay() const { return decay_; }

    void save(detail::ByteWriter& w) const;
    void load(detail::ByteReader& r);

private:
    std::vector<double> w_;
    double decay_;
    std::uint64_t updates_ = 0;
};

inline constexpr double kDefaultLambdaMax = 10.0;

// Poisson rate for one training example of class y.
// OB: 1. OOB: max_k w_k / w_y (capped at lambda_max). UOB: min_k w_k / w_y.
double bagging_lambda(BaggingVariant variant, const ClassSizeTracker& tracker, ClassIndex y,
                      double lambda_max = kDefaultLambdaMax);

struct EnsembleParams {
    std::size_t members = 15;
    double decay = 0.9;
    double lambda_max = kDefaultLambdaMax;
    HoeffdingTreeParams tree;
};

// Online bagging of Hoeffding trees. Each member draws K ~ Poisson(lambda)
// from its own RNG stream and takes the example with weight K.
class OnlineBagging final : public OnlineClassifier {
public:
    OnlineBagging(BaggingVariant variant, std::size_t num_classes, std::uint64_t seed, EnsembleParams params = {});

    ClassIndex predict(const Point& x) const override;
    void train(const Point& x, ClassIndex y) override;
    std::string name() const override;
    std::uint64_t examples_seen() const override { return examples_; }
    std::vector<std::uint8_t> save() const override;
    static OnlineBagging load(detail::ByteReader& r, BaggingVariant variant);

    BaggingVariant variant() const { return variant_; }
    const ClassSizeTracker& tracker() const { return tracker_; }
    const std::vector<HoeffdingTree>& members() const { return members_; }
    // Lambda used for the most recent train() call.
    double last_lambda() const { return last_lambda_; }

private:
    BaggingVariant variant_;
    std::size_t num_classes_;
    EnsembleParams params_;
    std::vector<HoeffdingTree> members_;
    std::vector<std::mt19937_64> rngs_;
    ClassSizeTracker tracker_;
    std::uint64_t examples_ = 0;
    double last_lambda_ = 0.0;
};

}  // namespace imbs
