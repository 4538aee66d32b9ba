#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "imbstream/classifier.hpp"
#include "imbstream/serialization.hpp"

namespace imbs {

// eps = sqrt(R^2 ln(1/delta) / (2n)). Throws std::domain_error unless
// R > 0, 0 < delta <= 1 and n >= 1.
double hoeffding_bound(double range, double delta, double n);

enum class LeafPrediction : std::uint8_t { MajorityClass, NaiveBayes, NaiveBayesAdaptive };

struct HoeffdingTreeParams {
    double split_confidence = 1e-7;  // delta
    double grace_period = 200.0;     // n_min, in (weighted) examples
    double tie_threshold = 0.05;     // tau
    int split_candidates = 10;       // per attribute and leaf
    double min_branch_fraction = 0.01;
    LeafPrediction leaf_prediction = LeafPrediction::NaiveBayesAdaptive;

    // Throws std::invalid_argument on out-of-domain values.
    void validate() const;

    // Field by field, so struct padding never reaches a snapshot.
    void save(detail::ByteWriter& w) const;
    static HoeffdingTreeParams load(detail::ByteReader& r);
};

// Weighted running mean/variance of one attribute for one class.
class GaussianEstimator {
public:
    void add(double value, double weight);
    double weight() const { return weight_; }
    double mean() const { return mean_; }
    double variance() const;
    double stddev() const;
    double density(double value) const;
    // Estimated weight of observations {< value, == value, > value}.
    std::array<double, 3> split_weights(double value) const;

    void save(detail::ByteWriter& w) const;
    void load(detail::ByteReader& r);

private:
    double weight_ = 0.0;
    double mean_ = 0.0;
    double variance_sum_ = 0.0;
};

// Per-class Gaussian summaries of one numeric attribute, with candidate
// binary split points evenly spaced over the observed range.
class GaussianAttributeObserver {
public:
    explicit GaussianAttributeObserver(std::size_t num_classes = 0);

    void observe(double value, ClassIndex y, double weight);
    std::vector<double> split_points(int candidates) const;
    // Gaussian density of `value` under class y (0 for unseen classes).
    double density(double value, ClassIndex y) const { return per_class_[y].density(value); }
    // {left (<= split), right} class distributions.
    std::array<std::vector<double>, 2> distributions_at(double split) const;

    void save(detail::ByteWriter& w) const;
    void load(detail::ByteReader& r);

private:
    std::vector<GaussianEstimator> per_class_;
    std::vector<double> min_;
    std::vector<double> max_;
};

double entropy(const std::vector<double>& dist);
// Information gain of splitting `pre` into `post`; -inf unless at least two
// branches hold min_branch_fraction of the weight.
double info_gain(const std::vector<double>& pre, const std::vector<std::vector<double>>& post,
                 double min_branch_fraction);

// VFDT: incremental decision tree splitting a leaf once the Hoeffding bound
// separates the two best candidate splits. Leaves predict by majority class,
// naive Bayes, or (default) whichever of the two has been right more often there.
class HoeffdingTree final : public OnlineClassifier {
public:
    HoeffdingTree(std::size_t num_classes, HoeffdingTreeParams params = {});

    ClassIndex predict(const Point& x) const override;
    void train(const Point& x, ClassIndex y) override { train(x, y, 1.0); }
    // One weighted update; equivalent to `weight` repeated unit updates for
    // the sufficient statistics kept here.
    void train(const Point& x, ClassIndex y, double weight);
    std::string name() const override { return "vfdt"; }
    std::uint64_t examples_seen() const override { return examples_; }
    std::vector<std::uint8_t> save() const override;

    void save(detail::ByteWriter& w) const;
    static HoeffdingTree load(detail::ByteReader& r);

    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_leaves() const;
    std::size_t depth() const;
    const HoeffdingTreeParams& params() const { return params_; }

private:
    static constexpr std::uint32_t kNoChild = std::numeric_limits<std::uint32_t>::max();

    struct Node {
        bool leaf = true;
        std::uint32_t attribute = 0;
        double threshold = 0.0;
        std::array<std::uint32_t, 2> children{kNoChild, kNoChild};
        std::vector<double> class_dist;
        double weight_at_last_eval = 0.0;
        double majority_correct = 0.0;  // NB-adaptive bookkeeping
        double bayes_correct = 0.0;
        std::vector<GaussianAttributeObserver> observers;
    };

    ClassIndex leaf_majority(const Node& leaf) const;
    ClassIndex leaf_bayes(const Node& leaf, const Point& x) const;
    ClassIndex leaf_predict(const Node& leaf, const Point& x) const;

    std::uint32_t new_leaf(std::vector<double> initial_dist);
    std::uint32_t find_leaf(const Point& x) const;
    void attempt_split(std::uint32_t leaf);

    std::size_t num_classes_;
    HoeffdingTreeParams params_;
    std::vector<Node> nodes_;
    std::vector<double> seen_;  // class totals over the whole tree
    std::uint64_t examples_ = 0;
};

}  // namespace imbs
