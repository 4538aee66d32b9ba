#include "imbstream/hoeffding_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace imbs {

double hoeffding_bound(double range, double delta, double n) {
    if (!(range > 0.0)) throw std::domain_error("hoeffding_bound: range must be > 0");
    if (!(delta > 0.0 && delta <= 1.0)) throw std::domain_error("hoeffding_bound: delta must be in (0,1]");
    if (!(n >= 1.0)) throw std::domain_error("hoeffding_bound: n must be >= 1");
    return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * n));
}

void HoeffdingTreeParams::validate() const {
    if (!(split_confidence > 0.0 && split_confidence < 1.0)) throw std::invalid_argument("split_confidence outside (0,1)");
    if (!(grace_period >= 1.0)) throw std::invalid_argument("grace_period must be >= 1");
    if (!(tie_threshold >= 0.0)) throw std::invalid_argument("tie_threshold must be >= 0");
    if (split_candidates < 1) throw std::invalid_argument("split_candidates must be >= 1");
}

// ---------------------------------------------------------------------------

void GaussianEstimator::add(double value, double weight) {
    if (weight_ > 0.0) {
        weight_ += weight;
        const double last = mean_;
        mean_ += weight * (value - last) / weight_;
        variance_sum_ += weight * (value - last) * (value - mean_);
    } else {
        mean_ = value;
        weight_ = weight;
    }
}

double GaussianEstimator::variance() const { return weight_ > 1.0 ? variance_sum_ / (weight_ - 1.0) : 0.0; }
double GaussianEstimator::stddev() const { return std::sqrt(variance()); }

double GaussianEstimator::density(double value) const {
    if (weight_ <= 0.0) return 0.0;
    const double sd = stddev();
    if (sd > 0.0) {
        const double z = (value - mean_) / sd;
        return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * sd);
    }
    return value == mean_ ? 1.0 : 0.0;
}

std::array<double, 3> GaussianEstimator::split_weights(double value) const {
    const double equal = density(value) * weight_;
    const double sd = stddev();
    double less = 0.0;
    if (sd > 0.0) {
        const double cdf = 0.5 * std::erfc(-(value - mean_) / (sd * std::numbers::sqrt2));
        less = cdf * weight_ - equal;
    } else if (value < mean_) {
        less = weight_ - equal;
    }
    const double greater = std::max(0.0, weight_ - equal - less);
    return {less, equal, greater};
}

void GaussianEstimator::save(detail::ByteWriter& w) const {
    w.put(weight_);
    w.put(mean_);
    w.put(variance_sum_);
}

void GaussianEstimator::load(detail::ByteReader& r) {
    weight_ = r.get<double>();
    mean_ = r.get<double>();
    variance_sum_ = r.get<double>();
}

// ---------------------------------------------------------------------------

GaussianAttributeObserver::GaussianAttributeObserver(std::size_t num_classes)
    : per_class_(num_classes),
      min_(num_classes, std::numeric_limits<double>::infinity()),
      max_(num_classes, -std::numeric_limits<double>::infinity()) {}

void GaussianAttributeObserver::observe(double value, ClassIndex y, double weight) {
    min_[y] = std::min(min_[y], value);
    max_[y] = std::max(max_[y], value);
    per_class_[y].add(value, weight);
}

std::vector<double> GaussianAttributeObserver::split_points(int candidates) const {
    const double lo = *std::min_element(min_.begin(), min_.end());
    const double hi = *std::max_element(max_.begin(), max_.end());
    std::vector<double> points;
    if (!(lo < hi)) return points;
    const double bin = (hi - lo) / (candidates + 1);
    for (int i = 1; i <= candidates; ++i) {
        const double v = lo + bin * i;
        if (v > lo && v < hi) points.push_back(v);
    }
    return points;
}

std::array<std::vector<double>, 2> GaussianAttributeObserver::distributions_at(double split) const {
    std::array<std::vector<double>, 2> out{std::vector<double>(per_class_.size(), 0.0),
                                           std::vector<double>(per_class_.size(), 0.0)};
    for (std::size_t k = 0; k < per_class_.size(); ++k) {
        const auto& est = per_class_[k];
        if (est.weight() <= 0.0) continue;
        if (split < min_[k]) {
            out[1][k] += est.weight();
        } else if (split >= max_[k]) {
            out[0][k] += est.weight();
        } else {
            const auto [lt, eq, gt] = est.split_weights(split);
            out[0][k] += lt + eq;
            out[1][k] += gt;
        }
    }
    return out;
}

void GaussianAttributeObserver::save(detail::ByteWriter& w) const {
    w.put<std::uint64_t>(per_class_.size());
    for (const auto& e : per_class_) e.save(w);
    w.put_vector(min_);
    w.put_vector(max_);
}

void GaussianAttributeObserver::load(detail::ByteReader& r) {
    per_class_.resize(r.get<std::uint64_t>());
    for (auto& e : per_class_) e.load(r);
    min_ = r.get_vector<double>();
    max_ = r.get_vector<double>();
}

// ---------------------------------------------------------------------------

double entropy(const std::vector<double>& dist) {
    double total = 0.0;
    for (double v : dist) total += v;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double v : dist) {
        if (v > 0.0) {
            const double p = v / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

double info_gain(const std::vector<double>& pre, const std::vector<std::vector<double>>& post,
                 double min_branch_fraction) {
    double total = 0.0;
    std::vector<double> branch_weight;
    for (const auto& d : post) {
        double w = 0.0;
        for (double v : d) w += v;
        branch_weight.push_back(w);
        total += w;
    }
    int big = 0;
    for (double w : branch_weight) {
        if (total > 0.0 && w / total > min_branch_fraction) ++big;
    }
    if (big < 2) return -std::numeric_limits<double>::infinity();
    double after = 0.0;
    for (std::size_t i = 0; i < post.size(); ++i) after += branch_weight[i] / total * entropy(post[i]);
    return entropy(pre) - after;
}

// ---------------------------------------------------------------------------

HoeffdingTree::HoeffdingTree(std::size_t num_classes, HoeffdingTreeParams params)
    : num_classes_(num_classes), params_(params), seen_(num_classes, 0.0) {
    if (num_classes < 1) throw std::invalid_argument("HoeffdingTree needs at least one class");
    params_.validate();
    new_leaf(std::vector<double>(num_classes, 0.0));
}

std::uint32_t HoeffdingTree::new_leaf(std::vector<double> initial_dist) {
    Node n;
    n.leaf = true;
    n.class_dist = std::move(initial_dist);
    for (double v : n.class_dist) n.weight_at_last_eval += v;
    n.observers.assign(kNumAttributes, GaussianAttributeObserver(num_classes_));
    nodes_.push_back(std::move(n));
    return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t HoeffdingTree::find_leaf(const Point& x) const {
    std::uint32_t i = 0;
    while (!nodes_[i].leaf) {
        const Node& n = nodes_[i];
        i = n.children[x[n.attribute] <= n.threshold ? 0 : 1];
    }
    return i;
}

namespace {
ClassIndex argmax_lowest(const std::vector<double>& v) {
    ClassIndex best = 0;
    for (ClassIndex k = 1; k < v.size(); ++k) {
        if (v[k] > v[best]) best = k;
    }
    return best;
}
}  // namespace

ClassIndex HoeffdingTree::leaf_majority(const Node& leaf) const {
    double total = 0.0;
    for (double v : leaf.class_dist) total += v;
    if (total > 0.0) return argmax_lowest(leaf.class_dist);
    return argmax_lowest(seen_);
}

ClassIndex HoeffdingTree::leaf_bayes(const Node& leaf, const Point& x) const {
    double total = 0.0;
    for (double v : leaf.class_dist) total += v;
    if (total <= 0.0 || leaf.observers.empty()) return leaf_majority(leaf);
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    std::vector<double> score(num_classes_, kNegInf);
    for (ClassIndex k = 0; k < num_classes_; ++k) {
        if (leaf.class_dist[k] <= 0.0) continue;
        double s = std::log(leaf.class_dist[k] / total);
        for (std::size_t a = 0; a < kNumAttributes && s > kNegInf; ++a) {
            const double d = leaf.observers[a].density(x[a], k);
            s = d > 0.0 ? s + std::log(d) : kNegInf;
        }
        score[k] = s;
    }
    ClassIndex best = 0;
    for (ClassIndex k = 1; k < num_classes_; ++k) {
        if (score[k] > score[best]) best = k;
    }
    return score[best] > kNegInf ? best : leaf_majority(leaf);
}

ClassIndex HoeffdingTree::leaf_predict(const Node& leaf, const Point& x) const {
    switch (params_.leaf_prediction) {
        case LeafPrediction::MajorityClass: return leaf_majority(leaf);
        case LeafPrediction::NaiveBayes: return leaf_bayes(leaf, x);
        case LeafPrediction::NaiveBayesAdaptive:
            return leaf.majority_correct >= leaf.bayes_correct ? leaf_majority(leaf) : leaf_bayes(leaf, x);
    }
    return leaf_majority(leaf);
}

ClassIndex HoeffdingTree::predict(const Point& x) const { return leaf_predict(nodes_[find_leaf(x)], x); }

void HoeffdingTree::train(const Point& x, ClassIndex y, double weight) {
    ++examples_;
    if (weight <= 0.0) return;
    seen_[y] += weight;
    const std::uint32_t li = find_leaf(x);
    Node& leaf = nodes_[li];
    if (params_.leaf_prediction == LeafPrediction::NaiveBayesAdaptive) {
        if (leaf_majority(leaf) == y) leaf.majority_correct += weight;
        if (leaf_bayes(leaf, x) == y) leaf.bayes_correct += weight;
    }
    leaf.class_dist[y] += weight;
    for (std::size_t a = 0; a < kNumAttributes; ++a) leaf.observers[a].observe(x[a], y, weight);

    double seen = 0.0;
    for (double v : leaf.class_dist) seen += v;
    if (seen - leaf.weight_at_last_eval >= params_.grace_period) {
        attempt_split(li);
        // attempt_split may have reallocated nodes_
        nodes_[li].weight_at_last_eval = seen;
    }
}

void HoeffdingTree::attempt_split(std::uint32_t li) {
    const std::vector<double> pre = nodes_[li].class_dist;
    int nonzero = 0;
    double seen = 0.0;
    for (double v : pre) {
        nonzero += v > 0.0 ? 1 : 0;
        seen += v;
    }
    if (nonzero < 2) return;

    struct Candidate {
        double merit;
        std::uint32_t attribute;
        double threshold;
        std::array<std::vector<double>, 2> dists;
    };
    std::vector<Candidate> best_per_attribute;
    for (std::uint32_t a = 0; a < kNumAttributes; ++a) {
        const auto& obs = nodes_[li].observers[a];
        std::optional<Candidate> best;
        for (double s : obs.split_points(params_.split_candidates)) {
            auto dists = obs.distributions_at(s);
            const double merit = info_gain(pre, {dists[0], dists[1]}, params_.min_branch_fraction);
            if (!best || merit > best->merit) best = Candidate{merit, a, s, std::move(dists)};
        }
        if (best) best_per_attribute.push_back(std::move(*best));
    }
    if (best_per_attribute.empty()) return;
    std::stable_sort(best_per_attribute.begin(), best_per_attribute.end(),
                     [](const Candidate& l, const Candidate& r) { return l.merit > r.merit; });
    const Candidate& best = best_per_attribute.front();
    if (!std::isfinite(best.merit) || best.merit <= 0.0) return;

    bool split = best_per_attribute.size() < 2;
    if (!split) {
        const double range = std::log2(static_cast<double>(std::max<std::size_t>(num_classes_, 2)));
        const double eps = hoeffding_bound(range, params_.split_confidence, seen);
        const double second = best_per_attribute[1].merit;
        split = (best.merit - second > eps) || eps < params_.tie_threshold;
    }
    if (!split) return;

    const std::uint32_t left = new_leaf(best.dists[0]);
    const std::uint32_t right = new_leaf(best.dists[1]);
    Node& n = nodes_[li];
    n.leaf = false;
    n.attribute = best.attribute;
    n.threshold = best.threshold;
    n.children = {left, right};
    n.observers.clear();
    n.observers.shrink_to_fit();
}

std::size_t HoeffdingTree::num_leaves() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf; }));
}

std::size_t HoeffdingTree::depth() const {
    std::vector<std::size_t> d(nodes_.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        best = std::max(best, d[i]);
        if (!nodes_[i].leaf) {
            for (auto c : nodes_[i].children) d[c] = d[i] + 1;
        }
    }
    return best;
}

void HoeffdingTreeParams::save(detail::ByteWriter& w) const {
    w.put(split_confidence);
    w.put(grace_period);
    w.put(tie_threshold);
    w.put<std::int32_t>(split_candidates);
    w.put(min_branch_fraction);
    w.put(leaf_prediction);
}

HoeffdingTreeParams HoeffdingTreeParams::load(detail::ByteReader& r) {
    HoeffdingTreeParams p;
    p.split_confidence = r.get<double>();
    p.grace_period = r.get<double>();
    p.tie_threshold = r.get<double>();
    p.split_candidates = r.get<std::int32_t>();
    p.min_branch_fraction = r.get<double>();
    p.leaf_prediction = r.get<LeafPrediction>();
    return p;
}

void HoeffdingTree::save(detail::ByteWriter& w) const {
    w.put<std::uint64_t>(num_classes_);
    params_.save(w);
    w.put(examples_);
    w.put_vector(seen_);
    w.put<std::uint64_t>(nodes_.size());
    for (const auto& n : nodes_) {
        w.put<std::uint8_t>(n.leaf ? 1 : 0);
        w.put(n.attribute);
        w.put(n.threshold);
        w.put(n.children);
        w.put_vector(n.class_dist);
        w.put(n.weight_at_last_eval);
        w.put(n.majority_correct);
        w.put(n.bayes_correct);
        w.put<std::uint64_t>(n.observers.size());
        for (const auto& o : n.observers) o.save(w);
    }
}

HoeffdingTree HoeffdingTree::load(detail::ByteReader& r) {
    const auto k = r.get<std::uint64_t>();
    const auto params = HoeffdingTreeParams::load(r);
    HoeffdingTree tree(k, params);
    tree.examples_ = r.get<std::uint64_t>();
    tree.seen_ = r.get_vector<double>();
    tree.nodes_.resize(r.get<std::uint64_t>());
    for (auto& n : tree.nodes_) {
        n.leaf = r.get<std::uint8_t>() != 0;
        n.attribute = r.get<std::uint32_t>();
        n.threshold = r.get<double>();
        n.children = r.get<std::array<std::uint32_t, 2>>();
        n.class_dist = r.get_vector<double>();
        n.weight_at_last_eval = r.get<double>();
        n.majority_correct = r.get<double>();
        n.bayes_correct = r.get<double>();
        n.observers.resize(r.get<std::uint64_t>());
        for (auto& o : n.observers) o.load(r);
    }
    return tree;
}

std::vector<std::uint8_t> HoeffdingTree::save() const {
    detail::ByteWriter w;
    w.put(detail::kSnapshotMagic);
    w.put(detail::kSnapshotVersion);
    w.put_string(name());
    save(w);
    return w.take();
}

}  // namespace imbs
