#include "imbstream/ensemble.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace imbs {

ClassSizeTracker::ClassSizeTracker(std::size_t num_classes, double decay) : w_(num_classes, 0.0), decay_(decay) {
    if (!(decay >= 0.0 && decay < 1.0)) throw std::invalid_argument("class size decay must be in [0,1)");
}

void ClassSizeTracker::update(ClassIndex y) {
    double sum = 0.0;
    for (ClassIndex k = 0; k < w_.size(); ++k) {
        w_[k] = decay_ * w_[k] + (1.0 - decay_) * (k == y ? 1.0 : 0.0);
        sum += w_[k];
    }
    for (double& v : w_) v /= sum;
    ++updates_;
}

void ClassSizeTracker::save(detail::ByteWriter& w) const {
    w.put_vector(w_);
    w.put(decay_);
    w.put(updates_);
}

void ClassSizeTracker::load(detail::ByteReader& r) {
    w_ = r.get_vector<double>();
    decay_ = r.get<double>();
    updates_ = r.get<std::uint64_t>();
}

double bagging_lambda(BaggingVariant variant, const ClassSizeTracker& tracker, ClassIndex y, double lambda_max) {
    if (variant == BaggingVariant::OB) return 1.0;
    const auto& w = tracker.sizes();
    const double wy = w[y];
    if (variant == BaggingVariant::OOB) {
        if (wy <= 0.0) return lambda_max;
        return std::min(lambda_max, *std::max_element(w.begin(), w.end()) / wy);
    }
    if (wy <= 0.0) return 1.0;
    return *std::min_element(w.begin(), w.end()) / wy;
}

OnlineBagging::OnlineBagging(BaggingVariant variant, std::size_t num_classes, std::uint64_t seed,
                             EnsembleParams params)
    : variant_(variant), num_classes_(num_classes), params_(params), tracker_(num_classes, params.decay) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(variant), std::uint64_t{0x6f62}};
    std::vector<std::uint64_t> seeds(params_.members);
    seq.generate(seeds.begin(), seeds.end());
    for (std::size_t m = 0; m < params_.members; ++m) {
        members_.emplace_back(num_classes, params_.tree);
        rngs_.emplace_back(seeds[m]);
    }
}

ClassIndex OnlineBagging::predict(const Point& x) const {
    std::vector<std::size_t> votes(num_classes_, 0);
    for (const auto& m : members_) ++votes[m.predict(x)];
    ClassIndex best = 0;
    for (ClassIndex k = 1; k < num_classes_; ++k) {
        if (votes[k] > votes[best]) best = k;
    }
    return best;
}

void OnlineBagging::train(const Point& x, ClassIndex y) {
    ++examples_;
    tracker_.update(y);
    last_lambda_ = bagging_lambda(variant_, tracker_, y, params_.lambda_max);
    if (last_lambda_ <= 0.0) return;
    std::poisson_distribution<int> poisson(last_lambda_);
    for (std::size_t m = 0; m < members_.size(); ++m) {
        const int k = poisson(rngs_[m]);
        if (k > 0) members_[m].train(x, y, static_cast<double>(k));
    }
}

std::string OnlineBagging::name() const {
    switch (variant_) {
        case BaggingVariant::OB: return "ob";
        case BaggingVariant::OOB: return "oob";
        case BaggingVariant::UOB: return "uob";
    }
    return "?";
}

std::vector<std::uint8_t> OnlineBagging::save() const {
    detail::ByteWriter w;
    w.put(detail::kSnapshotMagic);
    w.put(detail::kSnapshotVersion);
    w.put_string(name());
    w.put<std::uint64_t>(num_classes_);
    w.put<std::uint64_t>(params_.members);
    w.put(params_.decay);
    w.put(params_.lambda_max);
    params_.tree.save(w);
    w.put(examples_);
    w.put(last_lambda_);
    tracker_.save(w);
    for (std::size_t m = 0; m < members_.size(); ++m) {
        members_[m].save(w);
        std::ostringstream os;
        os << rngs_[m];
        w.put_string(os.str());
    }
    return w.take();
}

OnlineBagging OnlineBagging::load(detail::ByteReader& r, BaggingVariant variant) {
    const auto k = r.get<std::uint64_t>();
    EnsembleParams p;
    p.members = r.get<std::uint64_t>();
    p.decay = r.get<double>();
    p.lambda_max = r.get<double>();
    p.tree = HoeffdingTreeParams::load(r);
    OnlineBagging e(variant, k, 0, p);
    e.examples_ = r.get<std::uint64_t>();
    e.last_lambda_ = r.get<double>();
    e.tracker_.load(r);
    e.members_.clear();
    for (std::size_t m = 0; m < p.members; ++m) {
        e.members_.push_back(HoeffdingTree::load(r));
        std::istringstream is(r.get_string());
        is >> e.rngs_[m];
    }
    return e;
}

// ---------------------------------------------------------------------------

const char* to_string(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::VFDT: return "vfdt";
        case ClassifierKind::OB: return "ob";
        case ClassifierKind::OOB: return "oob";
        case ClassifierKind::UOB: return "uob";
    }
    return "?";
}

ClassifierKind parse_classifier_kind(const std::string& s) {
    for (ClassifierKind k : kAllClassifiers) {
        if (s == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown classifier '" + s + "' (expected vfdt, ob, oob or uob)");
}

std::unique_ptr<OnlineClassifier> make_classifier(ClassifierKind kind, std::size_t num_classes, std::uint64_t seed) {
    switch (kind) {
        case ClassifierKind::VFDT: return std::make_unique<HoeffdingTree>(num_classes);
        case ClassifierKind::OB: return std::make_unique<OnlineBagging>(BaggingVariant::OB, num_classes, seed);
        case ClassifierKind::OOB: return std::make_unique<OnlineBagging>(BaggingVariant::OOB, num_classes, seed);
        case ClassifierKind::UOB: return std::make_unique<OnlineBagging>(BaggingVariant::UOB, num_classes, seed);
    }
    throw std::invalid_argument("unknown classifier kind");
}

std::unique_ptr<OnlineClassifier> load_classifier(const std::vector<std::uint8_t>& blob) {
    detail::ByteReader r(blob);
    if (r.get<std::uint32_t>() != detail::kSnapshotMagic) throw std::runtime_error("not a model snapshot");
    if (r.get<std::uint32_t>() != detail::kSnapshotVersion) throw std::runtime_error("unsupported snapshot version");
    const ClassifierKind kind = parse_classifier_kind(r.get_string());
    std::unique_ptr<OnlineClassifier> out;
    switch (kind) {
        case ClassifierKind::VFDT: out = std::make_unique<HoeffdingTree>(HoeffdingTree::load(r)); break;
        case ClassifierKind::OB: out = std::make_unique<OnlineBagging>(OnlineBagging::load(r, BaggingVariant::OB)); break;
        case ClassifierKind::OOB:
            out = std::make_unique<OnlineBagging>(OnlineBagging::load(r, BaggingVariant::OOB));
            break;
        case ClassifierKind::UOB:
            out = std::make_unique<OnlineBagging>(OnlineBagging::load(r, BaggingVariant::UOB));
            break;
    }
    if (!r.done()) throw std::runtime_error("trailing bytes in model snapshot");
    return out;
}

}  // namespace imbs
