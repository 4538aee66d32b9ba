#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "imbstream/stream_model.hpp"

namespace imbs {

// Predict-then-train contract shared by every learner under test.
class OnlineClassifier {
public:
    virtual ~OnlineClassifier() = default;

    virtual ClassIndex predict(const Point& x) const = 0;
    virtual void train(const Point& x, ClassIndex y) = 0;
    virtual std::string name() const = 0;
    // Number of train() calls so far.
    virtual std::uint64_t examples_seen() const = 0;
    // Opaque versioned snapshot of the full model state.
    virtual std::vector<std::uint8_t> save() const = 0;
};

enum class ClassifierKind { VFDT, OB, OOB, UOB };

const char* to_string(ClassifierKind k);
ClassifierKind parse_classifier_kind(const std::string& s);
inline constexpr ClassifierKind kAllClassifiers[] = {ClassifierKind::VFDT, ClassifierKind::OOB, ClassifierKind::UOB,
                                                     ClassifierKind::OB};

std::unique_ptr<OnlineClassifier> make_classifier(ClassifierKind kind, std::size_t num_classes, std::uint64_t seed);

// Rebuilds a classifier from save() output; throws std::runtime_error on a
// malformed or unsupported blob.
std::unique_ptr<OnlineClassifier> load_classifier(const std::vector<std::uint8_t>& blob);

}  // namespace imbs
