#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace imbs {

inline constexpr std::size_t kNumAttributes = 5;
using Point = std::array<double, kNumAttributes>;
using ClassIndex = std::size_t;

enum class ExampleType { Safe = 0, Borderline = 1, Rare = 2 };
enum class ClassRole { Majority, Minority };
enum class GeneratorVariant { Old, New };
enum class Distribution { Uniform, Gaussian };

// Merge and ClassSwap are part of the drift taxonomy but no generator
// realizes them; validation rejects them as unsupported.
enum class DriftKind { ImbalanceRatio, TypeProportion, Split, Move, Merge, ClassSwap };

const char* to_string(ExampleType t);
const char* to_string(DriftKind k);
const char* to_string(GeneratorVariant g);
const char* to_string(Distribution d);
std::optional<ExampleType> parse_example_type(const std::string& s);

struct LabeledExample {
    std::uint64_t t = 0;  // 1-based
    Point x{};
    ClassIndex y = 0;
    std::optional<ExampleType> gen_type;

    bool operator==(const LabeledExample&) const = default;
};

struct TypeProportions {
    double safe = 1.0;
    double borderline = 0.0;
    double rare = 0.0;

    double operator[](ExampleType t) const {
        switch (t) {
            case ExampleType::Safe: return safe;
            case ExampleType::Borderline: return borderline;
            case ExampleType::Rare: return rare;
        }
        return 0.0;
    }
    double sum() const { return safe + borderline + rare; }
    bool operator==(const TypeProportions&) const = default;
};

struct ClassSpec {
    std::string name;
    ClassRole role = ClassRole::Minority;
    double ratio = 0.0;
    TypeProportions type_proportions;
    int n_subclusters = 1;

    bool operator==(const ClassSpec&) const = default;
};

inline constexpr const char* kAllMinority = "all_minority";
inline constexpr std::uint64_t kDefaultDriftStart = 70'000;
inline constexpr std::uint64_t kDefaultDriftEnd = 100'000;
inline constexpr std::uint64_t kDefaultStationaryLength = 200'000;
inline constexpr std::uint64_t kDefaultDriftingLength = 250'000;

// Kind-specific parameter bundle. Only the member matching the drift kind
// is meaningful: ratio for ImbalanceRatio, types for TypeProportion,
// subclusters for Split. Move carries no parameters (targets are drawn
// from the seed when the layout is built).
struct DriftParams {
    std::optional<double> ratio;
    std::optional<TypeProportions> types;
    std::optional<int> subclusters;

    bool operator==(const DriftParams&) const = default;
};

struct DriftSpec {
    DriftKind kind = DriftKind::ImbalanceRatio;
    std::string target = kAllMinority;
    DriftParams from;
    DriftParams to;
    std::uint64_t t_start = kDefaultDriftStart;
    std::uint64_t t_end = kDefaultDriftEnd;

    bool operator==(const DriftSpec&) const = default;
};

// Geometry knobs. Defaults are documented in README.md.
struct GeometryParams {
    double minority_radius = 0.15;
    double border_width = 0.3;          // beta, fraction of radius
    double majority_overlap = 1.5;      // majority:minority density in the outer border band
    double rare_island_radius = 0.02;   // rho
    double rare_min_distance = 1.5;     // d_min as a multiple of the largest own radius
    double rare_max_distance = 4.0;     // d_max, same unit; anchors lie in (d_min, d_max]
    double split_min_offset = 2.0;      // sub-cluster target distance, in original radii
    double split_max_offset = 4.0;
    double new_majority_radius = 0.3;

    bool operator==(const GeometryParams&) const = default;
};

struct StreamConfig {
    std::string id;
    std::vector<ClassSpec> classes;
    std::vector<DriftSpec> drifts;
    GeneratorVariant generator = GeneratorVariant::Old;
    Distribution distribution = Distribution::Uniform;
    std::uint64_t length = kDefaultStationaryLength;
    std::uint64_t seed = 1;
    GeometryParams geometry;

    bool operator==(const StreamConfig&) const = default;
};

struct ValidationResult;
ValidationResult validate_config(const StreamConfig& config);

// A StreamConfig whose invariants have been checked and whose optional drift
// endpoints have been filled in. Only validate_config() can construct one.
class ValidatedConfig {
public:
    const StreamConfig& config() const { return config_; }
    const StreamConfig* operator->() const { return &config_; }
    std::size_t num_classes() const { return config_.classes.size(); }
    std::vector<ClassIndex> minority_classes() const;
    // Resolves a drift target to class indices.
    std::vector<ClassIndex> targets(const DriftSpec& d) const;

private:
    friend ValidationResult validate_config(const StreamConfig&);
    explicit ValidatedConfig(StreamConfig c) : config_(std::move(c)) {}
    StreamConfig config_;
};

struct ValidationResult {
    std::optional<ValidatedConfig> config;
    std::vector<std::string> errors;

    bool ok() const { return config.has_value(); }
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

// Throws ConfigError carrying every violation.
ValidatedConfig validate_or_throw(const StreamConfig& config);

void to_json(nlohmann::json& j, const TypeProportions& p);
void from_json(const nlohmann::json& j, TypeProportions& p);
void to_json(nlohmann::json& j, const ClassSpec& c);
void from_json(const nlohmann::json& j, ClassSpec& c);
void to_json(nlohmann::json& j, const DriftSpec& d);
void from_json(const nlohmann::json& j, DriftSpec& d);
void to_json(nlohmann::json& j, const GeometryParams& g);
void from_json(const nlohmann::json& j, GeometryParams& g);
void to_json(nlohmann::json& j, const StreamConfig& c);
void from_json(const nlohmann::json& j, StreamConfig& c);

StreamConfig load_config(const std::string& path);
std::string config_hash(const StreamConfig& config);

}  // namespace imbs
