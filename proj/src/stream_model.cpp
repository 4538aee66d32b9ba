#include "imbstream/stream_model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace imbs {

namespace {

constexpr double kSumTolerance = 1e-9;

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// Accepts 0.1 or the percentage shorthand "10%".
double parse_fraction(const nlohmann::json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (!s.empty() && s.back() == '%') {
            return std::stod(s.substr(0, s.size() - 1)) / 100.0;
        }
        return std::stod(s);
    }
    return j.get<double>();
}

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& s, const std::array<std::pair<const char*, Enum>, N>& table,
                const char* what) {
    for (const auto& [name, value] : table) {
        if (s == name) return value;
    }
    throw std::invalid_argument(std::string("unknown ") + what + " '" + s + "'");
}

constexpr std::array<std::pair<const char*, DriftKind>, 6> kDriftKinds{{
    {"imbalance_ratio", DriftKind::ImbalanceRatio},
    {"type_proportion", DriftKind::TypeProportion},
    {"split", DriftKind::Split},
    {"move", DriftKind::Move},
    {"merge", DriftKind::Merge},
    {"class_swap", DriftKind::ClassSwap},
}};

void check_types(const TypeProportions& p, const std::string& where, std::vector<std::string>& errors) {
    if (p.safe < 0 || p.borderline < 0 || p.rare < 0) {
        errors.push_back(where + ": type proportions must be nonnegative");
    }
    if (std::abs(p.sum() - 1.0) > kSumTolerance) {
        errors.push_back(where + ": type proportions sum to " + fmt_double(p.sum()));
    }
}

}  // namespace

const char* to_string(ExampleType t) {
    switch (t) {
        case ExampleType::Safe: return "safe";
        case ExampleType::Borderline: return "borderline";
        case ExampleType::Rare: return "rare";
    }
    return "?";
}

const char* to_string(DriftKind k) {
    for (const auto& [name, value] : kDriftKinds) {
        if (value == k) return name;
    }
    return "?";
}

const char* to_string(GeneratorVariant g) { return g == GeneratorVariant::Old ? "old" : "new"; }
const char* to_string(Distribution d) { return d == Distribution::Uniform ? "uniform" : "gaussian"; }

std::optional<ExampleType> parse_example_type(const std::string& s) {
    if (s == "safe") return ExampleType::Safe;
    if (s == "borderline") return ExampleType::Borderline;
    if (s == "rare") return ExampleType::Rare;
    return std::nullopt;
}

std::vector<ClassIndex> ValidatedConfig::minority_classes() const {
    std::vector<ClassIndex> out;
    for (ClassIndex i = 0; i < config_.classes.size(); ++i) {
        if (config_.classes[i].role == ClassRole::Minority) out.push_back(i);
    }
    return out;
}

std::vector<ClassIndex> ValidatedConfig::targets(const DriftSpec& d) const {
    if (d.target == kAllMinority) return minority_classes();
    for (ClassIndex i = 0; i < config_.classes.size(); ++i) {
        if (config_.classes[i].name == d.target) return {i};
    }
    return {};
}

ValidationResult validate_config(const StreamConfig& input) {
    StreamConfig c = input;
    std::vector<std::string> errors;

    if (c.classes.size() < 2) errors.push_back("at least two classes are required");
    if (c.length == 0) errors.push_back("stream length must be positive");

    double ratio_sum = 0.0;
    std::size_t majorities = 0;
    std::size_t minorities = 0;
    std::set<std::string> names;
    for (std::size_t i = 0; i < c.classes.size(); ++i) {
        const ClassSpec& cls = c.classes[i];
        const std::string where = "class '" + cls.name + "'";
        if (cls.name.empty()) errors.push_back("class " + std::to_string(i) + " has an empty name");
        if (cls.name == kAllMinority) errors.push_back(where + ": name is reserved");
        if (!names.insert(cls.name).second) errors.push_back(where + ": duplicate class name");
        if (!(cls.ratio > 0.0 && cls.ratio <= 1.0)) {
            errors.push_back(where + ": ratio " + fmt_double(cls.ratio) + " outside (0,1]");
        }
        ratio_sum += cls.ratio;
        check_types(cls.type_proportions, where, errors);
        if (cls.n_subclusters < 1) errors.push_back(where + ": n_subclusters must be >= 1");
        if (cls.role == ClassRole::Majority) {
            ++majorities;
            if (cls.type_proportions.safe != 1.0) {
                errors.push_back(where + ": majority classes must be all safe");
            }
            if (cls.n_subclusters != 1) errors.push_back(where + ": majority classes have a single region");
        } else {
            ++minorities;
        }
    }
    if (!c.classes.empty() && std::abs(ratio_sum - 1.0) > kSumTolerance) {
        errors.push_back("ratios sum to " + fmt_double(ratio_sum));
    }
    if (!c.classes.empty() && minorities == 0) errors.push_back("no minority classes");
    if (!c.classes.empty() && c.classes.front().role != ClassRole::Majority) {
        errors.push_back("class 0 must be the majority class");
    }
    if (majorities != 1 && !c.classes.empty()) {
        errors.push_back(std::string(to_string(c.generator)) +
                         " generator requires exactly one majority class, got " + std::to_string(majorities));
    }
    if (c.generator == GeneratorVariant::Old && c.distribution == Distribution::Gaussian) {
        errors.push_back("gaussian distribution is not supported by the old generator");
    }

    const GeometryParams& g = c.geometry;
    if (!(g.minority_radius > 0.0 && g.minority_radius < 0.5)) errors.push_back("geometry.minority_radius outside (0,0.5)");
    if (!(g.border_width >= 0.0 && g.border_width < 1.0)) errors.push_back("geometry.border_width outside [0,1)");
    if (!(g.majority_overlap >= 0.0)) errors.push_back("geometry.majority_overlap must be >= 0");
    if (!(g.rare_island_radius > 0.0)) errors.push_back("geometry.rare_island_radius must be > 0");
    if (!(g.rare_min_distance >= 0.0)) errors.push_back("geometry.rare_min_distance must be >= 0");
    if (!(g.rare_max_distance > g.rare_min_distance))
        errors.push_back("geometry.rare_max_distance must exceed rare_min_distance");
    if (!(g.split_min_offset > 0.0 && g.split_min_offset <= g.split_max_offset)) {
        errors.push_back("geometry.split offsets must satisfy 0 < min <= max");
    }
    if (!(g.new_majority_radius > 0.0 && g.new_majority_radius < 0.5)) {
        errors.push_back("geometry.new_majority_radius outside (0,0.5)");
    }

    auto class_of = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < c.classes.size(); ++i) {
            if (c.classes[i].name == name) return i;
        }
        return std::nullopt;
    };

    // (class, parameter group) pairs already claimed by a drift
    std::set<std::pair<std::size_t, int>> claimed;
    for (std::size_t di = 0; di < c.drifts.size(); ++di) {
        DriftSpec& d = c.drifts[di];
        const std::string where = "drift " + std::to_string(di) + " (" + to_string(d.kind) + ")";
        if (d.kind == DriftKind::Merge || d.kind == DriftKind::ClassSwap) {
            errors.push_back(where + ": unsupported drift kind");
            continue;
        }
        if (!(d.t_start < d.t_end)) errors.push_back(where + ": t_start must be < t_end");
        if (d.t_end > c.length) {
            errors.push_back(where + ": drift window exceeds stream (t_end " + std::to_string(d.t_end) +
                             " > length " + std::to_string(c.length) + ")");
        }

        std::vector<std::size_t> targets;
        if (d.target == kAllMinority) {
            for (std::size_t i = 0; i < c.classes.size(); ++i) {
                if (c.classes[i].role == ClassRole::Minority) targets.push_back(i);
            }
        } else if (auto idx = class_of(d.target)) {
            targets.push_back(*idx);
        } else {
            errors.push_back(where + ": unknown target '" + d.target + "'");
            continue;
        }

        const int group = (d.kind == DriftKind::Split || d.kind == DriftKind::Move) ? 2 : static_cast<int>(d.kind);
        for (std::size_t t : targets) {
            const ClassSpec& cls = c.classes[t];
            if (cls.role == ClassRole::Majority) {
                errors.push_back(where + ": drifts may only target minority classes");
                break;
            }
            if (!claimed.insert({t, group}).second) {
                errors.push_back(where + ": class '" + cls.name + "' already has a drift on the same parameters");
            }
        }
        if (targets.empty()) continue;
        const ClassSpec& first = c.classes[targets.front()];

        switch (d.kind) {
            case DriftKind::ImbalanceRatio: {
                if (!d.to.ratio) {
                    errors.push_back(where + ": missing target ratio");
                    break;
                }
                if (!(*d.to.ratio > 0.0 && *d.to.ratio < 1.0)) errors.push_back(where + ": target ratio outside (0,1)");
                if (!d.from.ratio) d.from.ratio = first.ratio;
                for (std::size_t t : targets) {
                    if (std::abs(c.classes[t].ratio - *d.from.ratio) > kSumTolerance) {
                        errors.push_back(where + ": from ratio does not match class '" + c.classes[t].name + "'");
                    }
                }
                break;
            }
            case DriftKind::TypeProportion: {
                if (!d.to.types) {
                    errors.push_back(where + ": missing target type proportions");
                    break;
                }
                check_types(*d.to.types, where + " target", errors);
                if (!d.from.types) d.from.types = first.type_proportions;
                for (std::size_t t : targets) {
                    if (!(c.classes[t].type_proportions == *d.from.types)) {
                        errors.push_back(where + ": from proportions do not match class '" + c.classes[t].name + "'");
                    }
                }
                break;
            }
            case DriftKind::Split: {
                if (!d.to.subclusters || *d.to.subclusters < 2) {
                    errors.push_back(where + ": split needs a target of at least 2 sub-clusters");
                }
                if (!d.from.subclusters) d.from.subclusters = 1;
                for (std::size_t t : targets) {
                    if (c.classes[t].n_subclusters != 1) {
                        errors.push_back(where + ": split requires class '" + c.classes[t].name +
                                         "' to start as a single cluster");
                    }
                }
                break;
            }
            case DriftKind::Move:
                break;
            default:
                break;
        }
    }

    // The end state of all ratio drifts must leave positive mass for the majority.
    {
        std::vector<double> end_ratios;
        for (const auto& cls : c.classes) end_ratios.push_back(cls.ratio);
        for (const auto& d : c.drifts) {
            if (d.kind != DriftKind::ImbalanceRatio || !d.to.ratio) continue;
            for (std::size_t i = 0; i < c.classes.size(); ++i) {
                if (c.classes[i].role == ClassRole::Minority &&
                    (d.target == kAllMinority || d.target == c.classes[i].name)) {
                    end_ratios[i] = *d.to.ratio;
                }
            }
        }
        double minority_sum = 0.0;
        for (std::size_t i = 0; i < c.classes.size(); ++i) {
            if (c.classes[i].role == ClassRole::Minority) minority_sum += end_ratios[i];
        }
        if (minority_sum >= 1.0) errors.push_back("ratio drift leaves no mass for the majority class");
    }

    ValidationResult result;
    result.errors = std::move(errors);
    if (result.errors.empty()) result.config = ValidatedConfig(std::move(c));
    return result;
}

namespace {
std::string join_errors(const std::vector<std::string>& errors) {
    std::string out = "invalid config:";
    for (const auto& e : errors) out += "\n  - " + e;
    return out;
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

ValidatedConfig validate_or_throw(const StreamConfig& config) {
    auto r = validate_config(config);
    if (!r.ok()) throw ConfigError(std::move(r.errors));
    return std::move(*r.config);
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const TypeProportions& p) {
    j = {{"safe", p.safe}, {"borderline", p.borderline}, {"rare", p.rare}};
}

void from_json(const nlohmann::json& j, TypeProportions& p) {
    p.safe = j.contains("safe") ? parse_fraction(j.at("safe")) : 0.0;
    p.borderline = j.contains("borderline") ? parse_fraction(j.at("borderline")) : 0.0;
    p.rare = j.contains("rare") ? parse_fraction(j.at("rare")) : 0.0;
}

void to_json(nlohmann::json& j, const ClassSpec& c) {
    j = {{"name", c.name},
         {"role", c.role == ClassRole::Majority ? "majority" : "minority"},
         {"ratio", c.ratio},
         {"type_proportions", c.type_proportions},
         {"n_subclusters", c.n_subclusters}};
}

void from_json(const nlohmann::json& j, ClassSpec& c) {
    c = ClassSpec{};
    c.name = j.at("name").get<std::string>();
    const std::string role = j.value("role", "minority");
    if (role == "majority") {
        c.role = ClassRole::Majority;
    } else if (role == "minority") {
        c.role = ClassRole::Minority;
    } else {
        throw std::invalid_argument("unknown class role '" + role + "'");
    }
    c.ratio = parse_fraction(j.at("ratio"));
    if (j.contains("type_proportions")) c.type_proportions = j.at("type_proportions").get<TypeProportions>();
    c.n_subclusters = j.value("n_subclusters", 1);
}

namespace {
nlohmann::json params_to_json(DriftKind kind, const DriftParams& p) {
    switch (kind) {
        case DriftKind::ImbalanceRatio: return p.ratio ? nlohmann::json(*p.ratio) : nlohmann::json();
        case DriftKind::TypeProportion: return p.types ? nlohmann::json(*p.types) : nlohmann::json();
        case DriftKind::Split: return p.subclusters ? nlohmann::json(*p.subclusters) : nlohmann::json();
        default: return nlohmann::json();
    }
}

DriftParams params_from_json(DriftKind kind, const nlohmann::json& j) {
    DriftParams p;
    if (j.is_null()) return p;
    switch (kind) {
        case DriftKind::ImbalanceRatio: p.ratio = parse_fraction(j); break;
        case DriftKind::TypeProportion: p.types = j.get<TypeProportions>(); break;
        case DriftKind::Split: p.subclusters = j.get<int>(); break;
        default: break;
    }
    return p;
}
}  // namespace

void to_json(nlohmann::json& j, const DriftSpec& d) {
    j = {{"kind", to_string(d.kind)},
         {"target", d.target},
         {"from", params_to_json(d.kind, d.from)},
         {"to", params_to_json(d.kind, d.to)},
         {"t_start", d.t_start},
         {"t_end", d.t_end}};
}

void from_json(const nlohmann::json& j, DriftSpec& d) {
    d = DriftSpec{};
    d.kind = parse_enum(j.at("kind").get<std::string>(), kDriftKinds, "drift kind");
    d.target = j.value("target", std::string(kAllMinority));
    if (j.contains("from")) d.from = params_from_json(d.kind, j.at("from"));
    if (j.contains("to")) d.to = params_from_json(d.kind, j.at("to"));
    d.t_start = j.value("t_start", kDefaultDriftStart);
    d.t_end = j.value("t_end", kDefaultDriftEnd);
}

void to_json(nlohmann::json& j, const GeometryParams& g) {
    j = {{"minority_radius", g.minority_radius},
         {"border_width", g.border_width},
         {"majority_overlap", g.majority_overlap},
         {"rare_island_radius", g.rare_island_radius},
         {"rare_min_distance", g.rare_min_distance},
         {"rare_max_distance", g.rare_max_distance},
         {"split_min_offset", g.split_min_offset},
         {"split_max_offset", g.split_max_offset},
         {"new_majority_radius", g.new_majority_radius}};
}

void from_json(const nlohmann::json& j, GeometryParams& g) {
    const GeometryParams d;
    g.minority_radius = j.value("minority_radius", d.minority_radius);
    g.border_width = j.value("border_width", d.border_width);
    g.majority_overlap = j.value("majority_overlap", d.majority_overlap);
    g.rare_island_radius = j.value("rare_island_radius", d.rare_island_radius);
    g.rare_min_distance = j.value("rare_min_distance", d.rare_min_distance);
    g.rare_max_distance = j.value("rare_max_distance", d.rare_max_distance);
    g.split_min_offset = j.value("split_min_offset", d.split_min_offset);
    g.split_max_offset = j.value("split_max_offset", d.split_max_offset);
    g.new_majority_radius = j.value("new_majority_radius", d.new_majority_radius);
}

void to_json(nlohmann::json& j, const StreamConfig& c) {
    j = {{"id", c.id},
         {"generator", to_string(c.generator)},
         {"distribution", to_string(c.distribution)},
         {"length", c.length},
         {"seed", c.seed},
         {"classes", c.classes},
         {"drifts", c.drifts},
         {"geometry", c.geometry}};
}

void from_json(const nlohmann::json& j, StreamConfig& c) {
    c = StreamConfig{};
    c.id = j.value("id", std::string());
    const std::string gen = j.value("generator", std::string("old"));
    if (gen == "old") {
        c.generator = GeneratorVariant::Old;
    } else if (gen == "new") {
        c.generator = GeneratorVariant::New;
    } else {
        throw std::invalid_argument("unknown generator '" + gen + "'");
    }
    const std::string dist = j.value("distribution", std::string("uniform"));
    if (dist == "uniform") {
        c.distribution = Distribution::Uniform;
    } else if (dist == "gaussian") {
        c.distribution = Distribution::Gaussian;
    } else {
        throw std::invalid_argument("unknown distribution '" + dist + "'");
    }
    c.classes = j.at("classes").get<std::vector<ClassSpec>>();
    if (j.contains("drifts")) c.drifts = j.at("drifts").get<std::vector<DriftSpec>>();
    const std::uint64_t default_length = c.drifts.empty() ? kDefaultStationaryLength : kDefaultDriftingLength;
    c.length = j.value("length", default_length);
    c.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("geometry")) c.geometry = j.at("geometry").get<GeometryParams>();
}

StreamConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
        return j.get<StreamConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config '" + path + "': " + e.what());
    }
}

std::string config_hash(const StreamConfig& config) {
    const std::string canonical = nlohmann::json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace imbs
