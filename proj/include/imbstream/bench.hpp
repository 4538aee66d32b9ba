#pragma once

#include <cstdint>
#include <filesystem>
#include <iterator>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "imbstream/classifier.hpp"
#include "imbstream/prequential.hpp"
#include "imbstream/stream_model.hpp"

namespace imbs {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCacheDirEnv = "IMBSTREAM_CACHE_DIR";

// Config files named by `path`: the file itself, or every *.json directly
// inside a directory (sorted by name).
std::vector<std::filesystem::path> collect_config_files(const std::filesystem::path& path);

// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Binary stream cache keyed by config hash. A missing or unreadable entry
// is regenerated; a corrupt one is overwritten.
class StreamCache {
public:
    explicit StreamCache(std::filesystem::path dir) : dir_(std::move(dir)) {}
    // Directory from IMBSTREAM_CACHE_DIR, else `fallback`.
    static std::filesystem::path resolve_dir(const std::filesystem::path& fallback);

    std::filesystem::path entry_path(const ValidatedConfig& config) const;
    std::optional<std::vector<LabeledExample>> load(const ValidatedConfig& config) const;
    void store(const ValidatedConfig& config, std::span<const LabeledExample> stream) const;
    // Loads or generates (and stores); `hit` reports which.
    std::shared_ptr<const std::vector<LabeledExample>> get(const ValidatedConfig& config, bool* hit = nullptr) const;

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

struct RunOptions {
    std::filesystem::path out_dir;
    std::vector<ClassifierKind> classifiers{std::begin(kAllClassifiers), std::end(kAllClassifiers)};
    std::optional<std::uint64_t> seed;  // overrides every config's seed
    std::size_t window = kDefaultWindow;
    std::size_t jobs = 1;
    std::optional<std::filesystem::path> cache_dir;  // default: env var, then <out>/cache
    SnapshotMarkers markers{};
};

struct CellResult {
    std::string stream_id;
    std::string config_path;
    std::string config_hash;
    std::uint64_t stream_seed = 0;
    std::string classifier;
    std::uint64_t classifier_seed = 0;
    bool ok = false;
    std::string error;
    bool cache_hit = false;
    double stream_seconds = 0.0;
    double run_seconds = 0.0;
    std::uint64_t examples = 0;
    std::string results_path;
    Snapshots snapshots;
    double mean_gmean = 0.0;
};

struct RunSummary {
    std::vector<CellResult> cells;
    bool all_ok() const;
};

// Seed handed to a classifier of `kind` evaluated on a stream with `stream_seed`.
std::uint64_t classifier_seed(std::uint64_t stream_seed, ClassifierKind kind);

// Runs the stream x classifier grid for the given config files. Writes
// <out>/<stream_id>/<classifier>.csv per cell, <out>/snapshots.csv and
// <out>/manifest.json. Cell failures (including invalid configs) are
// recorded, not thrown.
RunSummary run_experiment(std::span<const std::filesystem::path> configs, const RunOptions& options);

// Evaluates one classifier on an in-memory stream.
EvalSeries evaluate(std::span<const LabeledExample> stream, std::size_t num_classes, ClassifierKind kind,
                    std::uint64_t seed, std::size_t window = kDefaultWindow);

}  // namespace imbs
