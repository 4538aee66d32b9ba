#include "imbstream/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "imbstream/generator.hpp"
#include "imbstream/layout.hpp"
#include "imbstream/serialization.hpp"

namespace imbs {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kCacheMagic = 0x314d525453424d49ULL;  // "IMBSTRM1"
constexpr std::uint8_t kNoType = 0xff;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace

std::vector<fs::path> collect_config_files(const fs::path& path) {
    if (!fs::exists(path)) throw std::runtime_error("config path '" + path.string() + "' does not exist");
    if (!fs::is_directory(path)) return {path};
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw std::runtime_error("no *.json configs in '" + path.string() + "'");
    return out;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ostringstream suffix;
    suffix << ".tmp." << std::this_thread::get_id();
    const fs::path tmp = path.string() + suffix.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------

fs::path StreamCache::resolve_dir(const fs::path& fallback) {
    if (const char* env = std::getenv(kCacheDirEnv); env && *env) return env;
    return fallback;
}

fs::path StreamCache::entry_path(const ValidatedConfig& config) const {
    return dir_ / (config_hash(config.config()) + "-g" + std::to_string(kGeneratorRevision) + ".bin");
}

std::optional<std::vector<LabeledExample>> StreamCache::load(const ValidatedConfig& config) const {
    std::ifstream in(entry_path(config), std::ios::binary);
    if (!in) return std::nullopt;
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        detail::ByteReader r(bytes);
        if (r.get<std::uint64_t>() != kCacheMagic) return std::nullopt;
        if (r.get<std::uint32_t>() != kGeneratorRevision) return std::nullopt;
        if (r.get_string() != config_hash(config.config())) return std::nullopt;
        const auto n = r.get<std::uint64_t>();
        if (n != config->length) return std::nullopt;
        std::vector<LabeledExample> stream(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            LabeledExample& ex = stream[i];
            ex.t = i + 1;
            ex.x = r.get<Point>();
            ex.y = r.get<std::uint32_t>();
            const auto type = r.get<std::uint8_t>();
            if (type != kNoType) ex.gen_type = static_cast<ExampleType>(type);
        }
        if (!r.done()) return std::nullopt;
        return stream;
    } catch (const std::runtime_error&) {
        return std::nullopt;
    }
}

void StreamCache::store(const ValidatedConfig& config, std::span<const LabeledExample> stream) const {
    detail::ByteWriter w;
    w.put(kCacheMagic);
    w.put(kGeneratorRevision);
    w.put_string(config_hash(config.config()));
    w.put<std::uint64_t>(stream.size());
    for (const auto& ex : stream) {
        w.put(ex.x);
        w.put(static_cast<std::uint32_t>(ex.y));
        w.put(ex.gen_type ? static_cast<std::uint8_t>(*ex.gen_type) : kNoType);
    }
    const auto bytes = w.take();
    write_file_atomic(entry_path(config), std::string(bytes.begin(), bytes.end()));
}

std::shared_ptr<const std::vector<LabeledExample>> StreamCache::get(const ValidatedConfig& config, bool* hit) const {
    if (auto cached = load(config)) {
        if (hit) *hit = true;
        return std::make_shared<const std::vector<LabeledExample>>(std::move(*cached));
    }
    if (hit) *hit = false;
    auto stream = std::make_shared<const std::vector<LabeledExample>>(generate_stream(config));
    store(config, *stream);
    return stream;
}

// ---------------------------------------------------------------------------

bool RunSummary::all_ok() const {
    return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.ok; });
}

std::uint64_t classifier_seed(std::uint64_t stream_seed, ClassifierKind kind) {
    return splitmix64(stream_seed ^ splitmix64(0x636c66ULL + static_cast<std::uint64_t>(kind)));
}

EvalSeries evaluate(std::span<const LabeledExample> stream, std::size_t num_classes, ClassifierKind kind,
                    std::uint64_t seed, std::size_t window) {
    auto model = make_classifier(kind, num_classes, seed);
    return prequential_run(stream, *model, num_classes, window);
}

namespace {

struct StreamJob {
    fs::path path;
    std::optional<ValidatedConfig> config;
    std::string error;
    std::mutex mutex;
    std::shared_ptr<const std::vector<LabeledExample>> stream;
    std::size_t pending = 0;
    bool cache_hit = false;
    double seconds = 0.0;
    std::string load_error;
};

nlohmann::json cell_json(const CellResult& c) {
    nlohmann::json j = {
        {"stream_id", c.stream_id},
        {"config_path", c.config_path},
        {"config_hash", c.config_hash},
        {"stream_seed", c.stream_seed},
        {"classifier", c.classifier},
        {"classifier_seed", c.classifier_seed},
        {"status", c.ok ? "ok" : "failed"},
        {"cache_hit", c.cache_hit},
        {"stream_seconds", c.stream_seconds},
        {"run_seconds", c.run_seconds},
        {"examples", c.examples},
    };
    if (!c.ok) j["error"] = c.error;
    if (c.ok) {
        j["results_path"] = c.results_path;
        j["mean_gmean"] = c.mean_gmean;
        j["snapshots"] = {{"start", optional_json(c.snapshots.start)},
                          {"pre", optional_json(c.snapshots.pre)},
                          {"post", optional_json(c.snapshots.post)},
                          {"end", optional_json(c.snapshots.end)}};
    }
    return j;
}

}  // namespace

RunSummary run_experiment(std::span<const fs::path> configs, const RunOptions& options) {
    if (options.window == 0) throw std::invalid_argument("window must be positive");
    if (options.classifiers.empty()) throw std::invalid_argument("no classifiers selected");
    fs::create_directories(options.out_dir);
    const StreamCache cache(options.cache_dir ? *options.cache_dir
                                              : StreamCache::resolve_dir(options.out_dir / "cache"));
    const auto started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<std::unique_ptr<StreamJob>> streams;
    for (const auto& path : configs) {
        auto job = std::make_unique<StreamJob>();
        job->path = path;
        try {
            StreamConfig c = load_config(path.string());
            if (options.seed) c.seed = *options.seed;
            job->config = validate_or_throw(c);
        } catch (const std::exception& e) {
            job->error = e.what();
        }
        job->pending = options.classifiers.size();
        streams.push_back(std::move(job));
    }

    RunSummary summary;
    summary.cells.resize(streams.size() * options.classifiers.size());
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next++; i < summary.cells.size(); i = next++) {
            StreamJob& job = *streams[i / options.classifiers.size()];
            const ClassifierKind kind = options.classifiers[i % options.classifiers.size()];
            CellResult& cell = summary.cells[i];
            cell.config_path = job.path.string();
            cell.classifier = to_string(kind);
            cell.stream_id = job.config ? job.config->config().id : job.path.stem().string();
            if (!job.config) {
                cell.error = "invalid config: " + job.error;
                continue;
            }
            const ValidatedConfig& config = *job.config;
            cell.config_hash = config_hash(config.config());
            cell.stream_seed = config->seed;
            cell.classifier_seed = classifier_seed(config->seed, kind);
            try {
                std::shared_ptr<const std::vector<LabeledExample>> stream;
                {
                    std::lock_guard lock(job.mutex);
                    if (!job.stream && job.load_error.empty()) {
                        const auto ts = std::chrono::steady_clock::now();
                        try {
                            job.stream = cache.get(config, &job.cache_hit);
                        } catch (const std::exception& e) {
                            job.load_error = e.what();
                        }
                        job.seconds = seconds_since(ts);
                    }
                    if (!job.load_error.empty()) throw std::runtime_error("stream generation failed: " + job.load_error);
                    stream = job.stream;
                    cell.cache_hit = job.cache_hit;
                    cell.stream_seconds = job.seconds;
                }
                const auto tr = std::chrono::steady_clock::now();
                const EvalSeries series =
                    evaluate(*stream, config.num_classes(), kind, cell.classifier_seed, options.window);
                cell.run_seconds = seconds_since(tr);
                cell.examples = stream->size();
                cell.snapshots = series.snapshots(options.markers);
                cell.mean_gmean = series.mean_gmean();

                std::ostringstream csv;
                write_results_header(csv, config.num_classes());
                write_results_rows(csv, series, cell.classifier, cell.stream_id);
                const fs::path out = options.out_dir / cell.stream_id / (cell.classifier + ".csv");
                write_file_atomic(out, csv.str());
                cell.results_path = fs::relative(out, options.out_dir).string();
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            std::lock_guard lock(job.mutex);
            if (--job.pending == 0) job.stream.reset();
        }
    };

    const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, summary.cells.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < jobs; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::ostringstream snap;
    write_snapshot_header(snap);
    for (const auto& c : summary.cells) {
        if (c.ok) write_snapshot_row(snap, c.stream_id, c.classifier, c.snapshots);
    }
    write_file_atomic(options.out_dir / "snapshots.csv", snap.str());

    nlohmann::json manifest = {
        {"tool", "imbstream"},
        {"version", kVersion},
        {"started_utc", started},
        {"wall_seconds", seconds_since(t0)},
        {"jobs", jobs},
        {"window", options.window},
        {"cache_dir", cache.dir().string()},
        {"seed_override", options.seed ? nlohmann::json(*options.seed) : nlohmann::json()},
        {"markers", {{"start", options.markers.start}, {"pre", options.markers.pre_drift},
                     {"post", options.markers.post_drift}}},
        {"all_ok", summary.all_ok()},
    };
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : summary.cells) cells.push_back(cell_json(c));
    manifest["cells"] = std::move(cells);
    write_file_atomic(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
    return summary;
}

}  // namespace imbs
