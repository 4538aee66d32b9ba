// imbstream: generate, evaluate and label multi-class imbalanced streams.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "imbstream/bench.hpp"
#include "imbstream/generator.hpp"
#include "imbstream/labeler.hpp"
#include "imbstream/stream_io.hpp"

namespace fs = std::filesystem;
using namespace imbs;

namespace {

std::vector<ClassifierKind> parse_classifiers(const std::string& list) {
    std::vector<ClassifierKind> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const ClassifierKind k = parse_classifier_kind(item);
        if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    }
    if (out.empty()) throw std::invalid_argument("--classifiers selects nothing");
    return out;
}

ValidatedConfig load_validated(const fs::path& path, const std::optional<std::uint64_t>& seed) {
    StreamConfig c = load_config(path.string());
    if (seed) c.seed = *seed;
    return validate_or_throw(c);
}

void write_stream(const ValidatedConfig& config, StreamFormat format, const fs::path& out) {
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    const fs::path tmp = out.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        StreamGenerator gen(config);
        if (format == StreamFormat::Csv) {
            write_csv_header(os);
            while (gen.has_next()) write_csv_row(os, gen.next());
        } else {
            write_arff_header(os, config->id, config.num_classes());
            while (gen.has_next()) write_arff_row(os, gen.next());
        }
        if (!os.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, out);
}

std::string fmt(const std::optional<double>& v) {
    if (!v) return "     -";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic multi-class imbalanced stream benchmark"};
    app.set_version_flag("--version", std::string("imbstream ") + kVersion);
    app.require_subcommand(1);

    std::string config_path, out_path, stream_path, classifiers = "vfdt,ob,oob,uob", format = "csv", cache_dir;
    std::optional<std::uint64_t> seed;
    std::size_t window = kDefaultWindow, jobs = 1, k = kDefaultNeighbors;

    auto* generate = app.add_subcommand("generate", "Write the stream of each config to <out>/<id>.<format>");
    generate->add_option("--config", config_path, "Config file or directory of configs")->required();
    generate->add_option("--out", out_path, "Output directory")->required();
    generate->add_option("--seed", seed, "Override the config seed");
    generate->add_option("--format", format, "csv or arff")->check(CLI::IsMember({"csv", "arff"}));

    auto* run = app.add_subcommand("run", "Prequential evaluation of the stream x classifier grid");
    run->add_option("--config", config_path, "Config file or directory of configs")->required();
    run->add_option("--out", out_path, "Output directory")->required();
    run->add_option("--classifiers", classifiers, "Comma-separated subset of vfdt,ob,oob,uob");
    run->add_option("--seed", seed, "Override every config seed");
    run->add_option("--window", window, "Evaluation window")->check(CLI::PositiveNumber);
    run->add_option("--jobs", jobs, "Parallel grid cells")->check(CLI::PositiveNumber);
    run->add_option("--cache-dir", cache_dir, std::string("Stream cache (default $") + kCacheDirEnv + " or <out>/cache)");

    auto* label = app.add_subcommand("label", "Neighbourhood type proportions per window");
    auto* label_src = label->add_option_group("source");
    label_src->add_option("--stream", stream_path, "Stream file (.csv or .arff)");
    label_src->add_option("--config", config_path, "Generate the stream from a config instead");
    label_src->require_option(1);
    label->add_option("--out", out_path, "Output CSV (default stdout)");
    label->add_option("--k", k, "Neighbours")->check(CLI::PositiveNumber);
    label->add_option("--window", window, "Window length")->check(CLI::PositiveNumber);
    label->add_option("--seed", seed, "Override the config seed");

    auto* exp = app.add_subcommand("export", "Materialise one stream to a file");
    exp->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    exp->add_option("--out", out_path, "Output file")->required();
    exp->add_option("--format", format, "csv or arff (default from extension)");
    exp->add_option("--seed", seed, "Override the config seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            const StreamFormat f = parse_stream_format(format);
            for (const auto& path : collect_config_files(config_path)) {
                const ValidatedConfig config = load_validated(path, seed);
                const fs::path out = fs::path(out_path) / (config->id + (f == StreamFormat::Csv ? ".csv" : ".arff"));
                write_stream(config, f, out);
                std::cout << out.string() << '\n';
            }
            return 0;
        }
        if (exp->parsed()) {
            const ValidatedConfig config = load_validated(config_path, seed);
            const StreamFormat f = exp->count("--format") ? parse_stream_format(format) : format_from_path(out_path);
            write_stream(config, f, out_path);
            return 0;
        }
        if (label->parsed()) {
            std::vector<LabeledExample> stream;
            std::size_t num_classes = 0;
            if (!stream_path.empty()) {
                stream = read_stream_file(stream_path);
                if (stream.empty()) throw std::runtime_error(stream_path + ": stream has no examples");
                num_classes = infer_num_classes(stream);
            } else {
                const ValidatedConfig config = load_validated(config_path, seed);
                stream = generate_stream(config);
                num_classes = config.num_classes();
            }
            const auto windows = label_windows(stream, num_classes, k, window);
            if (out_path.empty()) {
                write_type_csv(std::cout, windows);
            } else {
                std::ostringstream os;
                write_type_csv(os, windows);
                write_file_atomic(out_path, os.str());
            }
            return 0;
        }
        if (run->parsed()) {
            RunOptions options;
            options.out_dir = out_path;
            options.classifiers = parse_classifiers(classifiers);
            options.seed = seed;
            options.window = window;
            options.jobs = jobs;
            if (!cache_dir.empty()) options.cache_dir = cache_dir;
            const auto configs = collect_config_files(config_path);
            const RunSummary summary = run_experiment(configs, options);
            std::printf("%-36s %-5s %7s %7s %7s %7s %7s %8s\n", "stream", "clf", "mean", "start", "pre", "post", "end",
                        "seconds");
            for (const auto& c : summary.cells) {
                if (!c.ok) {
                    std::printf("%-36s %-5s FAILED: %s\n", c.stream_id.c_str(), c.classifier.c_str(), c.error.c_str());
                    continue;
                }
                std::printf("%-36s %-5s %7.4f %7s %7s %7s %7s %8.2f\n", c.stream_id.c_str(), c.classifier.c_str(),
                            c.mean_gmean, fmt(c.snapshots.start).c_str(), fmt(c.snapshots.pre).c_str(),
                            fmt(c.snapshots.post).c_str(), fmt(c.snapshots.end).c_str(), c.run_seconds);
            }
            return summary.all_ok() ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: invalid config\n";
        for (const auto& msg : e.errors()) std::cerr << "  - " << msg << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
