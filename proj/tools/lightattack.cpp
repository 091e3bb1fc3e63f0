// Copyright 2026 The lightattack Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// lightattack command-line front end. Data goes to stdout, diagnostics to
// stderr. Exit codes: 0 success, 1 domain error, 2 usage error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lightattack/lightattack.hpp"

namespace fs = std::filesystem;
using namespace lightattack;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

std::string read_text(const std::string& path)
{
    const auto bytes = read_file_bytes(path);
    return {bytes.begin(), bytes.end()};
}

void write_text(const fs::path& path, const std::string& text)
{
    write_file_bytes(path.string(), std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// --set key=value overrides, applied after the config file.
void apply_overrides(LoadedConfig& lc, const std::vector<std::string>& sets)
{
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + s + "'");
        apply_setting(lc, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)), fs::current_path());
    }
}

std::array<double, 5> parse_five(const std::string& text)
{
    const auto parts = detail::split(text, ',');
    if (parts.size() != 5)
        throw InvalidArgument("expected five comma-separated values, got '" + text + "'");
    std::array<double, 5> v{};
    for (std::size_t i = 0; i < 5; ++i)
        v[i] = detail::parse_double("pattern", parts[i]);
    return v;
}

// off | white | none | pixel:x,y,r,g,b | genome:x,y,r,g,b
std::optional<ProjectionPattern> parse_pattern(const std::string& text, std::uint8_t background)
{
    if (text == "none")
        return std::nullopt;
    if (text == "off")
        return pattern_off();
    if (text == "white")
        return pattern_white();
    if (text.rfind("pixel:", 0) == 0) {
        const auto v = parse_five(text.substr(6));
        for (double d : v)
            if (d != std::floor(d))
                throw InvalidArgument("pixel pattern values must be integers");
        for (std::size_t i = 2; i < 5; ++i)
            if (v[i] < 0 || v[i] > 255)
                throw InvalidArgument("pixel colour components must be 0-255");
        return pattern_single_pixel(static_cast<int>(v[0]), static_cast<int>(v[1]),
                                    {static_cast<std::uint8_t>(v[2]), static_cast<std::uint8_t>(v[3]),
                                     static_cast<std::uint8_t>(v[4])},
                                    background);
    }
    if (text.rfind("genome:", 0) == 0) {
        Genome g;
        g.v = parse_five(text.substr(7));
        return genome_to_pattern(g, background);
    }
    throw InvalidArgument("unknown pattern '" + text + "' (off, white, none, pixel:x,y,r,g,b, genome:x,y,r,g,b)");
}

std::unique_ptr<Classifier> open_classifier(const std::string& selector)
{
    try {
        return make_classifier(selector);
    } catch (const ClassifierUnavailable& e) {
        throw ClassifierUnavailable(std::string(e.what()) +
                                    "\nhint: start the classifier bridge, point --classifier or " + kClassifierEnv +
                                    " at it, or use --classifier builtin");
    }
}

struct RenderArgs {
    std::string config;
    std::string pattern = "off";
    int background = -1;
    std::uint64_t seed = 0;
    std::string out;
    std::vector<std::string> sets;
};

int cmd_render(const RenderArgs& a)
{
    LoadedConfig lc = load_experiment_config(a.config);
    apply_overrides(lc, a.sets);
    const ExperimentConfig& cfg = lc.config;
    const std::uint8_t background = a.background >= 0 ? static_cast<std::uint8_t>(a.background) : cfg.background;
    const auto pattern = parse_pattern(a.pattern, background);
    const Image8 img = pattern ? capture(cfg.scene, cfg.projector, *pattern, cfg.camera, a.seed)
                               : capture_ambient(cfg.scene, cfg.camera, a.seed);
    save_ppm(a.out, img);
    std::cout << img.width << "x" << img.height << "\n";
    return 0;
}

struct AttackArgs {
    std::string config;
    std::string out;
    std::string conditions;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::string classifier;
    std::vector<std::string> sets;
};

int cmd_attack(const AttackArgs& a)
{
    LoadedConfig lc = load_experiment_config(a.config);
    apply_overrides(lc, a.sets);
    ExperimentConfig& cfg = lc.config;
    if (!a.conditions.empty())
        cfg.conditions = parse_condition_list(a.conditions);
    if (a.seed)
        cfg.master_seed = *a.seed;
    cfg.de.jobs = a.jobs;
    cfg.classifier = resolve_classifier_selector(a.classifier, cfg.classifier);
    validate(cfg);

    auto classifier = open_classifier(cfg.classifier);
    const ExperimentReport report = run_experiment(cfg, *classifier, config_hash(cfg));

    fs::create_directories(a.out);
    const fs::path dir(a.out);
    const std::string text = render_report_text(report.meta, report.records, report.rows);
    write_text(dir / "captures.jsonl", records_to_jsonl(report.meta, report.records));
    write_text(dir / "report.txt", text);
    write_text(dir / "report.csv", render_report_csv(report.meta, report.rows));
    std::cout << text;
    return 0;
}

struct ClassifyArgs {
    std::string image;
    std::string classifier;
    std::string model;
    bool downsample = false;
};

int cmd_classify(const ClassifyArgs& a)
{
    Image8 img = load_ppm(a.image);
    if (img.height != kClassifierSide || img.width != kClassifierSide) {
        if (!a.downsample)
            throw WrongImageSize("image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                                 "; the classifier needs 32x32 (pass --downsample to box-filter it)");
        img = quantize(downsample_box(dequantize(img), kClassifierSide, kClassifierSide));
    }
    const std::string selector =
        !a.model.empty() ? "model:" + a.model : resolve_classifier_selector(a.classifier, "builtin");
    auto classifier = open_classifier(selector);
    const ClassScores scores = classifier->classify(img);

    std::vector<std::size_t> order(scores.probs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return scores.probs[l] > scores.probs[r]; });
    for (std::size_t i : order) {
        char line[128];
        std::snprintf(line, sizeof line, "%s:%.12f\n", classifier->labels()[i].c_str(), scores.probs[i]);
        std::cout << line;
    }
    return 0;
}

struct ReportArgs {
    std::string jsonl;
    std::string format = "text";
};

int cmd_report(const ReportArgs& a)
{
    const ParsedRun run = parse_jsonl(read_text(a.jsonl));
    if (records_for(run.records, ConditionKind::Baseline).empty())
        throw MissingCondition(a.jsonl + ": no baseline records; deltas cannot be computed");
    const auto rows = tabulate(run.meta, run.records);
    if (a.format == "csv")
        std::cout << render_report_csv(run.meta, rows);
    else
        std::cout << render_report_text(run.meta, run.records, rows);
    return 0;
}

struct FitArgs {
    std::string data;
    std::string out;
    double temperature = 50.0;
};

// <data>/<label>/*.ppm, one subdirectory per label.
int cmd_fit(const FitArgs& a)
{
    const LabelSet labels = LabelSet::cifar10();
    std::vector<LabeledImage> examples;
    for (std::size_t c = 0; c < labels.size(); ++c) {
        const fs::path dir = fs::path(a.data) / labels[c];
        if (!fs::is_directory(dir))
            continue;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".ppm")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            try {
                examples.push_back({load_ppm(f.string()), static_cast<int>(c)});
            } catch (const Error& e) {
                throw Error(f.string() + ": " + e.what());
            }
        }
    }
    const CentroidModel model = fit_centroids(examples, a.temperature, labels);
    write_text(a.out, model_to_json(model));
    std::cerr << "fitted " << labels.size() << " centroids from " << examples.size() << " images\n";
    return 0;
}

struct ReplayArgs {
    std::string config;
    std::string jsonl;
    std::string genome;
    int count = 0;
    std::optional<std::uint64_t> seed;
    std::string classifier;
    std::vector<std::string> sets;
};

// Incumbent of a recorded DE run: lowest mean fitness over a (gen, member) group.
Genome best_recorded_genome(const ParsedRun& run, const AttackMode& mode)
{
    std::map<std::pair<int, int>, std::pair<double, int>> fitness;
    std::map<std::pair<int, int>, Genome> genomes;
    for (const auto& r : run.records) {
        if (r.condition != ConditionKind::DiffEvolution || !r.generation || !r.member || !r.genome)
            continue;
        const auto key = std::make_pair(*r.generation, *r.member);
        auto& acc = fitness[key];
        acc.first += attack_fitness(mode, r.scores, run.meta.true_class);
        acc.second += 1;
        genomes[key] = *r.genome;
    }
    if (fitness.empty())
        throw MissingCondition("no differential evolution records to replay");
    auto best = fitness.begin();
    for (auto it = fitness.begin(); it != fitness.end(); ++it)
        if (it->second.first / it->second.second < best->second.first / best->second.second)
            best = it;
    return genomes.at(best->first);
}

int cmd_replay_best(const ReplayArgs& a)
{
    LoadedConfig lc = load_experiment_config(a.config);
    apply_overrides(lc, a.sets);
    ExperimentConfig& cfg = lc.config;
    if (a.seed)
        cfg.master_seed = *a.seed;
    cfg.classifier = resolve_classifier_selector(a.classifier, cfg.classifier);
    const int count = a.count > 0 ? a.count : cfg.replay_count;
    if (count < 2)
        throw InvalidArgument("replay count must be at least 2");

    Genome genome;
    std::optional<ParsedRun> run;
    if (!a.genome.empty()) {
        genome.v = parse_five(a.genome);
        if (!genome.in_bounds())
            throw InvalidArgument("genome out of bounds");
    } else if (!a.jsonl.empty()) {
        run = parse_jsonl(read_text(a.jsonl));
        genome = best_recorded_genome(*run, cfg.attack);
    } else {
        throw InvalidArgument("replay-best needs --jsonl or --genome");
    }

    auto classifier = open_classifier(cfg.classifier);
    const ProjectionPattern pattern = genome_to_pattern(genome, cfg.background);
    std::vector<double> p_true;
    for (int i = 0; i < count; ++i) {
        const auto seed = derive_seed(cfg.master_seed, kReplayStream, static_cast<std::uint64_t>(i));
        const Image8 img = capture(cfg.scene, cfg.projector, pattern, cfg.camera, seed);
        p_true.push_back(true_class_probability(classifier->classify(img), cfg.scene.true_class));
    }
    const SummaryStats s = summarize(p_true);
    std::cout << "genome: " << detail::fmt_double(genome.x()) << "," << detail::fmt_double(genome.y()) << ","
              << detail::fmt_double(genome.r()) << "," << detail::fmt_double(genome.g()) << ","
              << detail::fmt_double(genome.b()) << "\n";
    std::cout << "captures: " << count << "\n";
    std::cout << "mean: " << format_value(s.mean, true) << "\nmedian: " << format_value(s.median, true)
              << "\nsd: " << format_value(s.sd, true) << "\nvar: " << format_value(s.var, true)
              << "\nmin: " << format_value(s.min, true) << "\nmax: " << format_value(s.max, true) << "\n";
    if (run) {
        const auto base = records_for(run->records, ConditionKind::Baseline);
        if (!base.empty()) {
            const ConditionStats st = compute_stats(p_true, true_class_series(base));
            std::cout << "delta_mean: " << format_value(st.delta_mean, true)
                      << "\ndelta_median: " << format_value(st.delta_median, true) << "\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulated projector-camera light attacks on image classifiers"};
    app.require_subcommand(1);

    RenderArgs render;
    auto* render_cmd = app.add_subcommand("render", "Capture a scene under a projection pattern and write a PPM");
    render_cmd->add_option("--config", render.config, "Scene/experiment config file")->required();
    render_cmd->add_option("--pattern", render.pattern,
                           "off | white | none (projector disabled) | pixel:x,y,r,g,b | genome:x,y,r,g,b");
    render_cmd->add_option("--background", render.background, "Background byte for pixel patterns")
        ->check(CLI::Range(0, 255));
    render_cmd->add_option("--seed", render.seed, "Camera noise seed");
    render_cmd->add_option("--out", render.out, "Output PPM path")->required();
    render_cmd->add_option("--set", render.sets, "Override a config key (key=value)");

    AttackArgs attack;
    auto* attack_cmd = app.add_subcommand("attack", "Run the four-condition experiment and write results");
    attack_cmd->add_option("--config", attack.config, "Experiment config file")->required();
    attack_cmd->add_option("--out", attack.out, "Output directory")->required();
    attack_cmd->add_option("--conditions", attack.conditions, "Subset, e.g. baseline,white");
    attack_cmd->add_option("--seed", attack.seed, "Master seed (overrides config)");
    attack_cmd->add_option("--jobs", attack.jobs, "Parallel captures within a condition")->check(CLI::PositiveNumber);
    attack_cmd->add_option("--classifier", attack.classifier, "builtin | model:PATH | tcp:HOST:PORT | exec:CMD");
    attack_cmd->add_option("--set", attack.sets, "Override a config key (key=value)");

    ClassifyArgs classify;
    auto* classify_cmd = app.add_subcommand("classify", "Classify a 32x32 PPM and print label:probability lines");
    classify_cmd->add_option("--image", classify.image, "Input PPM")->required();
    classify_cmd->add_option("--classifier", classify.classifier, "builtin | model:PATH | tcp:HOST:PORT | exec:CMD");
    classify_cmd->add_option("--model", classify.model, "Centroid model JSON (shorthand for model:PATH)");
    classify_cmd->add_flag("--downsample", classify.downsample, "Box-filter larger images down to 32x32");

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Recompute the statistics table from a captures JSONL");
    report_cmd->add_option("--jsonl", report.jsonl, "captures.jsonl written by attack")->required();
    report_cmd->add_option("--format", report.format, "text | csv")->check(CLI::IsMember({"text", "csv"}));

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a centroid model from <dir>/<label>/*.ppm");
    fit_cmd->add_option("--data", fit.data, "Labelled image directory")->required();
    fit_cmd->add_option("--out", fit.out, "Model JSON output path")->required();
    fit_cmd->add_option("--temperature", fit.temperature, "Softmax temperature")->check(CLI::PositiveNumber);

    ReplayArgs replay;
    auto* replay_cmd = app.add_subcommand("replay-best", "Re-capture the best DE genome several times");
    replay_cmd->add_option("--config", replay.config, "Experiment config file")->required();
    replay_cmd->add_option("--jsonl", replay.jsonl, "captures.jsonl holding a DE run");
    replay_cmd->add_option("--genome", replay.genome, "Explicit genome x,y,r,g,b");
    replay_cmd->add_option("--count", replay.count, "Number of captures (default: replay.count)");
    replay_cmd->add_option("--seed", replay.seed, "Master seed (overrides config)");
    replay_cmd->add_option("--classifier", replay.classifier, "builtin | model:PATH | tcp:HOST:PORT | exec:CMD");
    replay_cmd->add_option("--set", replay.sets, "Override a config key (key=value)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*render_cmd)
            return cmd_render(render);
        if (*attack_cmd)
            return cmd_attack(attack);
        if (*classify_cmd)
            return cmd_classify(classify);
        if (*report_cmd)
            return cmd_report(report);
        if (*fit_cmd)
            return cmd_fit(fit);
        if (*replay_cmd)
            return cmd_replay_best(replay);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}
