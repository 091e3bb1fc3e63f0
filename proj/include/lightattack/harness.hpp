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

#ifndef LIGHTATTACK_HARNESS_HPP
#define LIGHTATTACK_HARNESS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "classifier.hpp"
#include "errors.hpp"
#include "optimizer.hpp"
#include "rng.hpp"
#include "scene.hpp"

namespace lightattack {

// ---------------------------------------------------------------------------
// Conditions
// ---------------------------------------------------------------------------

enum class ConditionKind { Baseline = 0, WhiteLight = 1, RandomPixel = 2, DiffEvolution = 3 };

inline constexpr std::array<ConditionKind, 4> kAllConditions{ConditionKind::Baseline, ConditionKind::WhiteLight,
                                                             ConditionKind::RandomPixel, ConditionKind::DiffEvolution};

inline std::string_view condition_key(ConditionKind k)
{
    switch (k) {
    case ConditionKind::Baseline: return "baseline";
    case ConditionKind::WhiteLight: return "white";
    case ConditionKind::RandomPixel: return "random";
    case ConditionKind::DiffEvolution: return "de";
    }
    return "?";
}

inline std::string_view condition_title(ConditionKind k)
{
    switch (k) {
    case ConditionKind::Baseline: return "Baseline";
    case ConditionKind::WhiteLight: return "White Light";
    case ConditionKind::RandomPixel: return "Random";
    case ConditionKind::DiffEvolution: return "Diff Evolution";
    }
    return "?";
}

inline ConditionKind condition_from_key(std::string_view key)
{
    for (ConditionKind k : kAllConditions)
        if (condition_key(k) == key)
            return k;
    throw InvalidArgument("unknown condition '" + std::string(key) + "' (expected baseline, white, random or de)");
}

/// Comma-separated condition keys, returned in canonical table order.
inline std::vector<ConditionKind> parse_condition_list(std::string_view text)
{
    std::vector<bool> wanted(kAllConditions.size(), false);
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!item.empty() && (item.front() == ' ' || item.front() == '\t'))
            item.remove_prefix(1);
        while (!item.empty() && (item.back() == ' ' || item.back() == '\t'))
            item.remove_suffix(1);
        if (item.empty())
            throw InvalidArgument("empty entry in condition list");
        wanted[static_cast<std::size_t>(condition_from_key(item))] = true;
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    std::vector<ConditionKind> out;
    for (ConditionKind k : kAllConditions)
        if (wanted[static_cast<std::size_t>(k)])
            out.push_back(k);
    return out;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct AttackMode {
    bool targeted = false;
    int target_class = 0;
};

struct ExperimentConfig {
    SceneSpec scene;
    ProjectorSpec projector;
    CameraSpec camera;
    /// builtin | model:<path> | tcp:<host>:<port> | exec:<command>
    std::string classifier = "builtin";
    std::uint8_t background = 255;
    int captures_per_condition = 20;
    DEConfig de;
    /// When unset the DE seed is derived from master_seed.
    std::optional<std::uint64_t> de_seed;
    bool exclude_initial_generation = false;
    AttackMode attack;
    std::uint64_t master_seed = 0;
    std::vector<ConditionKind> conditions{kAllConditions.begin(), kAllConditions.end()};
    int replay_count = 20;
};

inline void validate(const ExperimentConfig& cfg)
{
    validate(cfg.scene);
    validate(cfg.projector);
    validate(cfg.camera);
    validate(cfg.de);
    if (cfg.captures_per_condition < 2)
        throw InvalidArgument("captures_per_condition must be at least 2");
    if (cfg.replay_count < 2)
        throw InvalidArgument("replay count must be at least 2");
    if (cfg.conditions.empty() || cfg.conditions.front() != ConditionKind::Baseline)
        throw InvalidArgument("the baseline condition is required");
}

// Seed streams. Noise seeds use the condition index as the stream id.
inline constexpr std::uint64_t kRandomGenomeStream = 102;
inline constexpr std::uint64_t kDESeedStream = 103;
inline constexpr std::uint64_t kReplayStream = 104;

inline std::uint64_t capture_seed(std::uint64_t master, ConditionKind kind, std::uint64_t capture_index)
{
    return derive_seed(master, static_cast<std::uint64_t>(kind), capture_index);
}

inline std::uint64_t effective_de_seed(const ExperimentConfig& cfg)
{
    return cfg.de_seed ? *cfg.de_seed : derive_seed(cfg.master_seed, kDESeedStream, 0);
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct CaptureRecord {
    ConditionKind condition = ConditionKind::Baseline;
    int index = 0;
    std::optional<int> generation;
    std::optional<int> member;
    std::optional<Genome> genome;
    std::uint64_t seed = 0;
    ClassScores scores;
    double p_true = 0.0;
};

/// Fitness the DE minimizes for a given score vector.
inline double attack_fitness(const AttackMode& mode, const ClassScores& scores, int true_class)
{
    if (mode.targeted)
        return 1.0 - true_class_probability(scores, mode.target_class);
    return true_class_probability(scores, true_class);
}

namespace detail {

inline CaptureRecord classify_capture(Classifier& classifier, const Image8& img, int true_class)
{
    CaptureRecord rec;
    rec.scores = classifier.classify(img);
    rec.p_true = true_class_probability(rec.scores, true_class);
    return rec;
}

} // namespace detail

/// Result of one condition: its records, plus the optimizer outcome for DE.
struct ConditionRun {
    std::vector<CaptureRecord> records;
    std::optional<DEResult> de;
};

inline Genome random_genome(SplitMix64& rng)
{
    Genome g;
    for (std::size_t j = 0; j < kGenomeDims; ++j)
        g[j] = clamp_dimension(Genome::lower[j] + rng.uniform() * (Genome::upper[j] - Genome::lower[j]), j);
    return g;
}

inline ConditionRun run_condition(const ExperimentConfig& cfg, ConditionKind kind, Classifier& classifier)
{
    validate(cfg);
    const int true_class = cfg.scene.true_class;
    ConditionRun run;

    auto one_capture = [&](int index, const ProjectionPattern* pattern) {
        const std::uint64_t seed = capture_seed(cfg.master_seed, kind, static_cast<std::uint64_t>(index));
        const Image8 img = pattern ? capture(cfg.scene, cfg.projector, *pattern, cfg.camera, seed)
                                   : capture_ambient(cfg.scene, cfg.camera, seed);
        CaptureRecord rec = detail::classify_capture(classifier, img, true_class);
        rec.condition = kind;
        rec.index = index;
        rec.seed = seed;
        return rec;
    };

    switch (kind) {
    case ConditionKind::Baseline:
        for (int i = 0; i < cfg.captures_per_condition; ++i)
            run.records.push_back(one_capture(i, nullptr));
        break;
    case ConditionKind::WhiteLight: {
        const ProjectionPattern white = pattern_white();
        for (int i = 0; i < cfg.captures_per_condition; ++i)
            run.records.push_back(one_capture(i, &white));
        break;
    }
    case ConditionKind::RandomPixel: {
        SplitMix64 rng(derive_seed(cfg.master_seed, kRandomGenomeStream, 0));
        std::vector<Genome> genomes;
        for (int i = 0; i < cfg.captures_per_condition; ++i)
            genomes.push_back(random_genome(rng));
        run.records.resize(genomes.size());
        detail::parallel_for(genomes.size(), cfg.de.jobs, [&](std::size_t i) {
            const ProjectionPattern p = genome_to_pattern(genomes[i], cfg.background);
            run.records[i] = one_capture(static_cast<int>(i), &p);
            run.records[i].genome = genomes[i];
        });
        break;
    }
    case ConditionKind::DiffEvolution: {
        DEConfig de = cfg.de;
        de.seed = effective_de_seed(cfg);
        const auto per_gen = static_cast<std::size_t>(de.population_size) * static_cast<std::size_t>(de.fitness_repeats);
        std::vector<CaptureRecord> slots(per_gen * static_cast<std::size_t>(de.generations + 1));
        const FitnessFn fitness = [&](const Genome& g, const EvalContext& ctx) {
            const std::size_t slot = static_cast<std::size_t>(ctx.generation) * per_gen +
                                     static_cast<std::size_t>(ctx.member) * static_cast<std::size_t>(de.fitness_repeats) +
                                     static_cast<std::size_t>(ctx.repeat);
            const ProjectionPattern p = genome_to_pattern(g, cfg.background);
            CaptureRecord rec = one_capture(static_cast<int>(slot), &p);
            rec.generation = ctx.generation;
            rec.member = ctx.member;
            rec.genome = g;
            const double f = attack_fitness(cfg.attack, rec.scores, true_class);
            slots[slot] = std::move(rec);
            return f;
        };
        run.de = de_run(fitness, de);
        const std::size_t skip = cfg.exclude_initial_generation ? per_gen : 0;
        run.records.assign(std::make_move_iterator(slots.begin() + static_cast<std::ptrdiff_t>(skip)),
                           std::make_move_iterator(slots.end()));
        break;
    }
    }
    return run;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct ConditionStats {
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;
    double var = 0.0;
    double min = 0.0;
    double max = 0.0;
    double delta_mean = 0.0;
    double delta_median = 0.0;
};

struct SummaryStats {
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;
    double var = 0.0;
    double min = 0.0;
    double max = 0.0;
};

inline SummaryStats summarize(std::span<const double> values)
{
    if (values.empty())
        throw EmptyInput("no samples");
    if (values.size() < 2)
        throw SingleSample("variance needs at least two samples");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    SummaryStats s;
    double sum = 0.0;
    for (double v : sorted)
        sum += v;
    s.mean = sum / static_cast<double>(n);
    s.median = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    double ss = 0.0;
    for (double v : sorted)
        ss += (v - s.mean) * (v - s.mean);
    s.var = ss / static_cast<double>(n - 1);
    s.sd = std::sqrt(s.var);
    s.min = sorted.front();
    s.max = sorted.back();
    return s;
}

/// Table statistics of `values`, with deltas taken against `baseline`.
inline ConditionStats compute_stats(std::span<const double> values, std::span<const double> baseline)
{
    const SummaryStats cond = summarize(values);
    const SummaryStats base = summarize(baseline);
    ConditionStats out{cond.mean, cond.median, cond.sd, cond.var, cond.min, cond.max, 0.0, 0.0};
    out.delta_mean = base.mean - cond.mean;
    out.delta_median = base.median - cond.median;
    return out;
}

inline std::vector<double> true_class_series(std::span<const CaptureRecord> records)
{
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records)
        out.push_back(r.p_true);
    return out;
}

inline ConditionStats compute_stats(std::span<const CaptureRecord> records, std::span<const CaptureRecord> baseline_records)
{
    const auto values = true_class_series(records);
    const auto baseline = true_class_series(baseline_records);
    return compute_stats(values, baseline);
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

struct TableRow {
    std::string class_name;
    ConditionKind condition = ConditionKind::Baseline;
    ConditionStats stats;
};

enum class TableFormat { Text, Csv };

/// Rounds half away from zero to three decimals, as an integer count of 1e-3.
inline long long round_millis(double v) { return std::llround(v * 1000.0); }

/// ".849", "1.000", "-.012"; CSV form keeps the leading zero ("0.849").
inline std::string format_value(double v, bool leading_zero)
{
    const long long m = round_millis(v);
    const long long a = m < 0 ? -m : m;
    char frac[8];
    std::snprintf(frac, sizeof frac, "%03lld", a % 1000);
    std::string out = m < 0 ? "-" : "";
    if (a >= 1000 || leading_zero)
        out += std::to_string(a / 1000);
    out += ".";
    out += frac;
    return out;
}

inline std::string display_class_name(const std::string& label)
{
    std::string out = label;
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z')
        out[0] = static_cast<char>(out[0] - 'a' + 'A');
    return out;
}

/// Renders rows grouped by class (first-appearance order) with conditions in
/// canonical order. Every class must have every condition in `expected`.
inline std::string render_table(std::span<const TableRow> rows, TableFormat format,
                                std::span<const ConditionKind> expected = kAllConditions)
{
    std::vector<std::string> classes;
    std::map<std::pair<std::string, ConditionKind>, const TableRow*> lookup;
    for (const auto& r : rows) {
        if (std::find(classes.begin(), classes.end(), r.class_name) == classes.end())
            classes.push_back(r.class_name);
        lookup[{r.class_name, r.condition}] = &r;
    }
    if (classes.empty())
        throw MissingCondition("no statistics to render");
    for (const auto& c : classes)
        for (ConditionKind k : expected)
            if (!lookup.count({c, k}))
                throw MissingCondition("class '" + c + "' has no " + std::string(condition_title(k)) + " statistics");

    std::ostringstream out;
    if (format == TableFormat::Csv) {
        out << "class,condition,mean,median,sd,var,min,max,delta_mean,delta_median\n";
    } else {
        char line[160];
        std::snprintf(line, sizeof line, "%-12s %-15s %6s %6s %6s %6s %6s %6s %6s %7s\n", "Class", "Condition", "Mean",
                      "Median", "SD", "Var", "Min", "Max", "dMean", "dMedian");
        out << line;
    }
    for (const auto& c : classes) {
        bool first = true;
        for (ConditionKind k : kAllConditions) {
            const auto it = lookup.find({c, k});
            if (it == lookup.end() || std::find(expected.begin(), expected.end(), k) == expected.end())
                continue;
            const ConditionStats& s = it->second->stats;
            const std::array<double, 8> vals{s.mean, s.median, s.sd, s.var, s.min, s.max, s.delta_mean, s.delta_median};
            if (format == TableFormat::Csv) {
                out << c << ',' << condition_title(k);
                for (double v : vals)
                    out << ',' << format_value(v, true);
                out << '\n';
            } else {
                char line[160];
                const std::string name = first ? display_class_name(c) : "";
                std::snprintf(line, sizeof line, "%-12s %-15s %6s %6s %6s %6s %6s %6s %6s %7s\n", name.c_str(),
                              std::string(condition_title(k)).c_str(), format_value(vals[0], false).c_str(),
                              format_value(vals[1], false).c_str(), format_value(vals[2], false).c_str(),
                              format_value(vals[3], false).c_str(), format_value(vals[4], false).c_str(),
                              format_value(vals[5], false).c_str(), format_value(vals[6], false).c_str(),
                              format_value(vals[7], false).c_str());
                out << line;
                first = false;
            }
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct ExperimentMeta {
    std::string class_name;
    int true_class = 0;
    std::uint64_t master_seed = 0;
    std::string config_hash;
    std::vector<std::string> labels;
    std::vector<ConditionKind> conditions;
};

struct ExperimentReport {
    ExperimentMeta meta;
    std::vector<CaptureRecord> records;
    std::vector<TableRow> rows;
    std::optional<DEResult> de;
};

inline std::vector<CaptureRecord> records_for(std::span<const CaptureRecord> records, ConditionKind kind)
{
    std::vector<CaptureRecord> out;
    for (const auto& r : records)
        if (r.condition == kind)
            out.push_back(r);
    return out;
}

/// Statistics rows for every condition in meta.conditions. Pure in the records.
inline std::vector<TableRow> tabulate(const ExperimentMeta& meta, std::span<const CaptureRecord> records)
{
    const auto baseline = records_for(records, ConditionKind::Baseline);
    if (baseline.empty())
        throw MissingCondition("no baseline records");
    std::vector<TableRow> rows;
    for (ConditionKind k : meta.conditions) {
        const auto recs = records_for(records, k);
        if (recs.empty())
            throw MissingCondition("no records for condition " + std::string(condition_key(k)));
        rows.push_back({meta.class_name, k, compute_stats(recs, baseline)});
    }
    return rows;
}

/// Runs the baseline first, then the remaining configured conditions.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, Classifier& classifier, std::string config_hash)
{
    validate(cfg);
    ExperimentReport report;
    report.meta.class_name = classifier.labels()[static_cast<std::size_t>(cfg.scene.true_class)];
    report.meta.true_class = cfg.scene.true_class;
    report.meta.master_seed = cfg.master_seed;
    report.meta.config_hash = std::move(config_hash);
    report.meta.labels = classifier.labels().names();
    report.meta.conditions = cfg.conditions;
    for (ConditionKind k : cfg.conditions) {
        ConditionRun run = run_condition(cfg, k, classifier);
        report.records.insert(report.records.end(), run.records.begin(), run.records.end());
        if (run.de)
            report.de = std::move(run.de);
    }
    report.rows = tabulate(report.meta, report.records);
    return report;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline std::string meta_to_json(const ExperimentMeta& meta)
{
    nlohmann::ordered_json j;
    j["class"] = meta.class_name;
    j["true_class"] = meta.true_class;
    j["master_seed"] = meta.master_seed;
    j["config_hash"] = meta.config_hash;
    j["labels"] = meta.labels;
    std::vector<std::string> conds;
    for (ConditionKind k : meta.conditions)
        conds.emplace_back(condition_key(k));
    j["conditions"] = conds;
    nlohmann::ordered_json wrapper;
    wrapper["meta"] = j;
    return wrapper.dump();
}

inline std::string record_to_json(const CaptureRecord& r)
{
    nlohmann::ordered_json j;
    j["cond"] = condition_key(r.condition);
    j["i"] = r.index;
    j["gen"] = r.generation ? nlohmann::ordered_json(*r.generation) : nlohmann::ordered_json(nullptr);
    j["member"] = r.member ? nlohmann::ordered_json(*r.member) : nlohmann::ordered_json(nullptr);
    j["genome"] = r.genome ? nlohmann::ordered_json(r.genome->v) : nlohmann::ordered_json(nullptr);
    j["seed"] = r.seed;
    j["probs"] = r.scores.probs;
    j["p_true"] = r.p_true;
    return j.dump();
}

/// First line carries run metadata; every following line is one capture.
inline std::string records_to_jsonl(const ExperimentMeta& meta, std::span<const CaptureRecord> records)
{
    std::string out = meta_to_json(meta) + "\n";
    for (const auto& r : records)
        out += record_to_json(r) + "\n";
    return out;
}

struct ParsedRun {
    ExperimentMeta meta;
    std::vector<CaptureRecord> records;
};

inline ParsedRun parse_jsonl(const std::string& text)
{
    ParsedRun run;
    bool have_meta = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        ++line_no;
        auto nl = text.find('\n', pos);
        const bool terminated = nl != std::string::npos;
        const std::string line = text.substr(pos, terminated ? nl - pos : std::string::npos);
        pos = terminated ? nl + 1 : text.size();
        if (line.empty())
            continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        try {
            const auto j = nlohmann::json::parse(line);
            if (j.contains("meta")) {
                const auto& m = j.at("meta");
                run.meta.class_name = m.at("class").get<std::string>();
                run.meta.true_class = m.at("true_class").get<int>();
                run.meta.master_seed = m.at("master_seed").get<std::uint64_t>();
                run.meta.config_hash = m.at("config_hash").get<std::string>();
                run.meta.labels = m.at("labels").get<std::vector<std::string>>();
                for (const auto& c : m.at("conditions"))
                    run.meta.conditions.push_back(condition_from_key(c.get<std::string>()));
                have_meta = true;
                continue;
            }
            CaptureRecord r;
            r.condition = condition_from_key(j.at("cond").get<std::string>());
            r.index = j.at("i").get<int>();
            if (!j.at("gen").is_null())
                r.generation = j.at("gen").get<int>();
            if (!j.at("member").is_null())
                r.member = j.at("member").get<int>();
            if (!j.at("genome").is_null()) {
                Genome g;
                g.v = j.at("genome").get<std::array<double, kGenomeDims>>();
                r.genome = g;
            }
            r.seed = j.at("seed").get<std::uint64_t>();
            r.scores.probs = j.at("probs").get<std::vector<double>>();
            r.p_true = j.at("p_true").get<double>();
            run.records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw Error(where + "malformed record (" + e.what() + ")");
        } catch (const InvalidArgument& e) {
            throw Error(where + e.what());
        }
    }
    if (!have_meta)
        throw Error("missing metadata line");
    return run;
}

inline std::string render_report_text(const ExperimentMeta& meta, std::span<const CaptureRecord> records,
                                      std::span<const TableRow> rows)
{
    std::ostringstream out;
    out << "class: " << meta.class_name << " (index " << meta.true_class << ")\n";
    out << "master_seed: " << meta.master_seed << "\n";
    out << "config_hash: " << meta.config_hash << "\n";
    out << "calibration: not applicable (fixture scenes are pre-positioned)\n";
    out << "captures:";
    for (ConditionKind k : meta.conditions)
        out << " " << condition_key(k) << "=" << records_for(records, k).size();
    out << "\n\n";
    out << render_table(rows, TableFormat::Text, meta.conditions);
    return out.str();
}

inline std::string render_report_csv(const ExperimentMeta& meta, std::span<const TableRow> rows)
{
    return render_table(rows, TableFormat::Csv, meta.conditions);
}

} // namespace lightattack

#endif // LIGHTATTACK_HARNESS_HPP
