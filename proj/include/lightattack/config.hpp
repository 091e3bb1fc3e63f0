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

#ifndef LIGHTATTACK_CONFIG_HPP
#define LIGHTATTACK_CONFIG_HPP

// Flat key=value configuration files. '#' starts a comment, blank lines are
// ignored, whitespace around keys and values is trimmed, unknown keys are
// rejected. See README.md for the full key list.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "classifier.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "imaging.hpp"

namespace lightattack {

struct KeyValue {
    std::string key;
    std::string value;
    int line = 0;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

inline double parse_double(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ConfigError(key + ": '" + text + "' is not a number");
    return v;
}

inline long long parse_int(const std::string& key, const std::string& text)
{
    long long v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ConfigError(key + ": '" + text + "' is not an integer");
    return v;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& text)
{
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ConfigError(key + ": '" + text + "' is not an unsigned integer");
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& text)
{
    if (text == "true" || text == "1" || text == "yes")
        return true;
    if (text == "false" || text == "0" || text == "no")
        return false;
    throw ConfigError(key + ": '" + text + "' is not a boolean");
}

template <std::size_t N>
std::array<double, N> parse_doubles(const std::string& key, const std::string& text)
{
    const auto parts = split(text, ',');
    if (parts.size() == 1 && N > 1) {
        std::array<double, N> out{};
        out.fill(parse_double(key, parts[0]));
        return out;
    }
    if (parts.size() != N)
        throw ConfigError(key + ": expected " + std::to_string(N) + " comma-separated values");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = parse_double(key, parts[i]);
    return out;
}

template <std::size_t N>
std::array<int, N> parse_ints(const std::string& key, const std::string& text)
{
    const auto parts = split(text, ',');
    if (parts.size() != N)
        throw ConfigError(key + ": expected " + std::to_string(N) + " comma-separated integers");
    std::array<int, N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = static_cast<int>(parse_int(key, parts[i]));
    return out;
}

// Shortest round-trip decimal for canonical dumps.
inline std::string fmt_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace detail

inline std::vector<KeyValue> parse_key_values(const std::string& text)
{
    std::vector<KeyValue> out;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        const std::string line = detail::trim(raw);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        KeyValue kv{detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), line_no};
        if (kv.key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        out.push_back(std::move(kv));
    }
    return out;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL)
{
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Experiment configuration plus where its reflectance came from.
struct LoadedConfig {
    ExperimentConfig config;
    std::string reflectance_path;
};

/// Applies one key. Paths are resolved against `base_dir`. Throws
/// ConfigError on unknown keys or unparsable values.
inline void apply_setting(LoadedConfig& lc, const std::string& key, const std::string& value,
                          const std::filesystem::path& base_dir = {}, const LabelSet& labels = LabelSet::cifar10())
{
    using namespace detail;
    ExperimentConfig& c = lc.config;
    try {
        if (key == "reflectance") {
            std::filesystem::path p(value);
            if (p.is_relative())
                p = base_dir / p;
            lc.reflectance_path = p.string();
            c.scene.reflectance = dequantize(load_ppm(lc.reflectance_path));
            const int h = c.scene.reflectance.height;
            const int w = c.scene.reflectance.width;
            c.projector.roi = {0, 0, h, w};
            c.projector.cell_h = std::max(1, h / kPatternSize);
            c.projector.cell_w = std::max(1, w / kPatternSize);
        } else if (key == "ambient") {
            c.scene.ambient = parse_doubles<3>(key, value);
        } else if (key == "true_class") {
            c.scene.true_class = labels.index_of(value);
        } else if (key == "projector.black_level") {
            c.projector.black_level = parse_doubles<3>(key, value);
        } else if (key == "projector.intensity") {
            c.projector.intensity = parse_double(key, value);
        } else if (key == "projector.gamma") {
            c.projector.gamma = parse_double(key, value);
        } else if (key == "projector.roi") {
            const auto r = parse_ints<4>(key, value);
            c.projector.roi = {r[0], r[1], r[2], r[3]};
        } else if (key == "projector.cell") {
            const auto r = parse_ints<2>(key, value);
            c.projector.cell_h = r[0];
            c.projector.cell_w = r[1];
        } else if (key == "camera.wb_target_gray") {
            c.camera.wb_target_gray = parse_double(key, value);
        } else if (key == "camera.wb_gain_min") {
            c.camera.wb_gain_min = parse_double(key, value);
        } else if (key == "camera.wb_gain_max") {
            c.camera.wb_gain_max = parse_double(key, value);
        } else if (key == "camera.shot_noise_sigma0") {
            c.camera.shot_noise_sigma0 = parse_double(key, value);
        } else if (key == "camera.out") {
            const auto r = parse_ints<2>(key, value);
            c.camera.out_h = r[0];
            c.camera.out_w = r[1];
        } else if (key == "classifier") {
            if (value.empty())
                throw ConfigError("classifier: empty selector");
            c.classifier = value;
        } else if (key == "background") {
            const auto b = parse_int(key, value);
            if (b < 0 || b > 255)
                throw ConfigError("background must be a byte (0-255)");
            c.background = static_cast<std::uint8_t>(b);
        } else if (key == "captures_per_condition") {
            c.captures_per_condition = static_cast<int>(parse_int(key, value));
        } else if (key == "conditions") {
            c.conditions = parse_condition_list(value);
        } else if (key == "attack") {
            if (value == "untargeted") {
                c.attack = {};
            } else if (value.rfind("targeted:", 0) == 0) {
                c.attack = {true, labels.index_of(value.substr(9))};
            } else {
                throw ConfigError("attack must be 'untargeted' or 'targeted:<label>'");
            }
        } else if (key == "master_seed") {
            c.master_seed = parse_u64(key, value);
        } else if (key == "de.population_size") {
            c.de.population_size = static_cast<int>(parse_int(key, value));
        } else if (key == "de.generations") {
            c.de.generations = static_cast<int>(parse_int(key, value));
        } else if (key == "de.F") {
            c.de.F = parse_double(key, value);
        } else if (key == "de.CR") {
            c.de.CR = parse_double(key, value);
        } else if (key == "de.fitness_repeats") {
            c.de.fitness_repeats = static_cast<int>(parse_int(key, value));
        } else if (key == "de.seed") {
            c.de_seed = parse_u64(key, value);
        } else if (key == "de.exclude_initial") {
            c.exclude_initial_generation = parse_bool(key, value);
        } else if (key == "replay.count") {
            c.replay_count = static_cast<int>(parse_int(key, value));
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

inline LoadedConfig parse_experiment_config(const std::string& text, const std::filesystem::path& base_dir = {})
{
    LoadedConfig lc;
    bool have_reflectance = false;
    const auto entries = parse_key_values(text);
    // The reflectance sets default projector geometry, so it goes first.
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& kv : entries) {
            if ((kv.key == "reflectance") != (pass == 0))
                continue;
            try {
                apply_setting(lc, kv.key, kv.value, base_dir);
            } catch (const ConfigError& e) {
                throw ConfigError("line " + std::to_string(kv.line) + ": " + e.what());
            }
            have_reflectance = have_reflectance || kv.key == "reflectance";
        }
    if (!have_reflectance)
        throw ConfigError("missing required key 'reflectance'");
    return lc;
}

inline LoadedConfig load_experiment_config(const std::string& path)
{
    std::string text;
    try {
        const auto bytes = read_file_bytes(path);
        text.assign(bytes.begin(), bytes.end());
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    try {
        return parse_experiment_config(text, std::filesystem::path(path).parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Canonical dump of every setting that influences results. The reflectance
/// is represented by a content hash so relocating files keeps the hash.
inline std::string canonical_config(const ExperimentConfig& c)
{
    using detail::fmt_double;
    const auto triple = [](const Rgb& v) { return fmt_double(v[0]) + "," + fmt_double(v[1]) + "," + fmt_double(v[2]); };
    const Image8 refl = quantize(c.scene.reflectance);
    const std::string_view refl_bytes(reinterpret_cast<const char*>(refl.data.data()), refl.data.size());
    char refl_hash[17];
    std::snprintf(refl_hash, sizeof refl_hash, "%016llx", static_cast<unsigned long long>(fnv1a64(refl_bytes)));

    std::string conds;
    for (ConditionKind k : c.conditions)
        conds += (conds.empty() ? "" : ",") + std::string(condition_key(k));

    std::ostringstream o;
    o << "reflectance=" << refl.height << "x" << refl.width << ":" << refl_hash << "\n"
      << "ambient=" << triple(c.scene.ambient) << "\n"
      << "true_class=" << c.scene.true_class << "\n"
      << "projector.black_level=" << triple(c.projector.black_level) << "\n"
      << "projector.intensity=" << fmt_double(c.projector.intensity) << "\n"
      << "projector.gamma=" << fmt_double(c.projector.gamma) << "\n"
      << "projector.roi=" << c.projector.roi.top << "," << c.projector.roi.left << "," << c.projector.roi.height << ","
      << c.projector.roi.width << "\n"
      << "projector.cell=" << c.projector.cell_h << "," << c.projector.cell_w << "\n"
      << "camera.wb_target_gray=" << fmt_double(c.camera.wb_target_gray) << "\n"
      << "camera.wb_gain_min=" << fmt_double(c.camera.wb_gain_min) << "\n"
      << "camera.wb_gain_max=" << fmt_double(c.camera.wb_gain_max) << "\n"
      << "camera.shot_noise_sigma0=" << fmt_double(c.camera.shot_noise_sigma0) << "\n"
      << "camera.out=" << c.camera.out_h << "," << c.camera.out_w << "\n"
      << "classifier=" << c.classifier << "\n"
      << "background=" << int{c.background} << "\n"
      << "captures_per_condition=" << c.captures_per_condition << "\n"
      << "conditions=" << conds << "\n"
      << "attack=" << (c.attack.targeted ? "targeted:" + std::to_string(c.attack.target_class) : "untargeted") << "\n"
      << "master_seed=" << c.master_seed << "\n"
      << "de.population_size=" << c.de.population_size << "\n"
      << "de.generations=" << c.de.generations << "\n"
      << "de.F=" << fmt_double(c.de.F) << "\n"
      << "de.CR=" << fmt_double(c.de.CR) << "\n"
      << "de.fitness_repeats=" << c.de.fitness_repeats << "\n"
      << "de.seed=" << effective_de_seed(c) << "\n"
      << "de.exclude_initial=" << (c.exclude_initial_generation ? "true" : "false") << "\n"
      << "replay.count=" << c.replay_count << "\n";
    return o.str();
}

inline std::string config_hash(const ExperimentConfig& c)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_config(c))));
    return buf;
}

} // namespace lightattack

#endif // LIGHTATTACK_CONFIG_HPP
