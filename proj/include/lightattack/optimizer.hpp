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

#ifndef LIGHTATTACK_OPTIMIZER_HPP
#define LIGHTATTACK_OPTIMIZER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "rng.hpp"
#include "scene.hpp"

namespace lightattack {

inline constexpr std::size_t kGenomeDims = 5;

/// Single-pixel attack parameters: cell location (x, y) in [0, 32) and
/// projected colour (r, g, b) in [0, 256). Discretized by floor.
struct Genome {
    std::array<double, kGenomeDims> v{};

    static constexpr std::array<double, kGenomeDims> lower{0.0, 0.0, 0.0, 0.0, 0.0};
    static constexpr std::array<double, kGenomeDims> upper{32.0, 32.0, 256.0, 256.0, 256.0};

    double x() const { return v[0]; }
    double y() const { return v[1]; }
    double r() const { return v[2]; }
    double g() const { return v[3]; }
    double b() const { return v[4]; }

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }

    bool in_bounds() const
    {
        for (std::size_t j = 0; j < kGenomeDims; ++j)
            if (!(v[j] >= lower[j] && v[j] < upper[j]))
                return false;
        return true;
    }

    bool operator==(const Genome&) const = default;
};

/// Clamps into the half-open box [lower, upper).
inline double clamp_dimension(double value, std::size_t j)
{
    const double hi = std::nextafter(Genome::upper[j], Genome::lower[j]);
    if (std::isnan(value))
        return Genome::lower[j];
    return std::clamp(value, Genome::lower[j], hi);
}

inline ProjectionPattern genome_to_pattern(const Genome& genome, std::uint8_t background)
{
    if (!genome.in_bounds())
        throw InvalidArgument("genome out of bounds");
    const auto byte = [](double v) { return static_cast<std::uint8_t>(std::floor(v)); };
    return pattern_single_pixel(static_cast<int>(std::floor(genome.x())), static_cast<int>(std::floor(genome.y())),
                                {byte(genome.r()), byte(genome.g()), byte(genome.b())}, background);
}

struct DEConfig {
    int population_size = 50;
    int generations = 4;
    double F = 0.5;
    double CR = 0.9;
    int fitness_repeats = 1;
    std::uint64_t seed = 0;
    /// Worker threads for trial evaluation; results are applied in member order.
    int jobs = 1;
};

inline void validate(const DEConfig& cfg)
{
    if (cfg.population_size < 4)
        throw InvalidArgument("DE population_size must be at least 4");
    if (cfg.generations < 1)
        throw InvalidArgument("DE generations must be positive");
    if (!std::isfinite(cfg.F))
        throw InvalidArgument("DE F must be finite");
    if (!(cfg.CR >= 0.0 && cfg.CR <= 1.0))
        throw InvalidArgument("DE CR must lie in [0,1]");
    if (cfg.fitness_repeats < 1)
        throw InvalidArgument("DE fitness_repeats must be positive");
    if (cfg.jobs < 1)
        throw InvalidArgument("jobs must be positive");
}

/// Identifies one fitness call. `generation` 0 is the initial population.
struct EvalContext {
    int generation = 0;
    int member = 0;
    int repeat = 0;
};

using FitnessFn = std::function<double(const Genome&, const EvalContext&)>;

struct DERecord {
    int generation = 0;
    int member = 0;
    Genome genome;
    double fitness = 0.0;
};

struct DEHistory {
    std::vector<DERecord> records;
    /// Best fitness observed up to and including each generation.
    std::vector<double> best_so_far;
};

struct DEResult {
    Genome best;
    double best_fitness = std::numeric_limits<double>::infinity();
    DEHistory history;
};

/// Thrown when the fitness function fails; carries what was recorded so far.
class DEAborted : public Error {
public:
    DEAborted(const std::string& what, DEHistory partial) : Error(what), history(std::move(partial)) {}
    DEHistory history;
};

/// Population sampled uniformly in the genome box; five draws per member in
/// dimension order.
inline std::vector<Genome> de_init(const DEConfig& config, SplitMix64& rng)
{
    validate(config);
    std::vector<Genome> pop(static_cast<std::size_t>(config.population_size));
    for (auto& g : pop)
        for (std::size_t j = 0; j < kGenomeDims; ++j)
            g[j] = clamp_dimension(Genome::lower[j] + rng.uniform() * (Genome::upper[j] - Genome::lower[j]), j);
    return pop;
}

inline std::vector<Genome> de_init(const DEConfig& config)
{
    SplitMix64 rng(config.seed);
    return de_init(config, rng);
}

namespace detail {

// Runs body(i) for i in [0, n) on up to `jobs` threads.
template <typename Body>
void parallel_for(std::size_t n, int jobs, Body&& body)
{
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        threads.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : threads)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace detail

/// Evaluates each genome (averaging fitness_repeats calls) for `generation`.
/// Records are appended to `history` in member order.
inline std::vector<double> de_evaluate(const std::vector<Genome>& genomes, const FitnessFn& fitness,
                                       const DEConfig& config, int generation, DEHistory& history)
{
    std::vector<double> values(genomes.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::exception_ptr> failures(genomes.size());
    detail::parallel_for(genomes.size(), config.jobs, [&](std::size_t i) {
        try {
            double sum = 0.0;
            for (int r = 0; r < config.fitness_repeats; ++r)
                sum += fitness(genomes[i], EvalContext{generation, static_cast<int>(i), r});
            values[i] = sum / config.fitness_repeats;
        } catch (...) {
            failures[i] = std::current_exception();
        }
    });
    for (std::size_t i = 0; i < genomes.size(); ++i) {
        if (failures[i]) {
            std::string what = "fitness evaluation failed";
            try {
                std::rethrow_exception(failures[i]);
            } catch (const std::exception& e) {
                what += std::string(": ") + e.what();
            } catch (...) {
            }
            throw DEAborted(what, history);
        }
        history.records.push_back({generation, static_cast<int>(i), genomes[i], values[i]});
    }
    return values;
}

/// Builds the DE/rand/1/bin trial for member i from the current population.
inline Genome de_trial(const std::vector<Genome>& pop, std::size_t i, const DEConfig& config, SplitMix64& rng)
{
    const std::size_t n = pop.size();
    std::size_t a = 0, b = 0, c = 0;
    do
        a = rng.below(n);
    while (a == i);
    do
        b = rng.below(n);
    while (b == i || b == a);
    do
        c = rng.below(n);
    while (c == i || c == a || c == b);

    const std::size_t jrand = rng.below(kGenomeDims);
    Genome trial = pop[i];
    for (std::size_t j = 0; j < kGenomeDims; ++j) {
        const double u = rng.uniform();
        if (u < config.CR || j == jrand)
            trial[j] = clamp_dimension(pop[a][j] + config.F * (pop[b][j] - pop[c][j]), j);
    }
    return trial;
}

struct StepResult {
    std::vector<Genome> population;
    std::vector<double> fitnesses;
    int evaluations = 0;
};

/// One synchronous generation: all trials are built from the incoming
/// population, evaluated, then accepted member by member when trial <= current.
inline StepResult de_step(const std::vector<Genome>& population, const std::vector<double>& fitnesses,
                          const DEConfig& config, int generation_index, SplitMix64& rng, const FitnessFn& fitness,
                          DEHistory& history)
{
    if (population.size() != fitnesses.size())
        throw InvalidArgument("fitness vector does not match population");
    std::vector<Genome> trials;
    trials.reserve(population.size());
    for (std::size_t i = 0; i < population.size(); ++i)
        trials.push_back(de_trial(population, i, config, rng));

    const std::vector<double> trial_fit = de_evaluate(trials, fitness, config, generation_index, history);

    StepResult out{population, fitnesses, static_cast<int>(trials.size()) * config.fitness_repeats};
    for (std::size_t i = 0; i < trials.size(); ++i) {
        if (trial_fit[i] <= out.fitnesses[i]) {
            out.population[i] = trials[i];
            out.fitnesses[i] = trial_fit[i];
        }
    }
    return out;
}

/// Minimizes `fitness` over the genome box: initial population plus
/// `generations` steps, population_size * (1 + generations) evaluations.
inline DEResult de_run(const FitnessFn& fitness, const DEConfig& config)
{
    validate(config);
    SplitMix64 rng(config.seed);
    DEResult result;
    std::vector<Genome> pop = de_init(config, rng);
    std::vector<double> fit = de_evaluate(pop, fitness, config, 0, result.history);

    auto track_best = [&](const std::vector<Genome>& p, const std::vector<double>& f) {
        for (std::size_t i = 0; i < p.size(); ++i)
            if (f[i] < result.best_fitness) {
                result.best_fitness = f[i];
                result.best = p[i];
            }
        result.history.best_so_far.push_back(result.best_fitness);
    };
    track_best(pop, fit);

    for (int gen = 1; gen <= config.generations; ++gen) {
        StepResult step = de_step(pop, fit, config, gen, rng, fitness, result.history);
        pop = std::move(step.population);
        fit = std::move(step.fitnesses);
        track_best(pop, fit);
    }
    return result;
}

/// One JSON object per evaluation: {"gen":G,"member":I,"genome":[...],"fitness":F}.
inline std::string history_to_jsonl(const DEHistory& history)
{
    std::string out;
    for (const auto& rec : history.records) {
        nlohmann::ordered_json j;
        j["gen"] = rec.generation;
        j["member"] = rec.member;
        j["genome"] = rec.genome.v;
        j["fitness"] = rec.fitness;
        out += j.dump() + "\n";
    }
    return out;
}

} // namespace lightattack

#endif // LIGHTATTACK_OPTIMIZER_HPP
