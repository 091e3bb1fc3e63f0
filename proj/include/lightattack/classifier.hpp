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

#ifndef LIGHTATTACK_CLASSIFIER_HPP
#define LIGHTATTACK_CLASSIFIER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "imaging.hpp"

namespace lightattack {

inline constexpr int kClassifierSide = 32;
inline constexpr std::size_t kClassifierDims = kClassifierSide * kClassifierSide * 3;

/// Ordered, closed label set. Order defines the layout of every score vector.
class LabelSet {
public:
    LabelSet() : LabelSet(cifar10()) {}
    explicit LabelSet(std::vector<std::string> labels) : labels_(std::move(labels))
    {
        if (labels_.empty())
            throw InvalidArgument("label set must not be empty");
        std::unordered_set<std::string> seen;
        for (const auto& l : labels_)
            if (!seen.insert(l).second)
                throw InvalidArgument("duplicate label '" + l + "'");
    }

    static LabelSet cifar10()
    {
        return LabelSet(std::vector<std::string>{"airplane", "automobile", "bird", "cat", "deer", "dog", "frog",
                                                 "horse", "ship", "truck"});
    }

    std::size_t size() const { return labels_.size(); }
    const std::string& operator[](std::size_t i) const { return labels_.at(i); }
    const std::vector<std::string>& names() const { return labels_; }

    /// Accepts a label name or a decimal index.
    int index_of(const std::string& name_or_index) const
    {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == name_or_index)
                return static_cast<int>(i);
        if (!name_or_index.empty() && std::all_of(name_or_index.begin(), name_or_index.end(), ::isdigit)) {
            const auto idx = std::stoul(name_or_index);
            if (idx < labels_.size())
                return static_cast<int>(idx);
        }
        throw IndexOutOfRange("unknown label '" + name_or_index + "'");
    }

    bool operator==(const LabelSet&) const = default;

private:
    std::vector<std::string> labels_;
};

/// Probability vector over a LabelSet.
struct ClassScores {
    std::vector<double> probs;

    std::size_t argmax() const
    {
        return static_cast<std::size_t>(std::distance(probs.begin(), std::max_element(probs.begin(), probs.end())));
    }
};

inline constexpr double kNormalizationTolerance = 1e-9;

inline bool is_normalized(const ClassScores& s, double tol = kNormalizationTolerance)
{
    double sum = 0.0;
    for (double p : s.probs) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0)
            return false;
        sum += p;
    }
    return !s.probs.empty() && std::abs(sum - 1.0) <= tol;
}

inline double true_class_probability(const ClassScores& scores, int true_class)
{
    if (true_class < 0 || static_cast<std::size_t>(true_class) >= scores.probs.size())
        throw IndexOutOfRange("class index " + std::to_string(true_class) + " out of range");
    return scores.probs[static_cast<std::size_t>(true_class)];
}

/// Black-box probability oracle. Implementations must be safe to call from
/// several threads at once.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual ClassScores classify(const Image8& img) = 0;
    virtual const LabelSet& labels() const = 0;
};

// ---------------------------------------------------------------------------
// Nearest-centroid softmax classifier
// ---------------------------------------------------------------------------

struct CentroidModel {
    LabelSet labels;
    std::vector<std::vector<double>> centroids;
    double temperature = 50.0;
};

struct LabeledImage {
    Image8 image;
    int label = 0;
};

inline void check_classifier_size(const Image8& img)
{
    if (img.height != kClassifierSide || img.width != kClassifierSide)
        throw WrongImageSize("classifier input must be 32x32, got " + std::to_string(img.height) + "x" +
                             std::to_string(img.width));
}

inline CentroidModel fit_centroids(std::span<const LabeledImage> examples, double temperature,
                                   const LabelSet& labels = LabelSet::cifar10())
{
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw InvalidArgument("temperature must be finite and positive");
    CentroidModel model{labels, std::vector<std::vector<double>>(labels.size(), std::vector<double>(kClassifierDims, 0.0)),
                        temperature};
    std::vector<std::size_t> counts(labels.size(), 0);
    for (const auto& ex : examples) {
        check_classifier_size(ex.image);
        if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= labels.size())
            throw IndexOutOfRange("example label " + std::to_string(ex.label) + " out of range");
        auto& centroid = model.centroids[static_cast<std::size_t>(ex.label)];
        for (std::size_t d = 0; d < kClassifierDims; ++d)
            centroid[d] += dequantize_sample(ex.image.data[d]);
        ++counts[static_cast<std::size_t>(ex.label)];
    }
    for (std::size_t c = 0; c < labels.size(); ++c) {
        if (counts[c] == 0)
            throw MissingClassExamples("no training examples for class '" + labels[c] + "'");
        for (double& v : model.centroids[c])
            v /= static_cast<double>(counts[c]);
    }
    return model;
}

/// Max-subtracted softmax of `logits`.
inline ClassScores softmax(std::span<const double> logits)
{
    const double top = *std::max_element(logits.begin(), logits.end());
    ClassScores s;
    s.probs.resize(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        s.probs[i] = std::exp(logits[i] - top);
        sum += s.probs[i];
    }
    for (double& p : s.probs)
        p /= sum;
    return s;
}

/// softmax(-||x - centroid_c||^2 / T) over classes.
inline ClassScores predict_centroid(const CentroidModel& model, const Image8& img)
{
    check_classifier_size(img);
    std::vector<double> logits(model.centroids.size());
    for (std::size_t c = 0; c < model.centroids.size(); ++c) {
        const auto& centroid = model.centroids[c];
        double dist = 0.0;
        for (std::size_t d = 0; d < kClassifierDims; ++d) {
            const double diff = dequantize_sample(img.data[d]) - centroid[d];
            dist += diff * diff;
        }
        logits[c] = -dist / model.temperature;
    }
    return softmax(logits);
}

class CentroidClassifier : public Classifier {
public:
    explicit CentroidClassifier(CentroidModel model) : model_(std::move(model)) {}

    ClassScores classify(const Image8& img) override { return predict_centroid(model_, img); }
    const LabelSet& labels() const override { return model_.labels; }
    const CentroidModel& model() const { return model_; }

private:
    CentroidModel model_;
};

// Model files are JSON: {"labels": [...], "temperature": T, "centroids": [[...3072...], ...]}.

inline std::string model_to_json(const CentroidModel& model)
{
    nlohmann::json j;
    j["labels"] = model.labels.names();
    j["temperature"] = model.temperature;
    j["centroids"] = model.centroids;
    return j.dump() + "\n";
}

inline CentroidModel model_from_json(const std::string& text)
{
    try {
        const auto j = nlohmann::json::parse(text);
        CentroidModel model{LabelSet(j.at("labels").get<std::vector<std::string>>()),
                            j.at("centroids").get<std::vector<std::vector<double>>>(), j.at("temperature").get<double>()};
        if (model.centroids.size() != model.labels.size())
            throw Error("model has " + std::to_string(model.centroids.size()) + " centroids for " +
                        std::to_string(model.labels.size()) + " labels");
        for (const auto& c : model.centroids)
            if (c.size() != kClassifierDims)
                throw Error("model centroid has wrong dimension");
        if (!(model.temperature > 0.0) || !std::isfinite(model.temperature))
            throw Error("model temperature must be positive");
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed model file: ") + e.what());
    }
}

} // namespace lightattack

#endif // LIGHTATTACK_CLASSIFIER_HPP
