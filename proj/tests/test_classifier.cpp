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
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lightattack/classifier.hpp"
#include "lightattack/fixtures.hpp"

using namespace lightattack;

namespace {

Image8 random32(SplitMix64& r)
{
    Image8 img(32, 32);
    for (auto& b : img.data)
        b = static_cast<std::uint8_t>(r.below(256));
    return img;
}

std::vector<LabeledImage> one_per_class(SplitMix64& r, std::size_t n = 10)
{
    std::vector<LabeledImage> out;
    for (std::size_t c = 0; c < n; ++c)
        out.push_back({random32(r), static_cast<int>(c)});
    return out;
}

double kl_to_uniform(const ClassScores& s)
{
    const double u = 1.0 / static_cast<double>(s.probs.size());
    double kl = 0;
    for (double p : s.probs)
        if (p > 0)
            kl += p * std::log(p / u);
    return kl;
}

} // namespace

TEST(LabelSet, DefaultOrderAndLookup)
{
    const auto l = LabelSet::cifar10();
    ASSERT_EQ(l.size(), 10u);
    const std::vector<std::string> expected{"airplane", "automobile", "bird", "cat", "deer",
                                            "dog",      "frog",       "horse", "ship", "truck"};
    EXPECT_EQ(l.names(), expected);
    EXPECT_EQ(l.index_of("horse"), 7);
    EXPECT_EQ(l.index_of("3"), 3);
    EXPECT_THROW(l.index_of("10"), IndexOutOfRange);
    EXPECT_THROW(l.index_of("zebra"), IndexOutOfRange);
    EXPECT_THROW(LabelSet(std::vector<std::string>{"a", "a"}), InvalidArgument);
}

TEST(TrueClassProbability, Examples)
{
    ClassScores onehot{std::vector<double>(10, 0.0)};
    onehot.probs[3] = 1.0;
    EXPECT_EQ(true_class_probability(onehot, 3), 1.0);

    ClassScores uniform{std::vector<double>(10, 0.1)};
    EXPECT_EQ(true_class_probability(uniform, 6), 0.1);

    ClassScores car_truck{std::vector<double>(10, 0.0)};
    car_truck.probs[1] = 0.43;
    car_truck.probs[9] = 0.57;
    EXPECT_EQ(true_class_probability(car_truck, 1), 0.43);
    EXPECT_EQ(car_truck.argmax(), 9u);

    EXPECT_THROW(true_class_probability(uniform, 10), IndexOutOfRange);
    EXPECT_THROW(true_class_probability(uniform, -1), IndexOutOfRange);
}

TEST(FitCentroids, SingleAndDuplicateExamples)
{
    SplitMix64 r(1);
    auto ex = one_per_class(r);
    const auto m = fit_centroids(ex, 50.0);
    for (std::size_t c = 0; c < 10; ++c)
        for (std::size_t d = 0; d < kClassifierDims; ++d)
            ASSERT_EQ(m.centroids[c][d], ex[c].image.data[d] / 255.0);

    auto doubled = ex;
    doubled.push_back(ex[4]);
    const auto m2 = fit_centroids(doubled, 50.0);
    EXPECT_EQ(m2.centroids[4], m.centroids[4]);
}

TEST(FitCentroids, ThreeExampleMeanMatchesHandComputation)
{
    SplitMix64 r(2);
    auto ex = one_per_class(r);
    const Image8 b = random32(r), c = random32(r);
    ex.push_back({b, 6});
    ex.push_back({c, 6});
    const auto m = fit_centroids(ex, 50.0);
    for (std::size_t d = 0; d < kClassifierDims; ++d) {
        const double expected = (ex[6].image.data[d] + b.data[d] + c.data[d]) / (3.0 * 255.0);
        ASSERT_NEAR(m.centroids[6][d], expected, 1e-15);
    }
}

TEST(FitCentroids, Errors)
{
    SplitMix64 r(3);
    auto ex = one_per_class(r);
    ex.erase(ex.begin() + 2);
    EXPECT_THROW(fit_centroids(ex, 50.0), MissingClassExamples);
    auto bad = one_per_class(r);
    bad[0].image = Image8(16, 16);
    EXPECT_THROW(fit_centroids(bad, 50.0), WrongImageSize);
    EXPECT_THROW(fit_centroids(one_per_class(r), 0.0), InvalidArgument);
}

TEST(PredictCentroid, OwnCentroidWins)
{
    SplitMix64 r(4);
    const auto ex = one_per_class(r);
    const auto m = fit_centroids(ex, 50.0);
    for (int k = 0; k < 10; ++k)
        EXPECT_EQ(predict_centroid(m, ex[static_cast<std::size_t>(k)].image).argmax(), static_cast<std::size_t>(k));
    EXPECT_THROW(predict_centroid(m, Image8(31, 32)), WrongImageSize);
}

TEST(PredictCentroid, TwoClassHandSoftmax)
{
    CentroidModel m{LabelSet(std::vector<std::string>{"near", "far"}),
                    {std::vector<double>(kClassifierDims, 0.0), std::vector<double>(kClassifierDims, 0.0)}, 1.0};
    m.centroids[1][17] = 1.0; // squared distance 1 from the black image
    const auto s = predict_centroid(m, Image8(32, 32, 0));
    const double e = std::exp(-1.0);
    EXPECT_NEAR(s.probs[0], 1.0 / (1.0 + e), 1e-15);
    EXPECT_NEAR(s.probs[1], e / (1.0 + e), 1e-15);
}

TEST(PredictCentroid, EquidistantPairTies)
{
    CentroidModel m;
    m.temperature = 1.0;
    m.centroids.assign(10, std::vector<double>(kClassifierDims, 1.0)); // distance 3072 each
    m.centroids[2].assign(kClassifierDims, 0.0);
    m.centroids[2][0] = 0.5;
    m.centroids[5].assign(kClassifierDims, 0.0);
    m.centroids[5][1] = 0.5;
    const auto s = predict_centroid(m, Image8(32, 32, 0));
    EXPECT_EQ(s.probs[2], s.probs[5]);
    EXPECT_NEAR(s.probs[2], 0.5, 1e-12);
}

TEST(PredictCentroid, PermutingLabelsPermutesScores)
{
    SplitMix64 r(5);
    const auto m = fit_centroids(one_per_class(r), 30.0);
    std::vector<std::size_t> perm(10);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::swap(perm[0], perm[4]);
    CentroidModel pm = m;
    std::vector<std::string> names(10);
    for (std::size_t i = 0; i < 10; ++i) {
        pm.centroids[i] = m.centroids[perm[i]];
        names[i] = m.labels[perm[i]];
    }
    pm.labels = LabelSet(names);
    for (int t = 0; t < 20; ++t) {
        const Image8 img = random32(r);
        const auto a = predict_centroid(m, img), b = predict_centroid(pm, img);
        for (std::size_t i = 0; i < 10; ++i)
            EXPECT_NEAR(b.probs[i], a.probs[perm[i]], 1e-15);
    }
}

TEST(PredictCentroid, HigherTemperatureMovesTowardUniform)
{
    SplitMix64 r(6);
    auto m = fit_centroids(one_per_class(r), 1.0);
    for (int t = 0; t < 10; ++t) {
        const Image8 img = random32(r);
        double prev = std::numeric_limits<double>::infinity();
        for (double temp : {1.0, 5.0, 20.0, 50.0, 200.0, 1000.0, 1e5}) {
            m.temperature = temp;
            const double kl = kl_to_uniform(predict_centroid(m, img));
            EXPECT_LE(kl, prev);
            prev = kl;
        }
    }
}

TEST(Softmax, StableForHugeLogits)
{
    const std::vector<double> logits{-1e6, -1e6 - 1, -2e6};
    const auto s = softmax(logits);
    EXPECT_TRUE(is_normalized(s));
    EXPECT_NEAR(s.probs[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
    EXPECT_EQ(s.probs[2], 0.0);
}

TEST(ScoresProperty, CentroidScoresAreNormalized)
{
    SplitMix64 r(7);
    const auto m = fit_centroids(one_per_class(r), 50.0);
    for (int t = 0; t < 500; ++t) {
        const auto s = predict_centroid(m, random32(r));
        ASSERT_TRUE(is_normalized(s));
        for (double p : s.probs)
            ASSERT_GE(p, 0.0);
    }
}

TEST(ModelJson, RoundTripIsExact)
{
    SplitMix64 r(8);
    const auto m = fit_centroids(one_per_class(r), 12.5);
    const auto back = model_from_json(model_to_json(m));
    EXPECT_EQ(back.labels, m.labels);
    EXPECT_EQ(back.temperature, m.temperature);
    EXPECT_EQ(back.centroids, m.centroids);
    EXPECT_THROW(model_from_json("{\"labels\":[\"a\"],\"temperature\":1,\"centroids\":[[1,2]]}"), Error);
    EXPECT_THROW(model_from_json("not json"), Error);
}

TEST(BuiltinModel, ClassifiesEveryFigurineBaselineCorrectly)
{
    CentroidClassifier model(fixtures::builtin_model());
    CameraSpec cam;
    for (int c = 0; c < 10; ++c) {
        const auto scene = fixtures::to_scene(fixtures::class_scene(c));
        const auto s = model.classify(capture_ambient(scene, cam, 424242));
        EXPECT_EQ(s.argmax(), static_cast<std::size_t>(c)) << model.labels()[static_cast<std::size_t>(c)];
        EXPECT_TRUE(is_normalized(s));
    }
}
