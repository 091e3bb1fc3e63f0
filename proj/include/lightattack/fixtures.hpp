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

#ifndef LIGHTATTACK_FIXTURES_HPP
#define LIGHTATTACK_FIXTURES_HPP

// Procedural 64x64 "figurine" scenes, one per CIFAR-10 label, and the
// built-in centroid model fitted to their baseline captures. Reflectances
// are generated as bytes so the PPM files under data/fixtures match the
// in-memory scenes exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "classifier.hpp"
#include "errors.hpp"
#include "imaging.hpp"
#include "scene.hpp"

namespace lightattack::fixtures {

inline constexpr int kSceneSide = 64;

namespace detail {

struct Canvas {
    Image8 img{kSceneSide, kSceneSide};

    void fill(Rgb8 c)
    {
        for (int y = 0; y < kSceneSide; ++y)
            for (int x = 0; x < kSceneSide; ++x)
                set(y, x, c);
    }
    void rect(int x0, int y0, int x1, int y1, Rgb8 c)
    {
        for (int y = std::max(0, y0); y < std::min(kSceneSide, y1); ++y)
            for (int x = std::max(0, x0); x < std::min(kSceneSide, x1); ++x)
                set(y, x, c);
    }
    void ellipse(double cx, double cy, double rx, double ry, Rgb8 c)
    {
        for (int y = 0; y < kSceneSide; ++y)
            for (int x = 0; x < kSceneSide; ++x) {
                const double dx = (x + 0.5 - cx) / rx;
                const double dy = (y + 0.5 - cy) / ry;
                if (dx * dx + dy * dy <= 1.0)
                    set(y, x, c);
            }
    }
    // Upward-pointing isosceles triangle with apex (ax, ay) and base row by.
    void triangle(double ax, double ay, double half_base, double by, Rgb8 c)
    {
        for (int y = 0; y < kSceneSide; ++y) {
            const double t = (y + 0.5 - ay) / (by - ay);
            if (t < 0.0 || t > 1.0)
                continue;
            for (int x = 0; x < kSceneSide; ++x)
                if (std::abs(x + 0.5 - ax) <= t * half_base)
                    set(y, x, c);
        }
    }
    void set(int y, int x, Rgb8 c)
    {
        for (int k = 0; k < 3; ++k)
            img.at(y, x, k) = c[static_cast<std::size_t>(k)];
    }
};

} // namespace detail

struct FixtureScene {
    std::string name;
    Image8 reflectance;
    Rgb ambient;
    int true_class = 0;
};

/// Reflectance and lighting for the figurine of label `label_index`.
inline FixtureScene class_scene(int label_index)
{
    detail::Canvas cv;
    FixtureScene s;
    s.true_class = label_index;
    s.name = LabelSet::cifar10()[static_cast<std::size_t>(label_index)];
    switch (label_index) {
    case 0: // airplane: white cross against blue sky, dim room
        cv.fill({90, 150, 235});
        cv.rect(0, 52, 64, 64, {70, 120, 60});
        cv.ellipse(32, 30, 24, 4.5, {230, 230, 230});
        cv.ellipse(34, 30, 5, 20, {215, 215, 220});
        cv.ellipse(12, 30, 3, 8, {215, 215, 220});
        s.ambient = {0.3, 0.3, 0.3};
        break;
    case 1: // automobile: red body, dark wheels, pale wall over grey floor
        cv.fill({170, 165, 150});
        cv.rect(0, 46, 64, 64, {95, 95, 100});
        cv.rect(8, 28, 56, 44, {175, 45, 40});
        cv.rect(17, 17, 45, 29, {170, 50, 45});
        cv.rect(20, 20, 42, 27, {130, 160, 180});
        cv.ellipse(19, 45, 5.5, 5.5, {30, 30, 30});
        cv.ellipse(45, 45, 5.5, 5.5, {30, 30, 30});
        s.ambient = {0.6, 0.6, 0.6};
        break;
    case 2: // bird: brown bird with orange beak on a branch against foliage
        cv.fill({115, 165, 120});
        cv.rect(0, 44, 64, 50, {110, 80, 50});
        cv.ellipse(30, 34, 14, 10, {150, 100, 65});
        cv.ellipse(42, 23, 7, 7, {140, 95, 60});
        cv.triangle(52, 21, 2.5, 27, {170, 120, 50});
        s.ambient = {0.6, 0.6, 0.6};
        break;
    case 3: // cat: orange cat with pointed ears on a purple mat, dim room
        cv.fill({120, 70, 150});
        cv.ellipse(32, 42, 16, 13, {225, 150, 70});
        cv.ellipse(32, 23, 10, 9, {230, 155, 75});
        cv.triangle(25, 9, 4, 17, {230, 155, 75});
        cv.triangle(39, 9, 4, 17, {230, 155, 75});
        s.ambient = {0.3, 0.3, 0.3};
        break;
    case 4: // deer: tan deer with antlers in a dark green forest, dim room
        cv.fill({40, 110, 50});
        cv.ellipse(30, 34, 16, 9, {185, 130, 75});
        cv.ellipse(46, 22, 6, 6, {185, 130, 75});
        cv.rect(16, 40, 19, 60, {160, 110, 65});
        cv.rect(40, 40, 43, 60, {160, 110, 65});
        cv.rect(43, 6, 45, 17, {220, 210, 190});
        cv.rect(48, 6, 50, 17, {220, 210, 190});
        s.ambient = {0.3, 0.3, 0.3};
        break;
    case 5: // dog: brown dog with floppy ears on a red rug, dim room
        cv.fill({170, 50, 50});
        cv.ellipse(32, 38, 17, 11, {150, 100, 60});
        cv.ellipse(46, 22, 8, 8, {150, 100, 60});
        cv.ellipse(39, 24, 3, 7, {90, 60, 35});
        cv.rect(18, 44, 22, 60, {140, 95, 55});
        cv.rect(40, 44, 44, 60, {140, 95, 55});
        s.ambient = {0.3, 0.3, 0.3};
        break;
    case 6: // frog: green frog with yellow eyes on brown mud, dim room
        cv.fill({130, 90, 40});
        cv.ellipse(32, 38, 18, 12, {70, 190, 70});
        cv.ellipse(24, 26, 4, 4, {235, 235, 90});
        cv.ellipse(40, 26, 4, 4, {235, 235, 90});
        s.ambient = {0.3, 0.3, 0.3};
        break;
    case 7: // horse: brown horse on straw under a blue sky
        cv.fill({140, 160, 170});
        cv.rect(0, 40, 64, 64, {170, 155, 105});
        cv.ellipse(30, 32, 18, 9, {125, 80, 45});
        cv.ellipse(50, 20, 5, 9, {125, 80, 45});
        cv.rect(15, 36, 19, 60, {115, 75, 40});
        cv.rect(40, 36, 44, 60, {115, 75, 40});
        s.ambient = {0.6, 0.6, 0.6};
        break;
    case 8: // ship: white hull and red funnel on blue water
        cv.fill({170, 172, 165});
        cv.rect(0, 38, 64, 64, {60, 100, 170});
        cv.rect(6, 28, 58, 40, {172, 172, 172});
        cv.rect(24, 14, 38, 28, {170, 60, 50});
        s.ambient = {0.6, 0.6, 0.6};
        break;
    case 9: // truck: blue cab and box with dark wheels on asphalt, dim room
        cv.fill({110, 110, 115});
        cv.rect(0, 50, 64, 64, {70, 70, 75});
        cv.rect(4, 14, 42, 44, {60, 90, 190});
        cv.rect(42, 24, 60, 44, {70, 100, 200});
        cv.rect(46, 27, 57, 34, {180, 210, 230});
        cv.ellipse(14, 46, 5.5, 5.5, {25, 25, 25});
        cv.ellipse(50, 46, 5.5, 5.5, {25, 25, 25});
        s.ambient = {0.3, 0.3, 0.3};
        break;
    default:
        throw IndexOutOfRange("no fixture for label index " + std::to_string(label_index));
    }
    s.reflectance = cv.img;
    return s;
}

inline SceneSpec to_scene(const FixtureScene& f) { return SceneSpec{dequantize(f.reflectance), f.ambient, f.true_class}; }

/// Bundled scene names: "susceptible" is the dog figurine in a brighter room,
/// "invariant" the automobile; any CIFAR-10 label name selects that figurine.
inline FixtureScene named_scene(const std::string& name)
{
    if (name == "susceptible") {
        FixtureScene s = class_scene(5);
        s.ambient = {0.4, 0.4, 0.4};
        return s;
    }
    if (name == "invariant")
        return class_scene(1);
    return class_scene(LabelSet::cifar10().index_of(name));
}

inline constexpr int kTrainingCapturesPerClass = 5;
inline constexpr std::uint64_t kTrainingSeedBase = 1000;

/// Baseline (ambient-only) captures of every figurine with default camera
/// settings; the training set of the built-in model.
inline std::vector<LabeledImage> training_set(const CameraSpec& camera = {})
{
    std::vector<LabeledImage> out;
    for (int c = 0; c < 10; ++c) {
        const SceneSpec scene = to_scene(class_scene(c));
        for (int k = 0; k < kTrainingCapturesPerClass; ++k)
            out.push_back({capture_ambient(scene, camera, kTrainingSeedBase + static_cast<std::uint64_t>(c * 100 + k)), c});
    }
    return out;
}

inline CentroidModel builtin_model(double temperature = 50.0)
{
    const auto examples = training_set();
    return fit_centroids(examples, temperature);
}

} // namespace lightattack::fixtures

#endif // LIGHTATTACK_FIXTURES_HPP
