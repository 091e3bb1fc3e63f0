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

// Exhaustive single-pixel search over a fixture scene with a noiseless
// camera: every cell position and every colour on a 17-level-per-channel
// grid, against the built-in classifier.
//
//   verify_fixtures [--stride N] SCENE...

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "lightattack/lightattack.hpp"

using namespace lightattack;

namespace {

constexpr int kLevels = 17;

std::uint8_t level(int k) { return static_cast<std::uint8_t>(std::lround(k * 255.0 / (kLevels - 1))); }

struct Summary {
    double baseline = 0;
    double white = 0;
    double min_p = 1;
    int arg[5] = {0, 0, 0, 0, 0};
    long below_white = 0;
    long total = 0;
};

Summary search(const std::string& name, int stride, Classifier& model)
{
    const SceneSpec scene = fixtures::to_scene(fixtures::named_scene(name));
    CameraSpec cam;
    cam.shot_noise_sigma0 = 0.0;
    const ProjectorSpec proj;
    auto p_of = [&](const Image8& img) { return true_class_probability(model.classify(img), scene.true_class); };

    Summary s;
    s.baseline = p_of(capture(scene, proj, pattern_off(), cam, 0));
    s.white = p_of(capture(scene, proj, pattern_white(), cam, 0));
    for (int y = 0; y < kPatternSize; y += stride) {
        for (int x = 0; x < kPatternSize; x += stride) {
            for (int r = 0; r < kLevels; ++r)
                for (int g = 0; g < kLevels; ++g)
                    for (int b = 0; b < kLevels; ++b) {
                        const auto pat = pattern_single_pixel(x, y, {level(r), level(g), level(b)}, 255);
                        const double p = p_of(capture(scene, proj, pat, cam, 0));
                        ++s.total;
                        if (p <= s.white)
                            ++s.below_white;
                        if (p < s.min_p) {
                            s.min_p = p;
                            s.arg[0] = x;
                            s.arg[1] = y;
                            s.arg[2] = level(r);
                            s.arg[3] = level(g);
                            s.arg[4] = level(b);
                        }
                    }
        }
    }
    return s;
}

} // namespace

int main(int argc, char** argv)
{
    int stride = 1;
    std::vector<std::string> scenes;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--stride") == 0 && i + 1 < argc)
            stride = std::stoi(argv[++i]);
        else
            scenes.emplace_back(argv[i]);
    }
    if (scenes.empty() || stride < 1) {
        std::cerr << "usage: verify_fixtures [--stride N] SCENE...\n";
        return 2;
    }
    CentroidClassifier model(fixtures::builtin_model());
    for (const auto& name : scenes) {
        const auto t0 = std::chrono::steady_clock::now();
        const Summary s = search(name, stride, model);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s stride=%d patterns=%ld baseline=%.6f white=%.6f min=%.6f argmin=%d,%d,%d,%d,%d "
                    "at_or_below_white=%ld seconds=%.0f\n",
                    name.c_str(), stride, s.total, s.baseline, s.white, s.min_p, s.arg[0], s.arg[1], s.arg[2],
                    s.arg[3], s.arg[4], s.below_white, secs);
        std::fflush(stdout);
    }
    return 0;
}
