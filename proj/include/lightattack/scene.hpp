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

#ifndef LIGHTATTACK_SCENE_HPP
#define LIGHTATTACK_SCENE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "errors.hpp"
#include "imaging.hpp"
#include "rng.hpp"

namespace lightattack {

using Rgb = std::array<double, 3>;
using Rgb8 = std::array<std::uint8_t, 3>;

inline constexpr int kPatternSize = 32;

/// Surface under test: per-channel reflectance lit by uniform ambient light.
struct SceneSpec {
    Image reflectance;
    Rgb ambient{0.5, 0.5, 0.5};
    int true_class = 0;
};

struct Roi {
    int top = 0;
    int left = 0;
    int height = 64;
    int width = 64;
    bool operator==(const Roi&) const = default;
};

/// Simulated projector. The neutral-density filter is folded into
/// `intensity`; `black_level` is what leaks out when commanded to show 0.
struct ProjectorSpec {
    Rgb black_level{0.02, 0.02, 0.02};
    double intensity = 0.8;
    double gamma = 2.2;
    Roi roi{};
    int cell_h = 2;
    int cell_w = 2;
};

/// Simulated camera: gray-world auto white balance, shot noise, box
/// downsampling to the classifier resolution, and 8-bit quantization.
struct CameraSpec {
    double wb_target_gray = 0.5;
    double wb_gain_min = 0.5;
    double wb_gain_max = 2.0;
    double shot_noise_sigma0 = 0.01;
    int out_h = 32;
    int out_w = 32;
};

/// 32x32 grid of 8-bit RGB projector commands. Cell (x, y) is column x, row y.
struct ProjectionPattern {
    std::array<std::uint8_t, kPatternSize * kPatternSize * 3> grid{};

    std::uint8_t& at(int x, int y, int c) { return grid[(static_cast<std::size_t>(y) * kPatternSize + x) * 3 + c]; }
    std::uint8_t at(int x, int y, int c) const { return grid[(static_cast<std::size_t>(y) * kPatternSize + x) * 3 + c]; }

    bool operator==(const ProjectionPattern&) const = default;
};

inline void validate(const SceneSpec& scene)
{
    validate(scene.reflectance);
    for (double a : scene.ambient)
        if (!(a >= 0.0 && a <= 1.0))
            throw InvalidArgument("ambient components must lie in [0,1]");
}

inline void validate(const ProjectorSpec& p)
{
    for (double b : p.black_level)
        if (!(b >= 0.0 && b < 1.0))
            throw InvalidArgument("projector black level must lie in [0,1)");
    if (!(p.intensity >= 0.0 && p.intensity <= 1.0))
        throw InvalidArgument("projector intensity must lie in [0,1]");
    if (!(p.gamma > 0.0) || !std::isfinite(p.gamma))
        throw InvalidArgument("projector gamma must be positive");
    if (p.cell_h <= 0 || p.cell_w <= 0)
        throw InvalidArgument("projector cell size must be positive");
    if (p.roi.height != kPatternSize * p.cell_h || p.roi.width != kPatternSize * p.cell_w)
        throw InvalidArgument("projector roi must be 32 cells of cell_h x cell_w");
    if (p.roi.top < 0 || p.roi.left < 0)
        throw InvalidArgument("projector roi origin must be non-negative");
}

inline void validate(const CameraSpec& cam)
{
    if (!(cam.wb_target_gray > 0.0 && cam.wb_target_gray < 1.0))
        throw InvalidArgument("white balance target must lie in (0,1)");
    if (!(cam.wb_gain_min > 0.0 && cam.wb_gain_min <= 1.0 && cam.wb_gain_max >= 1.0) || !std::isfinite(cam.wb_gain_max))
        throw InvalidArgument("white balance gains must satisfy 0 < min <= 1 <= max");
    if (!(cam.shot_noise_sigma0 >= 0.0) || !std::isfinite(cam.shot_noise_sigma0))
        throw InvalidArgument("shot noise sigma0 must be non-negative");
    if (cam.out_h <= 0 || cam.out_w <= 0)
        throw InvalidArgument("camera output size must be positive");
}

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

inline ProjectionPattern pattern_uniform(std::uint8_t level)
{
    ProjectionPattern p;
    p.grid.fill(level);
    return p;
}

inline ProjectionPattern pattern_off() { return pattern_uniform(0); }

inline ProjectionPattern pattern_white() { return pattern_uniform(255); }

inline ProjectionPattern pattern_single_pixel(int x, int y, Rgb8 rgb, std::uint8_t background)
{
    if (x < 0 || x >= kPatternSize || y < 0 || y >= kPatternSize)
        throw InvalidArgument("pattern cell (" + std::to_string(x) + "," + std::to_string(y) + ") out of range");
    ProjectionPattern p = pattern_uniform(background);
    for (int c = 0; c < 3; ++c)
        p.at(x, y, c) = rgb[static_cast<std::size_t>(c)];
    return p;
}

// ---------------------------------------------------------------------------
// Image formation
// ---------------------------------------------------------------------------

/// Light emitted per command value for one channel.
inline double projector_output(const ProjectorSpec& p, int channel, std::uint8_t command)
{
    const double drive = std::pow(static_cast<double>(command) / 255.0, p.gamma);
    return std::clamp(p.black_level[static_cast<std::size_t>(channel)] + p.intensity * drive, 0.0, 1.0);
}

/// Scene-sized light field. Zero outside the roi; each pattern cell lights a
/// cell_h x cell_w block (nearest-neighbour upscaling).
inline Image projected_light(const ProjectorSpec& projector, const ProjectionPattern& pattern, int scene_h, int scene_w)
{
    validate(projector);
    const Roi& roi = projector.roi;
    if (roi.top + roi.height > scene_h || roi.left + roi.width > scene_w)
        throw DimensionMismatch("projector roi does not fit inside the " + std::to_string(scene_h) + "x" +
                                std::to_string(scene_w) + " scene");

    std::array<std::array<double, 256>, 3> table{};
    for (int c = 0; c < 3; ++c)
        for (int v = 0; v < 256; ++v)
            table[static_cast<std::size_t>(c)][static_cast<std::size_t>(v)] =
                projector_output(projector, c, static_cast<std::uint8_t>(v));

    Image light(scene_h, scene_w, 0.0);
    for (int y = 0; y < roi.height; ++y) {
        const int cy = y / projector.cell_h;
        for (int x = 0; x < roi.width; ++x) {
            const int cx = x / projector.cell_w;
            for (int c = 0; c < 3; ++c)
                light.at(roi.top + y, roi.left + x, c) = table[static_cast<std::size_t>(c)][pattern.at(cx, cy, c)];
        }
    }
    return light;
}

/// Reflected radiance for an explicit light field: min(1, R * (ambient + L)).
inline Image radiance_with_light(const SceneSpec& scene, const Image& light)
{
    const Image& refl = scene.reflectance;
    if (light.height != refl.height || light.width != refl.width)
        throw DimensionMismatch("light field and scene dimensions differ");
    Image out(refl.height, refl.width);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const double ambient = scene.ambient[i % 3];
        out.data[i] = std::min(1.0, refl.data[i] * (ambient + light.data[i]));
    }
    return out;
}

inline Image radiance(const SceneSpec& scene, const ProjectorSpec& projector, const ProjectionPattern& pattern)
{
    return radiance_with_light(scene, projected_light(projector, pattern, scene.reflectance.height, scene.reflectance.width));
}

/// Radiance with the projector switched off entirely (not even black level).
inline Image radiance_ambient(const SceneSpec& scene)
{
    return radiance_with_light(scene, Image(scene.reflectance.height, scene.reflectance.width, 0.0));
}

/// Per-channel gray-world gains for `img` under `camera`.
inline Rgb white_balance_gains(const Image& img, const CameraSpec& camera)
{
    Rgb sums{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < img.data.size(); ++i)
        sums[i % 3] += img.data[i];
    const double n = static_cast<double>(img.height) * static_cast<double>(img.width);
    Rgb gains{};
    for (std::size_t c = 0; c < 3; ++c) {
        const double mean = sums[c] / n;
        gains[c] = std::clamp(camera.wb_target_gray / std::max(mean, 1e-6), camera.wb_gain_min, camera.wb_gain_max);
    }
    return gains;
}

/// White balance, shot noise, box downsampling, quantization (in that order).
/// Noise draws are consumed in row-major pixel/channel order from a
/// SplitMix64 stream seeded with `noise_seed`.
inline Image8 apply_camera(const Image& img, const CameraSpec& camera, std::uint64_t noise_seed)
{
    validate(camera);
    if (img.height % camera.out_h != 0 || img.width % camera.out_w != 0)
        throw NonDivisibleDimensions("camera output " + std::to_string(camera.out_h) + "x" +
                                     std::to_string(camera.out_w) + " does not divide the scene");

    const Rgb gains = white_balance_gains(img, camera);
    Image balanced = img;
    for (std::size_t i = 0; i < balanced.data.size(); ++i)
        balanced.data[i] = std::clamp(balanced.data[i] * gains[i % 3], 0.0, 1.0);

    if (camera.shot_noise_sigma0 > 0.0) {
        SplitMix64 rng(noise_seed);
        for (double& v : balanced.data) {
            const double sigma = camera.shot_noise_sigma0 * std::sqrt(v);
            v = std::clamp(v + sigma * rng.gaussian(), 0.0, 1.0);
        }
    }

    return quantize(downsample_box(balanced, camera.out_h, camera.out_w));
}

/// One full project -> reflect -> camera pass.
inline Image8 capture(const SceneSpec& scene, const ProjectorSpec& projector, const ProjectionPattern& pattern,
                      const CameraSpec& camera, std::uint64_t noise_seed)
{
    return apply_camera(radiance(scene, projector, pattern), camera, noise_seed);
}

/// Capture with the projector fully disabled (the ambient-light baseline).
inline Image8 capture_ambient(const SceneSpec& scene, const CameraSpec& camera, std::uint64_t noise_seed)
{
    return apply_camera(radiance_ambient(scene), camera, noise_seed);
}

} // namespace lightattack

#endif // LIGHTATTACK_SCENE_HPP
