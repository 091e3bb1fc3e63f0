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

#ifndef LIGHTATTACK_IMAGING_HPP
#define LIGHTATTACK_IMAGING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace lightattack {

/// Linear-radiance RGB raster, row-major, samples in [0, 1].
struct Image {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Image() = default;
    Image(int h, int w, double fill = 0.0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * 3, fill)
    {
        if (h <= 0 || w <= 0)
            throw InvalidArgument("image dimensions must be positive");
    }

    std::size_t index(int y, int x, int c) const
    {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3 +
               static_cast<std::size_t>(c);
    }
    double& at(int y, int x, int c) { return data[index(y, x, c)]; }
    double at(int y, int x, int c) const { return data[index(y, x, c)]; }

    bool operator==(const Image&) const = default;
};

/// 8-bit RGB raster, the camera output and wire format carrier.
struct Image8 {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;

    Image8() = default;
    Image8(int h, int w, std::uint8_t fill = 0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * 3, fill)
    {
        if (h <= 0 || w <= 0)
            throw InvalidArgument("image dimensions must be positive");
    }

    std::size_t index(int y, int x, int c) const
    {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3 +
               static_cast<std::size_t>(c);
    }
    std::uint8_t& at(int y, int x, int c) { return data[index(y, x, c)]; }
    std::uint8_t at(int y, int x, int c) const { return data[index(y, x, c)]; }

    bool operator==(const Image8&) const = default;
};

/// Throws InvalidArgument unless the image satisfies its invariants.
inline void validate(const Image& img)
{
    if (img.height <= 0 || img.width <= 0)
        throw InvalidArgument("image dimensions must be positive");
    if (img.data.size() != static_cast<std::size_t>(img.height) * static_cast<std::size_t>(img.width) * 3)
        throw InvalidArgument("image data length does not match dimensions");
    for (double v : img.data)
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw InvalidArgument("image sample outside [0,1]");
}

inline void validate(const Image8& img)
{
    if (img.height <= 0 || img.width <= 0)
        throw InvalidArgument("image dimensions must be positive");
    if (img.data.size() != static_cast<std::size_t>(img.height) * static_cast<std::size_t>(img.width) * 3)
        throw InvalidArgument("image data length does not match dimensions");
}

/// round(v * 255), half away from zero.
inline std::uint8_t quantize_sample(double v)
{
    const double scaled = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
    return static_cast<std::uint8_t>(scaled);
}

inline double dequantize_sample(std::uint8_t b) { return static_cast<double>(b) / 255.0; }

inline Image8 quantize(const Image& img)
{
    Image8 out(img.height, img.width);
    std::transform(img.data.begin(), img.data.end(), out.data.begin(), quantize_sample);
    return out;
}

inline Image dequantize(const Image8& img)
{
    Image out(img.height, img.width);
    std::transform(img.data.begin(), img.data.end(), out.data.begin(), dequantize_sample);
    return out;
}

/// Box filter: each output pixel is the mean of its source block.
inline Image downsample_box(const Image& img, int out_h, int out_w)
{
    if (out_h <= 0 || out_w <= 0 || img.height % out_h != 0 || img.width % out_w != 0)
        throw NonDivisibleDimensions("cannot box-downsample " + std::to_string(img.height) + "x" +
                                     std::to_string(img.width) + " to " + std::to_string(out_h) + "x" +
                                     std::to_string(out_w));
    const int fy = img.height / out_h;
    const int fx = img.width / out_w;
    const double inv = 1.0 / static_cast<double>(fy * fx);
    Image out(out_h, out_w);
    for (int oy = 0; oy < out_h; ++oy)
        for (int ox = 0; ox < out_w; ++ox)
            for (int c = 0; c < 3; ++c) {
                double sum = 0.0;
                for (int y = oy * fy; y < (oy + 1) * fy; ++y)
                    for (int x = ox * fx; x < (ox + 1) * fx; ++x)
                        sum += img.at(y, x, c);
                out.at(oy, ox, c) = sum * inv;
            }
    return out;
}

// ---------------------------------------------------------------------------
// Binary PPM (P6, maxval 255)
// ---------------------------------------------------------------------------

inline std::vector<std::uint8_t> write_ppm(const Image8& img)
{
    validate(img);
    const std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out;
    out.reserve(header.size() + img.data.size());
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), img.data.begin(), img.data.end());
    return out;
}

namespace detail {

inline bool is_ppm_space(std::uint8_t ch) { return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\v' || ch == '\f'; }

// Skips whitespace and '#' comments, then parses a decimal token.
inline long read_header_int(std::span<const std::uint8_t> bytes, std::size_t& pos)
{
    while (pos < bytes.size()) {
        if (is_ppm_space(bytes[pos])) {
            ++pos;
        } else if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n')
                ++pos;
        } else {
            break;
        }
    }
    if (pos >= bytes.size() || bytes[pos] < '0' || bytes[pos] > '9')
        throw MalformedHeader("expected a decimal number in PPM header");
    long value = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
        value = value * 10 + (bytes[pos] - '0');
        if (value > 1'000'000)
            throw MalformedHeader("PPM header value too large");
        ++pos;
    }
    return value;
}

} // namespace detail

inline Image8 read_ppm(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6')
        throw MalformedHeader("not a binary PPM (missing P6 magic)");
    std::size_t pos = 2;
    if (pos >= bytes.size() || !detail::is_ppm_space(bytes[pos]))
        throw MalformedHeader("missing whitespace after magic");
    const long width = detail::read_header_int(bytes, pos);
    const long height = detail::read_header_int(bytes, pos);
    const long maxval = detail::read_header_int(bytes, pos);
    if (width <= 0 || height <= 0)
        throw MalformedHeader("PPM dimensions must be positive");
    if (maxval != 255)
        throw UnsupportedMaxval("PPM maxval " + std::to_string(maxval) + " is not supported (need 255)");
    if (pos >= bytes.size() || !detail::is_ppm_space(bytes[pos]))
        throw MalformedHeader("missing single whitespace after maxval");
    ++pos;

    Image8 img(static_cast<int>(height), static_cast<int>(width));
    if (bytes.size() - pos < img.data.size())
        throw TruncatedData("PPM pixel data truncated: expected " + std::to_string(img.data.size()) + " bytes, got " +
                            std::to_string(bytes.size() - pos));
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), img.data.size(), img.data.begin());
    return img;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error("write failed for " + path);
}

inline Image8 load_ppm(const std::string& path) { return read_ppm(read_file_bytes(path)); }

inline void save_ppm(const std::string& path, const Image8& img) { write_file_bytes(path, write_ppm(img)); }

} // namespace lightattack

#endif // LIGHTATTACK_IMAGING_HPP
