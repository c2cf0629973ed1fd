/*
 * Copyright (C) 2026 The prtkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PRT_RELIGHT_H
#define PRT_RELIGHT_H

#include <prt/image.h>

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace prt {

// Per-pixel T . L for each color channel. Zero outside the mask, unclamped.
MapImage shade_map(const MapImage& transport, const ShLight& light, const MapImage& mask);

// Element-wise albedo * shading under the mask. Either argument may have 1 or
// 3 channels; the result always has 3.
MapImage compose(const MapImage& albedo, const MapImage& shading, const MapImage& mask);

// compose(albedo, shade_map(transport, light, mask), mask) in one pass.
MapImage relight_image(const MapImage& albedo, const MapImage& transport, const ShLight& light,
                       const MapImage& mask);

enum class ImageEncoding { LinearPfm, SrgbPng };

// Picks the encoding from the extension (.pfm or .png).
ImageEncoding encoding_for(const std::filesystem::path& path);

// Writes an RGB image. PNG output clamps to [0,1] and applies the sRGB curve.
void write_image(const MapImage& image, const std::filesystem::path& path);

void relight(const std::filesystem::path& albedo, const std::filesystem::path& transport,
             const std::filesystem::path& mask, const ShLight& light, const std::filesystem::path& out);

// Rotation of the light about +y by `degrees`, applied to each color column.
ShLight rotate_light_y(const ShLight& light, double degrees);

// The 9x9 matrix R with L'_i = sum_j R(i, j) L_j, row-major.
std::array<double, 81> sh_rotation_y(double degrees);

// frames images with the light rotated by k * step, k = 0 .. frames-1,
// written as frame_000.<ext> ... Returns the written paths.
std::vector<std::filesystem::path> sweep(const MapImage& albedo, const MapImage& transport, const MapImage& mask,
                                         const ShLight& light, int frames, double step_degrees,
                                         const std::filesystem::path& out_dir, const std::string& extension = ".png");

struct Decomposition {
    MapImage albedo;
    MapImage transport;
    MapImage mask;
    ShLight light;

    // Throws DataError when the maps disagree in size or kind.
    void validate() const;
};

// Reads albedo.mapb, transport.mapb, mask.png and light.json from a directory.
Decomposition load_decomposition(const std::filesystem::path& dir);

// (A under B's light, B under A's light).
std::pair<MapImage, MapImage> transfer_light(const Decomposition& a, const Decomposition& b);

}  // namespace prt

#endif  // PRT_RELIGHT_H
