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

#ifndef PRT_ENVMAP_H
#define PRT_ENVMAP_H

#include <prt/image.h>
#include <prt/vec.h>

#include <filesystem>
#include <functional>
#include <vector>

namespace prt {

/*
 * Equirectangular HDR panorama, linear RGB radiance, row 0 at the top.
 *
 * Pixel (i, j) is centered on polar angle theta = pi (j + 0.5) / H measured
 * from +y and azimuth phi = 2 pi (i + 0.5) / W, and looks along
 *
 *   d = (-sin(theta) sin(phi), cos(theta), sin(theta) cos(phi))
 *
 * so the middle column faces -z (the direction the camera looks) and +x is
 * to its right. Increasing the column index rotates about +y.
 */
class EnvMap {
public:
    EnvMap() = default;
    EnvMap(int width, int height, std::vector<float> rgb);
    EnvMap(int width, int height, float fill = 0.0f);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return width_ == 0 || height_ == 0; }

    std::span<const float> rgb() const { return rgb_; }
    std::span<float> rgb() { return rgb_; }
    Vec3 at(int i, int j) const;
    void set(int i, int j, const Vec3& radiance);

    Vec3 pixel_direction(int i, int j) const;
    double pixel_solid_angle(int j) const;

    // Bilinear radiance lookup (azimuth wraps, polar angle clamps).
    Vec3 lookup(const Vec3& direction) const;

    // Throws DataError unless every value is finite and nonnegative.
    void validate() const;

    // Panorama sampled from a radiance function at pixel centers.
    static EnvMap from_function(int width, int height, const std::function<Vec3(const Vec3&)>& radiance);

    bool operator==(const EnvMap&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> rgb_;
};

// Radiance RGBE (.hdr): flat and new-style RLE scanlines, "-Y H +X W" only.
EnvMap read_hdr(const std::filesystem::path& path);
void write_hdr(const EnvMap& env, const std::filesystem::path& path);

// .hdr or .pfm (1-channel PFMs are replicated to gray).
EnvMap load_env(const std::filesystem::path& path);

// Riemann-sum projection: L_i = sum radiance * Y_i * (2pi/W)(pi/H) sin(theta).
ShLight env_to_sh(const EnvMap& env, std::string id = {});

// Azimuthal rotation about +y by `degrees`: output column i takes input
// column i - shift. Exact column permutation when the shift is integral,
// linear interpolation between columns otherwise.
EnvMap rotate_env(const EnvMap& env, double degrees);

// `count` copies rotated by step, 2 step, ..., count * step; the original is
// not included.
std::vector<EnvMap> rotate_augment(const EnvMap& env, int count = 35, double step_degrees = 10.0);

// Smooth synthetic outdoor/studio panoramas (sky gradient plus broad light
// lobes), used by the demo and tests. variant is taken modulo 4.
EnvMap procedural_panorama(int variant, int width = 128, int height = 64);

}  // namespace prt

#endif  // PRT_ENVMAP_H
