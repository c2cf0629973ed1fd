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

#ifndef PRT_METRICS_H
#define PRT_METRICS_H

#include <prt/image.h>

#include <array>
#include <filesystem>
#include <string_view>

#include <json.hpp>

namespace prt {

// Predicted and ground-truth factors of one image. All maps share a size.
struct DecompositionPair {
    MapImage pred_albedo;
    MapImage pred_transport;
    ShLight pred_light;
    MapImage albedo;
    MapImage transport;
    ShLight light;
    MapImage mask;
    MapImage image;

    void validate() const;
};

inline constexpr int kLossCount = 15;

// Names of the 15 losses, index 0 holding loss 1.
const std::array<std::string_view, kLossCount>& loss_names();

// Mean absolute errors over mask pixels and channels; the two TV terms are
// means over neighbor pairs with both pixels inside the mask.
std::array<double, kLossCount> losses15(const DecompositionPair& pair);

// Mean absolute difference over mask pixels and all channels.
double l1_masked(const MapImage& a, const MapImage& b, const MapImage& mask);

// Anisotropic forward-difference total variation, mean over valid pairs and
// channels. Zero when no pair lies inside the mask.
double tv_masked(const MapImage& map, const MapImage& mask);

// Throws DataError when the mask is empty.
double rmse_masked(const MapImage& a, const MapImage& b, const MapImage& mask);

// Channel-averaged SSIM over the mask bounding box (or the whole image when
// that box is smaller than the window).
double ssim_bbox(const MapImage& a, const MapImage& b, const MapImage& mask);

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double range = 1.0;
};

// Mean SSIM of one channel over the valid window positions of a region.
double ssim_region(const MapImage& a, const MapImage& b, int channel, int x0, int y0, int width, int height,
                   const SsimParams& params = {});

// The light shading an orthographic unit sphere (no occlusion), with its mask.
struct SphereRender {
    MapImage image;
    MapImage mask;
};
SphereRender render_light_sphere(const ShLight& light, int size = 256);

// RMSE over the 27 coefficients.
double light_rmse(const ShLight& a, const ShLight& b);

// Compares two directories of maps and writes a JSON report when `out` is
// not empty. Components missing on either side are reported as "N/A".
nlohmann::json evaluate(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                        const std::filesystem::path& out = {});

}  // namespace prt

#endif  // PRT_METRICS_H
