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

#ifndef PRT_ILLUM_H
#define PRT_ILLUM_H

#include <prt/envmap.h>
#include <prt/image.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace prt {

// Luminance of the occlusion-free shading of the front normal (0,0,1),
// divided by pi so a unit-radiance white environment scores 1.
double reference_brightness(const ShLight& light);

struct BrightnessRange {
    double low = 0.7;
    double high = 0.9;
    double reject_below = 0.2;
};

// nullopt when the light is too dark. Lights outside [low, high] are scaled
// uniformly to the midpoint; lights inside are returned unchanged.
std::optional<ShLight> normalize_brightness(const ShLight& light, const BrightnessRange& range = {});

// Factor normalize_brightness applies (1 when already in range), or nullopt
// on rejection.
std::optional<double> brightness_scale(const ShLight& light, const BrightnessRange& range = {});

// Luminance ratio of the shading of (0,0,-1) to that of (0,0,1); +inf when
// the front shading is not positive.
double back_light_ratio(const ShLight& light);

// max/min shading luminance over the 26 normals of a 3x3x3 grid; +inf when
// the minimum is not positive.
double shading_contrast(const ShLight& light);

struct LightProvenance {
    std::string source;
    double rotation_deg = 0.0;
};

struct LightSet {
    std::vector<ShLight> lights;
    std::vector<LightProvenance> provenance;  // parallel to `lights`
    std::vector<std::string> train;
    std::vector<std::string> test;
    nlohmann::json config = nlohmann::json::object();

    const ShLight* find(const std::string& id) const;
};

struct DedupOptions {
    int clusters = 50;
    std::uint64_t seed = 7;
    int max_iterations = 100;
    double max_back_light_ratio = 2.0;
    double max_contrast = 10.0;
    double test_fraction = 0.2;  // 10 of 50
};

// k-means++ over the 27 coefficients, keeps the member nearest each
// centroid, drops back-lit and high-contrast lights, then splits the
// survivors into train/test with a seeded shuffle.
LightSet dedup_and_filter(const std::vector<ShLight>& lights, const std::vector<LightProvenance>& provenance,
                          const DedupOptions& options = {});

struct KMeansResult {
    std::vector<std::vector<double>> centroids;
    std::vector<int> assignment;
    int iterations = 0;
};

KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed, int max_iterations);

struct EnvPrepOptions {
    int rotations = 35;
    double step_degrees = 10.0;
    BrightnessRange brightness;
    DedupOptions dedup;
};

// Full illumination pipeline over a set of panoramas (processed in sorted
// path order): project, reject dark maps, normalize brightness, add rotated
// copies, then dedup_and_filter.
LightSet prepare_lights(const std::vector<std::filesystem::path>& inputs, const EnvPrepOptions& options);

// Same pipeline on in-memory panoramas with caller-chosen source names.
LightSet prepare_lights(const std::vector<std::pair<std::string, EnvMap>>& inputs, const EnvPrepOptions& options);

nlohmann::json light_set_to_json(const LightSet& set);
LightSet light_set_from_json(const nlohmann::json& j);

// Deterministic serialization used for lights.json.
std::string dump_light_set(const LightSet& set);

}  // namespace prt

#endif  // PRT_ILLUM_H
