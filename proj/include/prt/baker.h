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

#ifndef PRT_BAKER_H
#define PRT_BAKER_H

#include <prt/bvh.h>
#include <prt/image.h>
#include <prt/raster.h>

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace prt {

// Which transport map bake_all writes.
enum class TransportMode {
    Occlusion,   // visibility-aware Monte Carlo transport
    Analytic,    // occlusion-free transport from normals
    AnalyticAO,  // occlusion-free transport scaled by AO
};

std::string_view to_string(TransportMode mode);
TransportMode transport_mode_from_string(std::string_view name);

struct BakeConfig {
    std::uint64_t samples = 256;
    std::uint64_t seed = 7;
    double epsilon_scale = Scene::kDefaultEpsilonScale;
    unsigned threads = 0;  // 0 = all cores; never affects results
};

// Transport vector and AO at one surface point, both from the same sample set.
struct PointTransport {
    ShVector9 transport{};
    double ao = 0.0;
};

/*
 * Visibility-weighted clamped-cosine projection at a surface point.
 *
 * With stratified uniform sphere directions w_k and c_k = max(n.w_k, 0):
 *
 *   T_i = pi * sum_k V(w_k) c_k Y_i(w_k) / sum_k c_k
 *   AO  =      sum_k V(w_k) c_k          / sum_k c_k
 *
 * The denominator is the sample estimate of the cosine integral (pi), so an
 * unoccluded point has band-0 irradiance exactly pi and AO exactly 1, and
 * dot(T, constant light) equals pi * AO for every point.
 */
PointTransport bake_point(const Scene& scene, const Vec3& position, const Vec3& normal, std::uint64_t samples,
                          std::uint64_t seed);

struct BakedMaps {
    MapImage transport;  // 9 channels
    MapImage ao;         // 1 channel
};

// Transport and AO for every mask pixel; pixel (x, y) uses
// pixel_seed(config.seed, x, y). Out-of-mask pixels are zero.
BakedMaps bake_joint(const Scene& scene, const GBuffer& gbuffer, const BakeConfig& config);
MapImage bake_transport(const Scene& scene, const GBuffer& gbuffer, const BakeConfig& config);
MapImage bake_ao(const Scene& scene, const GBuffer& gbuffer, const BakeConfig& config);

// Occlusion-free baseline: per-pixel analytic transport of the normal map.
MapImage transport_from_normals(const MapImage& normal, const MapImage& mask);

// Scales all nine coefficients of each pixel by its AO value.
MapImage apply_ao_to_transport(const MapImage& transport, const MapImage& ao);

struct DatasetOptions {
    BakeConfig bake;
    int size = kDefaultImageSize;
    double padding = kDefaultPadding;
    TransportMode mode = TransportMode::Occlusion;
};

struct DatasetRecord {
    std::filesystem::path directory;
    nlohmann::json manifest;
};

// Renders and bakes a mesh into `out_dir`: mask.png, albedo.mapb (+ albedo.png
// preview), normal.mapb, transport.mapb, ao.pfm and manifest.json.
// `mesh_source` is an OBJ path or "builtin:<name>".
DatasetRecord bake_all(const std::string& mesh_source, const DatasetOptions& options,
                       const std::filesystem::path& out_dir);

DatasetRecord bake_all(const TriMesh& mesh, const std::string& mesh_label, const DatasetOptions& options,
                       const std::filesystem::path& out_dir);

// Loads an OBJ path or a "builtin:<name>" procedural mesh.
TriMesh load_mesh_source(const std::string& mesh_source);

}  // namespace prt

#endif  // PRT_BAKER_H
