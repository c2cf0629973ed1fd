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

#include <prt/baker.h>

#include <prt/error.h>
#include <prt/hash.h>
#include <prt/map_io.h>
#include <prt/parallel.h>
#include <prt/sampling.h>
#include <prt/sh.h>

#include <algorithm>

namespace prt {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view to_string(TransportMode mode) {
    switch (mode) {
        case TransportMode::Occlusion: return "occlusion";
        case TransportMode::Analytic: return "analytic";
        case TransportMode::AnalyticAO: return "analytic-ao";
    }
    return "occlusion";
}

TransportMode transport_mode_from_string(std::string_view name) {
    if (name == "occlusion") return TransportMode::Occlusion;
    if (name == "analytic") return TransportMode::Analytic;
    if (name == "analytic-ao") return TransportMode::AnalyticAO;
    throw ArgumentError("unknown transport mode '" + std::string(name) + "'");
}

PointTransport bake_point(const Scene& scene, const Vec3& position, const Vec3& normal, std::uint64_t samples,
                          std::uint64_t seed) {
    if (samples == 0) throw ArgumentError("bake needs at least one sample per pixel");
    ShVector9 acc{};
    double visible_cos = 0.0, total_cos = 0.0;
    Rng rng(seed);
    for_each_stratified_sphere(samples, rng, [&](const Vec3& w) {
        const double c = dot(normal, w);
        if (c <= 0.0) return;
        total_cos += c;
        if (scene.occluded(position, normal, w)) return;
        visible_cos += c;
        const sh::Basis y = sh::eval_basis_unchecked(w);
        for (int i = 0; i < sh::kCoeffCount; ++i) acc[i] += c * y[i];
    });
    PointTransport out;
    if (total_cos <= 0.0) return out;
    const double scale = kPi / total_cos;
    for (int i = 0; i < sh::kCoeffCount; ++i) out.transport[i] = acc[i] * scale;
    out.ao = visible_cos / total_cos;
    return out;
}

namespace {

void require_gbuffer(const GBuffer& g) {
    if (g.mask.empty() || g.normal.empty() || g.position.empty()) throw DataError("bake: missing gbuffer layers");
    require_same_size(g.mask, g.normal, "bake normal layer");
    require_same_size(g.mask, g.position, "bake position layer");
    if (g.mask.kind() != MapKind::Mask) throw DataError("bake: mask layer has wrong kind");
}

Vec3 read_vec3(std::span<const float> p) { return {p[0], p[1], p[2]}; }

}  // namespace

BakedMaps bake_joint(const Scene& scene, const GBuffer& g, const BakeConfig& config) {
    require_gbuffer(g);
    if (config.samples == 0) throw ArgumentError("bake needs at least one sample per pixel");
    const int w = g.mask.width(), h = g.mask.height();
    BakedMaps out{MapImage(w, h, 9, MapKind::Transport), MapImage(w, h, 1, MapKind::AO)};
    parallel_for(std::size_t(h), config.threads, 1, [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = y * std::size_t(w) + std::size_t(x);
                if (!mask_on(g.mask, i)) continue;
                const Vec3 n = normalize(read_vec3(g.normal.pixel(i)));
                const Vec3 p = read_vec3(g.position.pixel(i));
                const PointTransport pt =
                    bake_point(scene, p, n, config.samples, pixel_seed(config.seed, std::uint32_t(x), std::uint32_t(y)));
                auto tp = out.transport.pixel(i);
                for (int k = 0; k < 9; ++k) tp[k] = float(pt.transport[k]);
                out.ao.data()[i] = float(std::clamp(pt.ao, 0.0, 1.0));
            }
        }
    });
    return out;
}

MapImage bake_transport(const Scene& scene, const GBuffer& g, const BakeConfig& config) {
    return bake_joint(scene, g, config).transport;
}

MapImage bake_ao(const Scene& scene, const GBuffer& g, const BakeConfig& config) {
    return bake_joint(scene, g, config).ao;
}

MapImage transport_from_normals(const MapImage& normal, const MapImage& mask) {
    require_same_size(normal, mask, "transport_from_normals");
    if (normal.channels() != 3) throw DataError("transport_from_normals: normal map needs 3 channels");
    MapImage out(normal.width(), normal.height(), 9, MapKind::Transport);
    for (std::size_t i = 0; i < normal.pixel_count(); ++i) {
        if (!mask_on(mask, i)) continue;
        const Vec3 n = read_vec3(normal.pixel(i));
        if (std::abs(length(n) - 1.0) > 1e-3) {
            throw DataError("transport_from_normals: non-unit normal at pixel " + std::to_string(i));
        }
        const ShVector9 t = sh::analytic_transport_unchecked(normalize(n));
        auto tp = out.pixel(i);
        for (int k = 0; k < 9; ++k) tp[k] = float(t[k]);
    }
    return out;
}

MapImage apply_ao_to_transport(const MapImage& transport, const MapImage& ao) {
    require_same_size(transport, ao, "apply_ao_to_transport");
    if (ao.channels() != 1) throw DataError("apply_ao_to_transport: AO map needs 1 channel");
    MapImage out = transport;
    for (std::size_t i = 0; i < transport.pixel_count(); ++i) {
        const float a = ao.data()[i];
        for (float& v : out.pixel(i)) v *= a;
    }
    return out;
}

TriMesh load_mesh_source(const std::string& mesh_source) {
    constexpr std::string_view kBuiltin = "builtin:";
    if (mesh_source.starts_with(kBuiltin)) {
        auto mesh = shapes::builtin(mesh_source.substr(kBuiltin.size()));
        if (!mesh) throw DataError("unknown builtin mesh '" + mesh_source + "'");
        return *mesh;
    }
    return load_mesh(mesh_source);
}

DatasetRecord bake_all(const std::string& mesh_source, const DatasetOptions& options, const fs::path& out_dir) {
    return bake_all(load_mesh_source(mesh_source), mesh_source, options, out_dir);
}

DatasetRecord bake_all(const TriMesh& mesh, const std::string& mesh_label, const DatasetOptions& options,
                       const fs::path& out_dir) {
    const Scene scene(mesh, options.bake.epsilon_scale);
    const CameraFrame camera = frame_camera(scene.mesh(), options.size, options.padding);
    const GBuffer g = rasterize_gbuffer(scene, camera, options.bake.threads);
    const BakedMaps baked = bake_joint(scene, g, options.bake);

    MapImage transport = baked.transport;
    if (options.mode != TransportMode::Occlusion) {
        transport = transport_from_normals(g.normal, g.mask);
        if (options.mode == TransportMode::AnalyticAO) transport = apply_ao_to_transport(transport, baked.ao);
    }
    const MapImage albedo = apply_mask(g.albedo, g.mask);

    fs::create_directories(out_dir);
    const json files = {
        {"mask", "mask.png"},           {"albedo", "albedo.mapb"}, {"albedo_preview", "albedo.png"},
        {"normal", "normal.mapb"},      {"transport", "transport.mapb"}, {"ao", "ao.pfm"},
    };
    write_map(g.mask, out_dir / "mask.png");
    write_map(albedo, out_dir / "albedo.mapb");
    write_map(albedo, out_dir / "albedo.png");
    write_map(g.normal, out_dir / "normal.mapb");
    write_map(transport, out_dir / "transport.mapb");
    write_map(baked.ao, out_dir / "ao.pfm");

    json hashes = json::object();
    for (const auto& [key, name] : files.items()) hashes[key] = sha256_file(out_dir / name.get<std::string>());

    json manifest = {
        {"files", files},
        {"config",
         {{"mesh", mesh_label},
          {"triangles", scene.mesh().triangle_count()},
          {"size", options.size},
          {"padding", options.padding},
          {"samples", options.bake.samples},
          {"seed", options.bake.seed},
          {"epsilon_scale", options.bake.epsilon_scale},
          {"transport", to_string(options.mode)}}},
        {"hashes", hashes},
    };
    write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return DatasetRecord{out_dir, manifest};
}

}  // namespace prt
