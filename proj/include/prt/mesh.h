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

#ifndef PRT_MESH_H
#define PRT_MESH_H

#include <prt/vec.h>

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace prt {

// Linear-RGB texture sampled bilinearly with wrap addressing; v = 0 is the
// bottom row, as in OBJ.
struct Texture {
    int width = 0;
    int height = 0;
    std::vector<float> rgb;

    Vec3 texel(int x, int y) const;
    Vec3 sample(double u, double v) const;
};

struct Material {
    std::string name;
    Vec3 kd{0.75, 0.75, 0.75};
    std::shared_ptr<const Texture> diffuse_map;
};

inline constexpr double kDefaultAlbedo = 0.75;

struct TriMesh {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;                 // per vertex, unit
    std::vector<std::array<double, 2>> uvs;    // per vertex, or empty
    std::vector<Vec3> colors;                  // per vertex linear RGB, or empty
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::vector<std::uint32_t> material_ids;   // per triangle, or empty
    std::vector<Material> materials;

    std::size_t triangle_count() const { return triangles.size(); }
    Bounds3 bounds() const;

    // Albedo at barycentrics (b1, b2) of triangle `tri`: texture, then vertex
    // colors, then material Kd, then constant 0.75 gray.
    Vec3 albedo(std::size_t tri, double b1, double b2) const;

    // Throws DataError on out-of-range indices, missing triangles or
    // non-unit normals.
    void validate() const;

    // Area-weighted vertex normals, shared across vertices at the same position index.
    void compute_normals();

    void append(const TriMesh& other);
};

// OBJ with optional MTL (Kd, map_Kd PNG) or "v x y z r g b" vertex colors
// (sRGB, decoded to linear). Polygons are fan-triangulated.
TriMesh load_mesh(const std::filesystem::path& path);

// Writes positions, normals and triangles as OBJ.
void save_obj(const TriMesh& mesh, const std::filesystem::path& path);

// Procedural geometry used by the demo, tests and benchmarks. All shapes are
// outward-facing and y-up.
namespace shapes {

TriMesh uv_sphere(const Vec3& center, double radius, int stacks, int slices);
TriMesh capsule(const Vec3& a, const Vec3& b, double radius, int rings, int slices);
TriMesh quad(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3, int subdivisions = 1);
TriMesh box(const Vec3& lo, const Vec3& hi, bool inward = false);

// Two perpendicular quads meeting along the y axis, both facing the +z
// viewer at 45 degrees: the planes x = z and x = -z, spanning
// |y| <= half_extent and running `arm` units from the crease.
TriMesh wedge(double arm, double half_extent, int subdivisions = 1);

// A standing figure built from overlapping capsules and a head sphere;
// `detail` scales tessellation (detail 1 ~ 3k triangles).
TriMesh figure(int detail = 1);

// Sphere resting in front of a wedge.
TriMesh sphere_and_wedge(int detail = 1);

// Named builtins: "sphere", "wedge", "figure", "sphere_wedge", "cube",
// optionally suffixed ":<detail>".
std::optional<TriMesh> builtin(const std::string& name);

}  // namespace shapes

}  // namespace prt

#endif  // PRT_MESH_H
