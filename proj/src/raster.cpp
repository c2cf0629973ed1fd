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

#include <prt/raster.h>

#include <prt/error.h>
#include <prt/parallel.h>

namespace prt {

Ray CameraFrame::pixel_ray(int px, int py) const {
    const double x = center_x + (px + 0.5 - width * 0.5) / scale;
    const double y = center_y - (py + 0.5 - height * 0.5) / scale;
    return Ray{{x, y, origin_z}, {0, 0, -1}};
}

CameraFrame frame_camera(const TriMesh& mesh, int size, double padding) {
    if (size <= 0) throw ArgumentError("image size must be positive");
    if (!(padding >= 0.0 && padding <= 0.45)) throw ArgumentError("padding must lie in [0, 0.45]");
    const Bounds3 b = mesh.bounds();
    const double h = b.empty() ? 0.0 : b.hi.y - b.lo.y;
    if (!(h > 0.0)) throw DataError("cannot frame a mesh with zero height");
    CameraFrame cam;
    cam.width = cam.height = size;
    cam.scale = (1.0 - 2.0 * padding) * size / h;
    cam.center_x = 0.5 * (b.lo.x + b.hi.x);
    cam.center_y = 0.5 * (b.lo.y + b.hi.y);
    cam.origin_z = b.hi.z + 0.01 * b.diagonal() + 1.0;
    return cam;
}

GBuffer rasterize_gbuffer(const Scene& scene, const CameraFrame& cam, unsigned threads) {
    const int w = cam.width, h = cam.height;
    GBuffer g{MapImage(w, h, 1, MapKind::Mask), MapImage(w, h, 3, MapKind::Normal),
              MapImage(w, h, 3, MapKind::Albedo), MapImage(w, h, 3, MapKind::Rgb)};
    const TriMesh& mesh = scene.mesh();
    parallel_for(std::size_t(h), threads, 4, [&](std::size_t y0, std::size_t y1) {
        for (int py = int(y0); py < int(y1); ++py) {
            for (int px = 0; px < w; ++px) {
                const Ray ray = cam.pixel_ray(px, py);
                const auto hit = scene.closest_hit(ray);
                if (!hit) continue;
                const auto& tri = mesh.triangles[hit->triangle];
                const double b0 = 1.0 - hit->b1 - hit->b2;
                const Vec3 pa = mesh.positions[tri[0]], pb = mesh.positions[tri[1]], pc = mesh.positions[tri[2]];
                const Vec3 geo = normalize(cross(pb - pa, pc - pa));
                Vec3 n = normalize(mesh.normals[tri[0]] * b0 + mesh.normals[tri[1]] * hit->b1 +
                                   mesh.normals[tri[2]] * hit->b2);
                if (length(n) < 0.5) n = geo;
                // Two-sided surfaces: a back face seen from the camera gets
                // its normals flipped toward the viewer.
                if (geo.z < 0.0) n = -n;
                const Vec3 p = ray.origin + ray.dir * hit->t;
                const Vec3 a = mesh.albedo(hit->triangle, hit->b1, hit->b2);
                const std::size_t i = std::size_t(py) * w + px;
                g.mask.data()[i] = 1.0f;
                auto np = g.normal.pixel(i);
                // Renormalize after the float conversion so the stored vector is unit.
                const float nx = float(n.x), ny = float(n.y), nz = float(n.z);
                const double len = std::sqrt(double(nx) * nx + double(ny) * ny + double(nz) * nz);
                np[0] = float(nx / len);
                np[1] = float(ny / len);
                np[2] = float(nz / len);
                auto ap = g.albedo.pixel(i);
                ap[0] = float(a.x);
                ap[1] = float(a.y);
                ap[2] = float(a.z);
                auto pp = g.position.pixel(i);
                pp[0] = float(p.x);
                pp[1] = float(p.y);
                pp[2] = float(p.z);
            }
        }
    });
    return g;
}

}  // namespace prt
