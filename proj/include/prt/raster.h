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

#ifndef PRT_RASTER_H
#define PRT_RASTER_H

#include <prt/bvh.h>
#include <prt/image.h>
#include <prt/mesh.h>

namespace prt {

inline constexpr int kDefaultImageSize = 1024;
inline constexpr double kDefaultPadding = 0.05;

// Orthographic camera looking down -z with +y up. Pixel (px, py), row 0 at
// the top, sees world point (x, y) with
//   x = center_x + (px + 0.5 - width / 2) / scale
//   y = center_y - (py + 0.5 - height / 2) / scale
struct CameraFrame {
    int width = kDefaultImageSize;
    int height = kDefaultImageSize;
    double scale = 1.0;  // pixels per world unit
    double center_x = 0.0;
    double center_y = 0.0;
    double origin_z = 1.0;  // primary rays start here

    Ray pixel_ray(int px, int py) const;
    // Continuous pixel coordinates (not centers) of a world point.
    double to_pixel_x(double world_x) const { return (world_x - center_x) * scale + width * 0.5; }
    double to_pixel_y(double world_y) const { return height * 0.5 - (world_y - center_y) * scale; }
};

// Square frame in which the mesh's vertical extent spans (1 - 2 padding) of
// the image height, horizontally centered on the bounding box.
CameraFrame frame_camera(const TriMesh& mesh, int size = kDefaultImageSize, double padding = kDefaultPadding);

struct GBuffer {
    MapImage mask;      // 1 channel, Mask
    MapImage normal;    // 3 channels, camera space, zero outside the mask
    MapImage albedo;    // 3 channels, linear RGB
    MapImage position;  // 3 channels, world-space hit points (Rgb kind)
};

// One primary ray per pixel center, front-most hit wins. Normals are
// interpolated, renormalized and flipped toward the viewer for back faces.
GBuffer rasterize_gbuffer(const Scene& scene, const CameraFrame& camera, unsigned threads = 0);

}  // namespace prt

#endif  // PRT_RASTER_H
