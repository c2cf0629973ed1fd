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

#ifndef PRT_BVH_H
#define PRT_BVH_H

#include <prt/mesh.h>
#include <prt/vec.h>

#include <cstdint>
#include <optional>
#include <vector>

namespace prt {

struct Ray {
    Vec3 origin;
    Vec3 dir;
};

struct Hit {
    double t = 0;
    double b1 = 0, b2 = 0;  // barycentrics of vertices 1 and 2
    std::uint32_t triangle = 0;
};

// Precomputed triangle edges for Moller-Trumbore.
struct TriangleEdges {
    Vec3 v0, e1, e2;
};

// Ray/triangle test shared by the BVH and brute-force checks. Accepts hits
// with tmin < t < tmax.
std::optional<Hit> intersect_triangle(const TriangleEdges& tri, const Ray& ray, double tmin, double tmax);

// Binned-SAH bounding volume hierarchy over a mesh's triangles. Immutable
// after construction; queries are thread-safe.
class Bvh {
public:
    struct Node {
        Bounds3 bounds;
        std::uint32_t offset = 0;  // first primitive (leaf) or right child (interior)
        std::uint32_t count = 0;   // primitives in leaf, 0 for interior nodes
        std::uint8_t axis = 0;
    };

    explicit Bvh(const TriMesh& mesh, int max_leaf_size = 4);

    std::optional<Hit> closest_hit(const Ray& ray, double tmin = 0.0, double tmax = HUGE_VAL) const;
    bool any_hit(const Ray& ray, double tmin = 0.0, double tmax = HUGE_VAL) const;

    const std::vector<Node>& nodes() const { return nodes_; }
    // Triangle ids in leaf order.
    const std::vector<std::uint32_t>& primitive_order() const { return order_; }
    const std::vector<TriangleEdges>& triangles() const { return tris_; }

private:
    std::uint32_t build(std::uint32_t begin, std::uint32_t end, const std::vector<Bounds3>& boxes,
                        const std::vector<Vec3>& centroids, int max_leaf);

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
    std::vector<TriangleEdges> tris_;       // indexed by triangle id
    std::vector<TriangleEdges> leaf_tris_;  // in leaf order
};

// Mesh plus acceleration structure and the scale-aware shadow-ray offset.
class Scene {
public:
    static constexpr double kDefaultEpsilonScale = 1e-4;

    explicit Scene(TriMesh mesh, double epsilon_scale = kDefaultEpsilonScale);

    const TriMesh& mesh() const { return mesh_; }
    const Bvh& bvh() const { return bvh_; }
    const Bounds3& bounds() const { return bounds_; }
    double epsilon() const { return epsilon_; }

    // True iff the ray from origin + epsilon * normal along `direction` hits
    // any triangle at t > 0.
    bool occluded(const Vec3& origin, const Vec3& normal, const Vec3& direction) const;

    std::optional<Hit> closest_hit(const Ray& ray) const { return bvh_.closest_hit(ray); }

private:
    TriMesh mesh_;
    Bvh bvh_;
    Bounds3 bounds_;
    double epsilon_;
};

}  // namespace prt

#endif  // PRT_BVH_H
