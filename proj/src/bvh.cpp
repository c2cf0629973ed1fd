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

#include <prt/bvh.h>

#include <prt/error.h>

#include <algorithm>
#include <array>
#include <limits>

namespace prt {

std::optional<Hit> intersect_triangle(const TriangleEdges& tri, const Ray& ray, double tmin, double tmax) {
    const Vec3 p = cross(ray.dir, tri.e2);
    const double det = dot(tri.e1, p);
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = ray.origin - tri.v0;
    const double b1 = dot(s, p) * inv;
    if (b1 < 0.0 || b1 > 1.0) return std::nullopt;
    const Vec3 q = cross(s, tri.e1);
    const double b2 = dot(ray.dir, q) * inv;
    if (b2 < 0.0 || b1 + b2 > 1.0) return std::nullopt;
    const double t = dot(tri.e2, q) * inv;
    if (!(t > tmin && t < tmax)) return std::nullopt;
    return Hit{t, b1, b2, 0};
}

namespace {

constexpr int kBins = 16;

double surface_area(const Bounds3& b) {
    if (b.empty()) return 0.0;
    const Vec3 e = b.extent();
    return 2.0 * (e.x * e.y + e.y * e.z + e.z * e.x);
}

// Pads a box by a relative epsilon so the slab test never rejects a hit
// that the triangle test accepts.
Bounds3 padded(const Bounds3& b) {
    const double pad = 1e-9 * (b.diagonal() + 1.0);
    Bounds3 out = b;
    out.lo = out.lo - Vec3{pad, pad, pad};
    out.hi = out.hi + Vec3{pad, pad, pad};
    return out;
}

struct RayPrecomp {
    Vec3 inv;
    std::array<int, 3> neg;
};

RayPrecomp precompute(const Ray& ray) {
    RayPrecomp r;
    r.inv = {1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z};
    r.neg = {ray.dir.x < 0, ray.dir.y < 0, ray.dir.z < 0};
    return r;
}

bool slab(const Bounds3& b, const Ray& ray, const RayPrecomp& rp, double tmin, double tmax) {
    for (int a = 0; a < 3; ++a) {
        const double lo = b.lo[a], hi = b.hi[a];
        double t0 = (lo - ray.origin[a]) * rp.inv[a];
        double t1 = (hi - ray.origin[a]) * rp.inv[a];
        if (rp.neg[a]) std::swap(t0, t1);
        // NaN (0 * inf) happens only when the origin lies on the slab plane
        // and the direction is parallel to it; treat it as inside.
        if (t0 == t0) tmin = std::max(tmin, t0);
        if (t1 == t1) tmax = std::min(tmax, t1);
        if (tmin > tmax) return false;
    }
    return true;
}

}  // namespace

Bvh::Bvh(const TriMesh& mesh, int max_leaf_size) {
    const std::size_t n = mesh.triangles.size();
    if (n == 0) throw DataError("cannot build a BVH without triangles");
    tris_.resize(n);
    std::vector<Bounds3> boxes(n);
    std::vector<Vec3> centroids(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& t = mesh.triangles[i];
        const Vec3 &a = mesh.positions[t[0]], &b = mesh.positions[t[1]], &c = mesh.positions[t[2]];
        tris_[i] = {a, b - a, c - a};
        boxes[i].extend(a);
        boxes[i].extend(b);
        boxes[i].extend(c);
        centroids[i] = (a + b + c) / 3.0;
    }
    order_.resize(n);
    for (std::size_t i = 0; i < n; ++i) order_[i] = std::uint32_t(i);
    nodes_.reserve(2 * n / std::size_t(std::max(1, max_leaf_size)) + 1);
    build(0, std::uint32_t(n), boxes, centroids, std::max(1, max_leaf_size));
    leaf_tris_.resize(n);
    for (std::size_t i = 0; i < n; ++i) leaf_tris_[i] = tris_[order_[i]];
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end, const std::vector<Bounds3>& boxes,
                         const std::vector<Vec3>& centroids, int max_leaf) {
    const auto node_index = std::uint32_t(nodes_.size());
    nodes_.emplace_back();
    Bounds3 bounds, cbounds;
    for (std::uint32_t i = begin; i < end; ++i) {
        bounds.extend(boxes[order_[i]]);
        cbounds.extend(centroids[order_[i]]);
    }
    nodes_[node_index].bounds = padded(bounds);
    const std::uint32_t count = end - begin;
    auto make_leaf = [&]() {
        nodes_[node_index].offset = begin;
        nodes_[node_index].count = count;
        return node_index;
    };
    if (count <= std::uint32_t(max_leaf)) return make_leaf();

    const int axis = cbounds.longest_axis();
    const double lo = cbounds.lo[axis], hi = cbounds.hi[axis];
    std::uint32_t mid = begin;
    if (hi - lo <= 0.0) {
        mid = begin + count / 2;  // coincident centroids: split by count
    } else {
        std::array<Bounds3, kBins> bin_bounds;
        std::array<std::uint32_t, kBins> bin_count{};
        auto bin_of = [&](std::uint32_t prim) {
            const int b = int(kBins * (centroids[prim][axis] - lo) / (hi - lo));
            return std::clamp(b, 0, kBins - 1);
        };
        for (std::uint32_t i = begin; i < end; ++i) {
            const int b = bin_of(order_[i]);
            ++bin_count[b];
            bin_bounds[b].extend(boxes[order_[i]]);
        }
        std::array<double, kBins - 1> cost{};
        Bounds3 left;
        std::uint32_t left_count = 0;
        for (int s = 0; s < kBins - 1; ++s) {
            left.extend(bin_bounds[s]);
            left_count += bin_count[s];
            cost[s] = surface_area(left) * left_count;
        }
        Bounds3 right;
        std::uint32_t right_count = 0;
        for (int s = kBins - 1; s > 0; --s) {
            right.extend(bin_bounds[s]);
            right_count += bin_count[s];
            cost[s - 1] += surface_area(right) * right_count;
        }
        const int best = int(std::min_element(cost.begin(), cost.end()) - cost.begin());
        const double leaf_cost = surface_area(bounds) * count;
        if (count <= 16u && cost[best] >= leaf_cost) return make_leaf();
        auto it = std::partition(order_.begin() + begin, order_.begin() + end,
                                 [&](std::uint32_t prim) { return bin_of(prim) <= best; });
        mid = std::uint32_t(it - order_.begin());
        if (mid == begin || mid == end) {
            mid = begin + count / 2;
            std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                             [&](std::uint32_t a, std::uint32_t b) { return centroids[a][axis] < centroids[b][axis]; });
        }
    }
    build(begin, mid, boxes, centroids, max_leaf);
    const std::uint32_t right = build(mid, end, boxes, centroids, max_leaf);
    nodes_[node_index].offset = right;
    nodes_[node_index].count = 0;
    nodes_[node_index].axis = std::uint8_t(axis);
    return node_index;
}

std::optional<Hit> Bvh::closest_hit(const Ray& ray, double tmin, double tmax) const {
    const RayPrecomp rp = precompute(ray);
    std::optional<Hit> best;
    std::uint32_t stack[128];
    int sp = 0;
    std::uint32_t node = 0;
    for (;;) {
        const Node& nd = nodes_[node];
        if (slab(nd.bounds, ray, rp, tmin, tmax)) {
            if (nd.count > 0) {
                for (std::uint32_t i = nd.offset; i < nd.offset + nd.count; ++i) {
                    if (auto h = intersect_triangle(leaf_tris_[i], ray, tmin, tmax)) {
                        tmax = h->t;
                        h->triangle = order_[i];
                        best = h;
                    }
                }
            } else {
                // Visit the child on the ray's near side first.
                if (rp.neg[nd.axis]) {
                    stack[sp++] = node + 1;
                    node = nd.offset;
                } else {
                    stack[sp++] = nd.offset;
                    node = node + 1;
                }
                continue;
            }
        }
        if (sp == 0) break;
        node = stack[--sp];
    }
    return best;
}

bool Bvh::any_hit(const Ray& ray, double tmin, double tmax) const {
    const RayPrecomp rp = precompute(ray);
    std::uint32_t stack[128];
    int sp = 0;
    std::uint32_t node = 0;
    for (;;) {
        const Node& nd = nodes_[node];
        if (slab(nd.bounds, ray, rp, tmin, tmax)) {
            if (nd.count > 0) {
                for (std::uint32_t i = nd.offset; i < nd.offset + nd.count; ++i) {
                    if (intersect_triangle(leaf_tris_[i], ray, tmin, tmax)) return true;
                }
            } else {
                stack[sp++] = nd.offset;
                node = node + 1;
                continue;
            }
        }
        if (sp == 0) break;
        node = stack[--sp];
    }
    return false;
}

Scene::Scene(TriMesh mesh, double epsilon_scale)
    : mesh_((mesh.validate(), std::move(mesh))),
      bvh_(mesh_),
      bounds_(mesh_.bounds()),
      epsilon_(epsilon_scale * bounds_.diagonal()) {}

bool Scene::occluded(const Vec3& origin, const Vec3& normal, const Vec3& direction) const {
    return bvh_.any_hit(Ray{origin + normal * epsilon_, direction}, 0.0, HUGE_VAL);
}

}  // namespace prt
