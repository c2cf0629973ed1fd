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

#ifndef PRT_SAMPLING_H
#define PRT_SAMPLING_H

#include <prt/vec.h>

#include <cstdint>
#include <random>
#include <utility>

namespace prt {

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seed for pixel (x, y) under a global seed. Independent of scheduling.
constexpr std::uint64_t pixel_seed(std::uint64_t seed, std::uint32_t x, std::uint32_t y) {
    return mix64(mix64(seed) ^ (std::uint64_t(x) << 32 | std::uint64_t(y)));
}

// 64-bit engine with a portable [0,1) mapping (std distributions are not
// specified bit-exactly across standard libraries).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
    std::uint64_t next() { return engine_(); }
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// Splits `samples` into a nu x nv grid with nu the largest divisor <= sqrt.
std::pair<std::uint64_t, std::uint64_t> strata_grid(std::uint64_t samples);

// Area-preserving map of [0,1)^2 onto the unit sphere: z = 1 - 2u, phi = 2 pi v.
inline Vec3 uniform_sphere(double u, double v) {
    const double z = 1.0 - 2.0 * u;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * kPi * v;
    return {r * std::cos(phi), r * std::sin(phi), z};
}

// Jittered-grid sphere directions. Calls f(direction) exactly `samples` times
// in a fixed order that depends only on `rng`'s seed.
template <typename F>
void for_each_stratified_sphere(std::uint64_t samples, Rng& rng, F&& f) {
    const auto [nu, nv] = strata_grid(samples);
    const double inv_u = 1.0 / double(nu), inv_v = 1.0 / double(nv);
    for (std::uint64_t i = 0; i < nu; ++i) {
        for (std::uint64_t j = 0; j < nv; ++j) {
            const double u = (double(i) + rng.uniform()) * inv_u;
            const double v = (double(j) + rng.uniform()) * inv_v;
            f(uniform_sphere(u, v));
        }
    }
}

// Orthonormal frame whose third axis is n (Duff et al. branchless basis).
inline void tangent_frame(const Vec3& n, Vec3& t, Vec3& b) {
    const double sign = std::copysign(1.0, n.z);
    const double a = -1.0 / (sign + n.z);
    const double c = n.x * n.y * a;
    t = {1.0 + sign * n.x * n.x * a, sign * c, -sign * n.x};
    b = {c, sign + n.y * n.y * a, -n.y};
}

}  // namespace prt

#endif  // PRT_SAMPLING_H
