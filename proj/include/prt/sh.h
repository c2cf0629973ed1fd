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

#ifndef PRT_SH_H
#define PRT_SH_H

#include <prt/image.h>
#include <prt/vec.h>

#include <array>
#include <cstdint>
#include <functional>

namespace prt::sh {

/*
 * Real second-order spherical harmonics.
 *
 * Coefficients are indexed i = l(l+1)+m for l <= 2, and the basis is the
 * usual Cartesian polynomial form of a unit vector (x, y, z):
 *
 *   i=0  l=0        0.282095
 *   i=1  l=1 m=-1   0.488603 y
 *   i=2  l=1 m= 0   0.488603 z
 *   i=3  l=1 m= 1   0.488603 x
 *   i=4  l=2 m=-2   1.092548 xy
 *   i=5  l=2 m=-1   1.092548 yz
 *   i=6  l=2 m= 0   0.315392 (3z^2 - 1)
 *   i=7  l=2 m= 1   1.092548 xz
 *   i=8  l=2 m= 2   0.546274 (x^2 - y^2)
 *
 * The Condon-Shortley phase is folded into the constants (all positive).
 */

inline constexpr int kCoeffCount = 9;

constexpr int band_of(int i) { return i == 0 ? 0 : (i < 4 ? 1 : 2); }

using Basis = std::array<double, kCoeffCount>;

// Per-band scale applied to the basis to get the clamped-cosine convolution.
struct CosineLobe {
    std::array<double, 3> a_hat{};
    double operator[](int band) const { return a_hat[std::size_t(band)]; }
};

// Maximum deviation from unit length accepted by the checked entry points.
inline constexpr double kUnitTolerance = 1e-4;

// Basis values at `direction`. Throws ArgumentError when |direction| is not 1
// within kUnitTolerance.
Basis eval_basis(const Vec3& direction);

// Same polynomials without the length check; for hot loops whose directions
// are unit by construction.
inline Basis eval_basis_unchecked(const Vec3& d) {
    const double x = d.x, y = d.y, z = d.z;
    return {
        0.28209479177387814,
        0.4886025119029199 * y,
        0.4886025119029199 * z,
        0.4886025119029199 * x,
        1.0925484305920792 * x * y,
        1.0925484305920792 * y * z,
        0.31539156525252005 * (3.0 * z * z - 1.0),
        1.0925484305920792 * x * z,
        0.5462742152960396 * (x * x - y * y),
    };
}

// (pi, 2pi/3, pi/4).
CosineLobe cosine_lobe();

// Occlusion-free transport vector: basis at `normal` scaled per band by the
// cosine lobe. Throws ArgumentError for non-unit normals.
ShVector9 analytic_transport(const Vec3& normal);
ShVector9 analytic_transport_unchecked(const Vec3& normal);

// Per-channel dot product of a transport vector with the light columns.
std::array<double, 3> shade(const ShVector9& transport, const ShLight& light);

// Light with only the DC term set so that its radiance is `value` in every
// direction (coefficient 0 = 2 sqrt(pi) * value).
ShLight constant_light(double value = 1.0, std::string id = "constant");

using SphereFunction = std::function<double(const Vec3&)>;

// Monte Carlo projection onto the basis with stratified uniform sphere samples.
ShVector9 project_sphere_fn(const SphereFunction& f, std::uint64_t samples, std::uint64_t seed);

// Per-band L2 norms of a coefficient vector.
std::array<double, 3> band_norms(const ShVector9& coeffs);

}  // namespace prt::sh

#endif  // PRT_SH_H
