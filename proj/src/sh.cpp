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

#include <prt/sh.h>

#include <prt/error.h>
#include <prt/sampling.h>

#include <cmath>
#include <string>

namespace prt {

std::pair<std::uint64_t, std::uint64_t> strata_grid(std::uint64_t samples) {
    if (samples == 0) return {0, 0};
    std::uint64_t nu = std::uint64_t(std::sqrt(double(samples)));
    while (nu * nu > samples) --nu;
    while ((nu + 1) * (nu + 1) <= samples) ++nu;
    while (samples % nu != 0) --nu;
    return {nu, samples / nu};
}

namespace sh {

namespace {

void require_unit(const Vec3& d, const char* what) {
    const double len = length(d);
    if (!(std::abs(len - 1.0) <= kUnitTolerance)) {
        throw ArgumentError(std::string(what) + " must be a unit vector (length " + std::to_string(len) + ")");
    }
}

}  // namespace

Basis eval_basis(const Vec3& direction) {
    require_unit(direction, "SH direction");
    return eval_basis_unchecked(direction);
}

CosineLobe cosine_lobe() { return CosineLobe{{kPi, 2.0 * kPi / 3.0, kPi / 4.0}}; }

ShVector9 analytic_transport_unchecked(const Vec3& normal) {
    static const CosineLobe lobe = cosine_lobe();
    const Basis y = eval_basis_unchecked(normal);
    ShVector9 t;
    for (int i = 0; i < kCoeffCount; ++i) t[i] = lobe[band_of(i)] * y[i];
    return t;
}

ShVector9 analytic_transport(const Vec3& normal) {
    require_unit(normal, "normal");
    return analytic_transport_unchecked(normal);
}

std::array<double, 3> shade(const ShVector9& transport, const ShLight& light) {
    std::array<double, 3> out{};
    for (int i = 0; i < kCoeffCount; ++i) {
        for (int c = 0; c < 3; ++c) out[c] += transport[i] * light.coeffs[i][c];
    }
    return out;
}

ShLight constant_light(double value, std::string id) {
    ShLight light = ShLight::zero(std::move(id));
    const double c0 = 2.0 * std::sqrt(kPi) * value;
    light.coeffs[0] = {c0, c0, c0};
    return light;
}

ShVector9 project_sphere_fn(const SphereFunction& f, std::uint64_t samples, std::uint64_t seed) {
    if (samples == 0) throw ArgumentError("project_sphere_fn needs at least one sample");
    ShVector9 acc{};
    Rng rng(seed);
    for_each_stratified_sphere(samples, rng, [&](const Vec3& w) {
        const double v = f(w);
        if (v == 0.0) return;
        const Basis y = eval_basis_unchecked(w);
        for (int i = 0; i < kCoeffCount; ++i) acc[i] += v * y[i];
    });
    const double weight = 4.0 * kPi / double(samples);
    for (double& a : acc) a *= weight;
    return acc;
}

std::array<double, 3> band_norms(const ShVector9& c) {
    std::array<double, 3> n{};
    for (int i = 0; i < kCoeffCount; ++i) n[band_of(i)] += c[i] * c[i];
    for (double& v : n) v = std::sqrt(v);
    return n;
}

}  // namespace sh
}  // namespace prt
