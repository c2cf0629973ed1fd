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

#include <prt/error.h>
#include <prt/sampling.h>
#include <prt/sh.h>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.h"

namespace prt {
namespace {

std::vector<Vec3> random_directions(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<Vec3> out;
    while (int(out.size()) < count) {
        const Vec3 v(g(rng), g(rng), g(rng));
        if (length(v) > 1e-6) out.push_back(normalize(v));
    }
    return out;
}

TEST(ShBasis, MatchesLegendreDefinition) {
    for (const Vec3& d : random_directions(500, 1)) {
        const auto got = sh::eval_basis(d);
        const auto want = oracle::sh_from_definition(d);
        for (int i = 0; i < 9; ++i) EXPECT_NEAR(got[i], want[std::size_t(i)], 1e-12) << "i=" << i;
    }
}

TEST(ShBasis, TabulatedConstants) {
    const auto y = sh::eval_basis({0, 0, 1});
    EXPECT_NEAR(y[0], 0.282095, 1e-6);
    EXPECT_NEAR(y[2], 0.488603, 1e-6);
    EXPECT_NEAR(y[6], 0.315392 * 2.0, 1e-6);
    const double s = 1.0 / std::sqrt(2.0);
    const auto xy = sh::eval_basis({s, s, 0});
    EXPECT_NEAR(xy[4], 1.092548 * 0.5, 1e-6);
    EXPECT_NEAR(xy[8], 0.0, 1e-12);
    const auto x = sh::eval_basis({1, 0, 0});
    EXPECT_NEAR(x[3], 0.488603, 1e-6);
    EXPECT_NEAR(x[8], 0.546274, 1e-6);
}

TEST(ShBasis, RejectsNonUnitDirection) {
    EXPECT_THROW(sh::eval_basis({0, 0, 1.01}), ArgumentError);
    EXPECT_THROW(sh::eval_basis({0, 0, 0}), ArgumentError);
    EXPECT_NO_THROW(sh::eval_basis({0, 0, 1.0 + 0.5 * sh::kUnitTolerance}));
}

TEST(ShBasis, StratifiedGramIsIdentity) {
    std::array<double, 81> g{};
    const std::uint64_t n = 200000;
    Rng rng(3);
    for_each_stratified_sphere(n, rng, [&](const Vec3& d) {
        const auto y = sh::eval_basis_unchecked(d);
        for (int i = 0; i < 9; ++i) {
            for (int j = 0; j < 9; ++j) g[std::size_t(i * 9 + j)] += y[i] * y[j];
        }
    });
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            EXPECT_NEAR(g[std::size_t(i * 9 + j)] * 4.0 * kPi / double(n), i == j ? 1.0 : 0.0, 1e-2);
        }
    }
}

TEST(CosineLobe, MatchesQuadrature) {
    const auto lobe = sh::cosine_lobe();
    for (int l = 0; l < 3; ++l) EXPECT_NEAR(lobe[l], oracle::lobe_coefficient(l), 1e-9);
    EXPECT_NEAR(lobe[0], kPi, 1e-12);
    EXPECT_NEAR(lobe[1], 2.0 * kPi / 3.0, 1e-12);
    EXPECT_NEAR(lobe[2], kPi / 4.0, 1e-12);
}

TEST(AnalyticTransport, UpNormal) {
    const auto t = sh::analytic_transport({0, 0, 1});
    const double want[9] = {0.88623, 0, 1.02333, 0, 0, 0, 0.49541, 0, 0};
    for (int i = 0; i < 9; ++i) EXPECT_NEAR(t[i], want[i], 1e-5);
}

TEST(AnalyticTransport, ConstantLightGivesPi) {
    const ShLight white = sh::constant_light(1.0);
    EXPECT_NEAR(white.coeffs[0][0], 2.0 * std::sqrt(kPi), 1e-12);
    for (const Vec3& n : random_directions(100, 2)) {
        const auto rgb = sh::shade(sh::analytic_transport(n), white);
        for (double v : rgb) EXPECT_NEAR(v, kPi, 1e-6);
    }
}

TEST(AnalyticTransport, BandLimitedIrradianceIsExact) {
    // f(w) = 1 + 0.5 wz + 0.3 wx wy lies in bands 0..2, so the clamped-cosine
    // convolution through 9 coefficients is exact.
    auto f = [](const Vec3& w) { return 1.0 + 0.5 * w.z + 0.3 * w.x * w.y; };
    ShLight light;
    const auto c = sh::project_sphere_fn(f, 1 << 20, 5);
    for (int i = 0; i < 9; ++i) light.coeffs[i] = {c[i], c[i], c[i]};
    for (const Vec3& n : random_directions(10, 8)) {
        // Oracle: midpoint quadrature of f(w) max(n.w, 0) over the sphere.
        double e = 0.0;
        const int nt = 400, np = 800;
        for (int a = 0; a < nt; ++a) {
            const double th = kPi * (a + 0.5) / nt;
            for (int b = 0; b < np; ++b) {
                const double ph = 2.0 * kPi * (b + 0.5) / np;
                const Vec3 w(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
                e += f(w) * std::max(0.0, dot(n, w)) * std::sin(th);
            }
        }
        e *= (kPi / nt) * (2.0 * kPi / np);
        EXPECT_NEAR(sh::shade(sh::analytic_transport(n), light)[0], e, 2e-3);
    }
}

TEST(Projection, BasisFunctionsProjectToUnitVectors) {
    for (int k = 0; k < 9; ++k) {
        const auto c = sh::project_sphere_fn([k](const Vec3& d) { return sh::eval_basis_unchecked(d)[k]; }, 1 << 18, 1);
        for (int i = 0; i < 9; ++i) EXPECT_NEAR(c[i], i == k ? 1.0 : 0.0, 5e-3) << k << "," << i;
    }
}

TEST(Projection, BandNormsOfConstant) {
    const auto n = sh::band_norms(sh::analytic_transport({1, 0, 0}));
    EXPECT_NEAR(n[0], 0.886227, 1e-6);
    EXPECT_NEAR(n[1], 1.023327, 1e-6);
    EXPECT_GT(n[2], 0.0);
}

TEST(Sampling, StrataGridFactorsSampleCount) {
    for (std::uint64_t n : {1ull, 2ull, 7ull, 64ull, 128ull, 256ull, 512ull, 1000ull, 2048ull}) {
        const auto [nu, nv] = strata_grid(n);
        EXPECT_EQ(nu * nv, n);
        EXPECT_LE(nu, nv);
        EXPECT_LE(nu * nu, n);
    }
}

TEST(Sampling, StratifiedSequenceIsDeterministic) {
    std::vector<Vec3> a, b;
    Rng ra(11), rb(11);
    for_each_stratified_sphere(64, ra, [&](const Vec3& d) { a.push_back(d); });
    for_each_stratified_sphere(64, rb, [&](const Vec3& d) { b.push_back(d); });
    ASSERT_EQ(a.size(), 64u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].x, b[i].x);
        EXPECT_NEAR(length(a[i]), 1.0, 1e-12);
    }
}

TEST(Sampling, PixelSeedsAreDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint32_t y = 0; y < 64; ++y) {
        for (std::uint32_t x = 0; x < 64; ++x) seen.insert(pixel_seed(7, x, y));
    }
    EXPECT_EQ(seen.size(), 64u * 64u);
    EXPECT_NE(pixel_seed(7, 1, 0), pixel_seed(7, 0, 1));
    EXPECT_NE(pixel_seed(7, 0, 0), pixel_seed(8, 0, 0));
}

TEST(Sampling, TangentFrameIsOrthonormal) {
    for (const Vec3& n : random_directions(200, 4)) {
        Vec3 t, b;
        tangent_frame(n, t, b);
        EXPECT_NEAR(dot(t, n), 0.0, 1e-12);
        EXPECT_NEAR(dot(b, n), 0.0, 1e-12);
        EXPECT_NEAR(dot(t, b), 0.0, 1e-12);
        EXPECT_NEAR(length(t), 1.0, 1e-12);
    }
}

}  // namespace
}  // namespace prt
