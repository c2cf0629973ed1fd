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
#include <prt/envmap.h>
#include <prt/error.h>
#include <prt/map_io.h>
#include <prt/relight.h>
#include <prt/sh.h>

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "oracles.h"

namespace prt {
namespace {

ShLight random_light(std::uint64_t seed, std::string id = "r") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ShLight l;
    l.id = std::move(id);
    for (auto& row : l.coeffs) {
        for (double& v : row) v = u(rng);
    }
    l.coeffs[0] = {3.0, 2.5, 2.0};
    return l;
}

MapImage sphere_normals(int size, MapImage& mask) {
    MapImage n(size, size, 3, MapKind::Normal);
    mask = MapImage(size, size, 1, MapKind::Mask);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double u = 2.0 * (x + 0.5) / size - 1.0, v = 1.0 - 2.0 * (y + 0.5) / size;
            if (u * u + v * v >= 1.0) continue;
            const Vec3 d = normalize(Vec3(u, v, std::sqrt(1.0 - u * u - v * v)));
            n.at(x, y, 0) = float(d.x);
            n.at(x, y, 1) = float(d.y);
            n.at(x, y, 2) = float(d.z);
            mask.at(x, y) = 1.0f;
        }
    }
    return n;
}

MapImage random_albedo(int size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.1f, 0.9f);
    MapImage a(size, size, 3, MapKind::Albedo);
    for (float& v : a.data()) v = u(rng);
    return a;
}

struct Synthetic {
    MapImage mask, normal, transport, albedo;
    explicit Synthetic(int size, std::uint64_t seed = 1) {
        normal = sphere_normals(size, mask);
        transport = transport_from_normals(normal, mask);
        albedo = apply_mask(random_albedo(size, seed), mask);
    }
};

TEST(RotateLight, IdentityAndPeriodicity) {
    const ShLight l = random_light(1);
    const ShLight r0 = rotate_light_y(l, 0.0), r360 = rotate_light_y(l, 360.0);
    for (int i = 0; i < 9; ++i) {
        for (int c = 0; c < 3; ++c) {
            EXPECT_NEAR(r0.coeffs[i][c], l.coeffs[i][c], 1e-7);
            EXPECT_NEAR(r360.coeffs[i][c], l.coeffs[i][c], 1e-7);
        }
    }
    EXPECT_EQ(r0.id, l.id);
}

TEST(RotateLight, OrthogonalBlocksPreserveBandNorms) {
    const ShLight l = random_light(2);
    for (double deg : {13.0, 90.0, 187.5, -45.0}) {
        const ShLight r = rotate_light_y(l, deg);
        for (int c = 0; c < 3; ++c) {
            ShVector9 a{}, b{};
            for (int i = 0; i < 9; ++i) {
                a[i] = l.coeffs[i][c];
                b[i] = r.coeffs[i][c];
            }
            const auto na = sh::band_norms(a), nb = sh::band_norms(b);
            for (int k = 0; k < 3; ++k) EXPECT_NEAR(na[k], nb[k], 1e-12);
        }
    }
    const auto m = sh_rotation_y(33.0);
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            double s = 0.0;
            for (int k = 0; k < 9; ++k) s += m[std::size_t(i * 9 + k)] * m[std::size_t(j * 9 + k)];
            EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-12);
            if (sh::band_of(i) != sh::band_of(j)) EXPECT_EQ(m[std::size_t(i * 9 + j)], 0.0);
        }
    }
}

TEST(RotateLight, Composition) {
    const ShLight l = random_light(3);
    const ShLight a = rotate_light_y(rotate_light_y(l, 25.0), 40.0), b = rotate_light_y(l, 65.0);
    for (int i = 0; i < 9; ++i) EXPECT_NEAR(a.coeffs[i][1], b.coeffs[i][1], 1e-12);
}

TEST(RotateLight, RotatesTheRadianceFunction) {
    // f'(d) = f(R^-1 d) with R turning +z toward +x by alpha about +y.
    const ShLight l = random_light(4);
    const double deg = 37.0, a = deg * kPi / 180.0;
    const ShLight r = rotate_light_y(l, deg);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int k = 0; k < 50; ++k) {
        const Vec3 d = normalize(Vec3(g(rng), g(rng), g(rng)));
        const Vec3 back(d.x * std::cos(a) + d.z * std::sin(a), d.y, -d.x * std::sin(a) + d.z * std::cos(a));
        const auto yd = oracle::sh_from_definition(d), yb = oracle::sh_from_definition(back);
        double fr = 0.0, f = 0.0;
        for (int i = 0; i < 9; ++i) {
            fr += r.coeffs[i][0] * yd[std::size_t(i)];
            f += l.coeffs[i][0] * yb[std::size_t(i)];
        }
        EXPECT_NEAR(fr, f, 1e-10);
    }
}

TEST(RotateLight, CommutesWithPanoramaRotation) {
    const EnvMap env = procedural_panorama(0, 144, 72);
    const ShLight base = env_to_sh(env);
    for (double deg : {10.0, 120.0, 350.0}) {
        const ShLight coeff_rot = rotate_light_y(base, deg);
        const ShLight pano_rot = env_to_sh(rotate_env(env, deg));
        const auto oracle_rot = oracle::project_rotated(env, deg);
        for (int i = 0; i < 9; ++i) {
            for (int c = 0; c < 3; ++c) {
                EXPECT_NEAR(coeff_rot.coeffs[i][c], pano_rot.coeffs[i][c], 1e-3) << deg << " " << i;
                EXPECT_NEAR(coeff_rot.coeffs[i][c], oracle_rot[i][c], 1e-3) << deg << " " << i;
            }
        }
    }
}

TEST(ShadeMap, ConstantLightOnFlatTransport) {
    MapImage mask(4, 3, 1, MapKind::Mask, 1.0f);
    mask.at(0, 0) = 0.0f;
    MapImage t(4, 3, 9, MapKind::Transport);
    const auto flat = sh::analytic_transport({0, 0, 1});
    for (std::size_t p = 0; p < t.pixel_count(); ++p) {
        for (int i = 0; i < 9; ++i) t.pixel(p)[i] = float(flat[i]);
    }
    const MapImage s = shade_map(t, sh::constant_light(1.0), mask);
    EXPECT_EQ(s.kind(), MapKind::Shading);
    EXPECT_EQ(s.at(0, 0, 0), 0.0f);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(s.at(2, 1, c), kPi, 1e-6);
    const MapImage dark = shade_map(t, ShLight::zero(), mask);
    for (float v : dark.data()) EXPECT_EQ(v, 0.0f);
    EXPECT_THROW(shade_map(t, sh::constant_light(), MapImage(4, 4, 1, MapKind::Mask)), DataError);
    EXPECT_THROW(shade_map(MapImage(4, 3, 3, MapKind::Albedo), sh::constant_light(), mask), DataError);
}

TEST(ShadeMap, AnalyticBaselineMatchesPointwiseShading) {
    const Synthetic s(32);
    const ShLight l = random_light(6);
    const MapImage shading = shade_map(s.transport, l, s.mask);
    for (int y = 0; y < 32; y += 3) {
        for (int x = 0; x < 32; x += 3) {
            if (s.mask.at(x, y) < 0.5f) continue;
            const Vec3 n(s.normal.at(x, y, 0), s.normal.at(x, y, 1), s.normal.at(x, y, 2));
            const auto want = sh::shade(sh::analytic_transport_unchecked(normalize(n)), l);
            for (int c = 0; c < 3; ++c) EXPECT_NEAR(shading.at(x, y, c), want[std::size_t(c)], 1e-5);
        }
    }
}

TEST(ShadeMap, Linearity) {
    const Synthetic s(24);
    const ShLight l1 = random_light(7), l2 = random_light(8);
    ShLight mix;
    for (int i = 0; i < 9; ++i) {
        for (int c = 0; c < 3; ++c) mix.coeffs[i][c] = 0.7 * l1.coeffs[i][c] - 1.3 * l2.coeffs[i][c];
    }
    const MapImage a = shade_map(s.transport, l1, s.mask), b = shade_map(s.transport, l2, s.mask);
    const MapImage m = shade_map(s.transport, mix, s.mask);
    for (std::size_t k = 0; k < m.data().size(); ++k) {
        EXPECT_NEAR(m.data()[k], 0.7 * a.data()[k] - 1.3 * b.data()[k], 1e-5);
    }
}

TEST(Compose, IdentityScalingAndSymmetry) {
    const Synthetic s(16);
    const MapImage shading = shade_map(s.transport, random_light(9), s.mask);
    const MapImage ones(16, 16, 3, MapKind::Albedo, 1.0f);
    const MapImage same = compose(ones, shading, s.mask);
    for (std::size_t k = 0; k < same.data().size(); ++k) EXPECT_EQ(same.data()[k], shading.data()[k]);
    const MapImage half = compose(MapImage(16, 16, 1, MapKind::AO, 0.5f), shading, s.mask);
    for (std::size_t k = 0; k < half.data().size(); ++k) EXPECT_EQ(half.data()[k], 0.5f * shading.data()[k]);
    EXPECT_EQ(compose(s.albedo, shading, s.mask), compose(shading, s.albedo, s.mask));
    EXPECT_EQ(relight_image(s.albedo, s.transport, random_light(9), s.mask), compose(s.albedo, shading, s.mask));
    EXPECT_THROW(compose(s.albedo, MapImage(8, 8, 3, MapKind::Shading), s.mask), DataError);
}

TEST(Relight, WritesPngAndPfm) {
    oracle::TempDir dir("relight");
    MapImage mask(2, 1, 1, MapKind::Mask, 1.0f);
    MapImage albedo(2, 1, 3, MapKind::Albedo, 1.0f);
    MapImage t(2, 1, 9, MapKind::Transport);
    t.at(0, 0, 0) = float(1.3 / (2.0 * std::sqrt(kPi)));  // shading 1.3 under the unit constant light
    t.at(1, 0, 0) = float(-0.2 / (2.0 * std::sqrt(kPi)));
    write_map(mask, dir / "mask.png");
    write_map(albedo, dir / "albedo.mapb");
    write_map(t, dir / "transport.mapb");
    relight(dir / "albedo.mapb", dir / "transport.mapb", dir / "mask.png", sh::constant_light(), dir / "out.png");
    const auto png = read_png8(dir / "out.png");
    EXPECT_EQ(png.pixels[0], 255);
    EXPECT_EQ(png.pixels[3], 0);
    relight(dir / "albedo.mapb", dir / "transport.mapb", dir / "mask.png", sh::constant_light(), dir / "out.pfm");
    const MapImage linear = read_map(dir / "out.pfm");
    EXPECT_NEAR(linear.at(0, 0, 0), 1.3f, 1e-6);
    EXPECT_NEAR(linear.at(1, 0, 0), -0.2f, 1e-6);  // negative values survive in float output
    EXPECT_THROW(relight(dir / "albedo.mapb", dir / "transport.mapb", dir / "mask.png", sh::constant_light(),
                         dir / "out.jpg"),
                 ArgumentError);
    write_map(MapImage(3, 1, 1, MapKind::Mask, 1.0f), dir / "mask3.png");
    EXPECT_THROW(relight(dir / "albedo.mapb", dir / "transport.mapb", dir / "mask3.png", sh::constant_light(),
                         dir / "bad.png"),
                 DataError);
}

TEST(Relight, SweepFramesArePeriodic) {
    oracle::TempDir dir("sweep");
    const Synthetic s(16);
    const ShLight l = random_light(10);
    const auto files = sweep(s.albedo, s.transport, s.mask, l, 36, 10.0, dir / "frames", ".pfm");
    ASSERT_EQ(files.size(), 36u);
    EXPECT_EQ(files.front().filename(), "frame_000.pfm");
    EXPECT_EQ(files.back().filename(), "frame_035.pfm");
    const MapImage f0 = read_map(files.front());
    const MapImage f36 = relight_image(s.albedo, s.transport, rotate_light_y(l, 360.0), s.mask);
    for (std::size_t k = 0; k < f0.data().size(); ++k) EXPECT_NEAR(f0.data()[k], f36.data()[k], 1e-5);
    EXPECT_NE(read_map(files[9]), f0);
    EXPECT_THROW(sweep(s.albedo, s.transport, s.mask, l, 0, 10.0, dir / "none"), ArgumentError);
}

TEST(Transfer, SwapsLights) {
    const Synthetic sa(16, 1), sb(16, 2);
    const Decomposition a{sa.albedo, sa.transport, sa.mask, random_light(11, "a")};
    const Decomposition b{sb.albedo, sb.transport, sb.mask, random_light(12, "b")};
    const auto [ab, ba] = transfer_light(a, b);
    EXPECT_EQ(ab, relight_image(sa.albedo, sa.transport, b.light, sa.mask));
    EXPECT_EQ(ba, relight_image(sb.albedo, sb.transport, a.light, sb.mask));
    // Same decomposition on both sides reproduces the original compositions.
    const auto [aa1, aa2] = transfer_light(a, a);
    EXPECT_EQ(aa1, relight_image(sa.albedo, sa.transport, a.light, sa.mask));
    EXPECT_EQ(aa2, aa1);
    // Swapping the swapped lights restores the original pairing.
    Decomposition a2 = a, b2 = b;
    std::swap(a2.light, b2.light);
    const auto [back_a, back_b] = transfer_light(a2, b2);
    EXPECT_EQ(back_a, relight_image(sa.albedo, sa.transport, a.light, sa.mask));
    EXPECT_EQ(back_b, relight_image(sb.albedo, sb.transport, b.light, sb.mask));
    // Ground-truth renders under exchanged lights.
    const MapImage gt = compose(sa.albedo, shade_map(sa.transport, b.light, sa.mask), sa.mask);
    for (std::size_t k = 0; k < gt.data().size(); ++k) EXPECT_NEAR(ab.data()[k], gt.data()[k], 1e-6);
    Decomposition broken = a;
    broken.mask = MapImage(8, 8, 1, MapKind::Mask);
    EXPECT_THROW(transfer_light(broken, b), DataError);
}

TEST(Transfer, LoadsDecompositionDirectories) {
    oracle::TempDir dir("transfer");
    DatasetOptions opt;
    opt.size = 24;
    opt.bake.samples = 16;
    bake_all("builtin:sphere", opt, dir / "a");
    write_light(random_light(13, "a"), dir / "a" / "light.json");
    const Decomposition d = load_decomposition(dir / "a");
    EXPECT_EQ(d.light.id, "a");
    EXPECT_EQ(d.albedo.width(), 24);
    EXPECT_THROW(load_decomposition(dir / "missing"), DataError);
}

TEST(Relight, MegapixelIsFast) {
    const int size = 1024;
    MapImage mask(size, size, 1, MapKind::Mask, 1.0f);
    MapImage t(size, size, 9, MapKind::Transport, 0.1f);
    MapImage a(size, size, 3, MapKind::Albedo, 0.5f);
    const ShLight l = random_light(14);
    relight_image(a, t, l, mask);
    const auto t0 = std::chrono::steady_clock::now();
    const MapImage out = relight_image(a, t, l, mask);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LT(secs, 1.0);
    EXPECT_EQ(out.width(), size);
}

}  // namespace
}  // namespace prt
