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
#include <prt/error.h>
#include <prt/map_io.h>
#include <prt/metrics.h>
#include <prt/relight.h>
#include <prt/sh.h>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.h"

namespace prt {
namespace {

namespace fs = std::filesystem;

MapImage random_map(int w, int h, int channels, MapKind kind, std::uint64_t seed, float lo = 0.0f, float hi = 1.0f) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(lo, hi);
    MapImage m(w, h, channels, kind);
    for (float& v : m.data()) v = u(rng);
    return m;
}

MapImage disk_mask(int size) {
    MapImage m(size, size, 1, MapKind::Mask);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double u = 2.0 * (x + 0.5) / size - 1.0, v = 2.0 * (y + 0.5) / size - 1.0;
            if (u * u + v * v < 0.8) m.at(x, y) = 1.0f;
        }
    }
    return m;
}

ShLight random_light(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    ShLight l;
    for (auto& row : l.coeffs) {
        for (double& v : row) v = u(rng);
    }
    l.coeffs[0] = {1.5, 1.4, 1.2};
    return l;
}

DecompositionPair ground_truth_pair(int size) {
    DecompositionPair d;
    d.mask = disk_mask(size);
    d.albedo = random_map(size, size, 3, MapKind::Albedo, 1, 0.2f, 0.8f);
    d.transport = random_map(size, size, 9, MapKind::Transport, 2, -0.3f, 0.6f);
    d.light = random_light(3);
    d.image = compose(d.albedo, shade_map(d.transport, d.light, d.mask), d.mask);
    d.pred_albedo = d.albedo;
    d.pred_transport = d.transport;
    d.pred_light = d.light;
    return d;
}

TEST(Losses, NamesAreStable) {
    EXPECT_EQ(loss_names().size(), 15u);
    EXPECT_EQ(loss_names()[0], "albedo");
    EXPECT_EQ(loss_names()[4], "tv_albedo");
    EXPECT_EQ(loss_names()[5], "tv_transport");
}

TEST(Losses, PerfectPredictionVanishes) {
    const DecompositionPair d = ground_truth_pair(24);
    const auto l = losses15(d);
    for (int i = 0; i < 15; ++i) {
        if (i == 4 || i == 5) continue;
        EXPECT_NEAR(l[std::size_t(i)], 0.0, 1e-7) << "loss " << i + 1;
    }
    EXPECT_EQ(l[4], tv_masked(d.albedo, d.mask));
    EXPECT_EQ(l[5], tv_masked(d.transport, d.mask));
    EXPECT_GT(l[4], 0.0);
}

TEST(Losses, UniformOffsetInsideMask) {
    DecompositionPair d = ground_truth_pair(24);
    for (std::size_t p = 0; p < d.mask.pixel_count(); ++p) {
        for (int c = 0; c < 3; ++c) {
            d.pred_albedo.pixel(p)[c] = mask_on(d.mask, p) ? d.albedo.pixel(p)[c] + 0.1f : 7.0f;
        }
    }
    const auto l = losses15(d);
    EXPECT_NEAR(l[0], 0.1, 1e-6);
    EXPECT_NEAR(rmse_masked(d.pred_albedo, d.albedo, d.mask), 0.1, 1e-6);
    // Constant predicted albedo has no gradient.
    d.pred_albedo = MapImage(24, 24, 3, MapKind::Albedo, 0.4f);
    EXPECT_EQ(losses15(d)[4], 0.0);
}

TEST(Losses, NonnegativeAndIgnoreOutsideMask) {
    DecompositionPair d = ground_truth_pair(20);
    d.pred_albedo = random_map(20, 20, 3, MapKind::Albedo, 4);
    d.pred_transport = random_map(20, 20, 9, MapKind::Transport, 5, -0.3f, 0.6f);
    d.pred_light = random_light(6);
    const auto base = losses15(d);
    for (double v : base) EXPECT_GE(v, 0.0);
    for (std::size_t p = 0; p < d.mask.pixel_count(); ++p) {
        if (mask_on(d.mask, p)) continue;
        for (int c = 0; c < 3; ++c) {
            d.pred_albedo.pixel(p)[c] = 100.0f;
            d.albedo.pixel(p)[c] = -5.0f;
            d.image.pixel(p)[c] = 3.0f;
        }
        for (int c = 0; c < 9; ++c) d.pred_transport.pixel(p)[c] = 42.0f;
    }
    const auto moved = losses15(d);
    for (int i = 0; i < 15; ++i) EXPECT_EQ(moved[std::size_t(i)], base[std::size_t(i)]) << "loss " << i + 1;
}

TEST(Losses, DifferenceLossesAreSymmetric) {
    DecompositionPair d = ground_truth_pair(20);
    d.pred_albedo = random_map(20, 20, 3, MapKind::Albedo, 7);
    d.pred_transport = random_map(20, 20, 9, MapKind::Transport, 8, -0.3f, 0.6f);
    d.pred_light = random_light(9);
    DecompositionPair s = d;
    std::swap(s.pred_albedo, s.albedo);
    std::swap(s.pred_transport, s.transport);
    std::swap(s.pred_light, s.light);
    const auto a = losses15(d), b = losses15(s);
    for (int i : {0, 1, 2}) EXPECT_NEAR(a[std::size_t(i)], b[std::size_t(i)], 1e-12) << "loss " << i + 1;
    EXPECT_NE(a[3], b[3]);  // reconstruction against the fixed image
    // Loss 7 isolates the transport error under one light; it is symmetric
    // when both sides share that light.
    d.pred_light = d.light;
    s = d;
    std::swap(s.pred_transport, s.transport);
    EXPECT_NEAR(losses15(d)[6], losses15(s)[6], 1e-7);
}

TEST(Losses, RejectMismatchedMaps) {
    DecompositionPair d = ground_truth_pair(16);
    d.pred_albedo = MapImage(8, 8, 3, MapKind::Albedo);
    EXPECT_THROW(losses15(d), DataError);
}

TEST(Rmse, MaskExclusivity) {
    const MapImage mask = disk_mask(16);
    const MapImage a = random_map(16, 16, 3, MapKind::Rgb, 10);
    MapImage b = a;
    EXPECT_EQ(rmse_masked(a, b, mask), 0.0);
    for (std::size_t p = 0; p < mask.pixel_count(); ++p) {
        for (int c = 0; c < 3; ++c) b.pixel(p)[c] += mask_on(mask, p) ? 0.0f : 9.0f;
    }
    EXPECT_EQ(rmse_masked(a, b, mask), 0.0);
    EXPECT_THROW(rmse_masked(a, b, MapImage(16, 16, 1, MapKind::Mask)), DataError);
    EXPECT_THROW(rmse_masked(a, MapImage(4, 4, 3, MapKind::Rgb), mask), DataError);
}

TEST(Ssim, SelfSimilarity) {
    const MapImage mask = disk_mask(40);
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const MapImage a = random_map(40, 40, 3, MapKind::Rgb, seed, -2.0f, 5.0f);
        EXPECT_NEAR(ssim_bbox(a, a, mask), 1.0, 1e-12);
    }
    const MapImage t = random_map(40, 40, 9, MapKind::Transport, 14);
    EXPECT_NEAR(ssim_bbox(t, t, mask), 1.0, 1e-12);
}

TEST(Ssim, ConstantImagesClosedForm) {
    const MapImage mask = disk_mask(32);
    const double c1 = 0.01 * 0.01;
    for (double a : {0.0, 0.3, 0.7}) {
        const double b = a + 0.1;
        const MapImage ia(32, 32, 3, MapKind::Rgb, float(a)), ib(32, 32, 3, MapKind::Rgb, float(b));
        const double fa = float(a), fb = float(b);
        const double want = (2 * fa * fb + c1) / (fa * fa + fb * fb + c1);
        EXPECT_NEAR(ssim_bbox(ia, ib, mask), want, 1e-9);
        EXPECT_LT(ssim_bbox(ia, ib, mask), 1.0);
    }
}

TEST(Ssim, InvertedImageIsDissimilar) {
    const MapImage mask = disk_mask(32);
    const MapImage a = random_map(32, 32, 3, MapKind::Rgb, 15);
    MapImage b = a;
    for (float& v : b.data()) v = 1.0f - v;
    EXPECT_LT(ssim_bbox(a, b, mask), 0.5);
}

TEST(Ssim, SmallBoxFallsBackToWholeImage) {
    MapImage mask(24, 24, 1, MapKind::Mask);
    mask.at(5, 5) = 1.0f;
    const MapImage a = random_map(24, 24, 1, MapKind::Shading, 16);
    MapImage b = a;
    b.at(20, 20) += 0.5f;  // outside the 1-pixel box but inside the image
    double whole = 0.0;
    whole = ssim_region(a, b, 0, 0, 0, 24, 24);
    EXPECT_NEAR(ssim_bbox(a, b, mask), whole, 1e-12);
    EXPECT_LT(whole, 1.0);
}

TEST(LightSphere, RendersShading) {
    const SphereRender r = render_light_sphere(sh::constant_light(), 64);
    EXPECT_EQ(r.image.width(), 64);
    const std::size_t centre = std::size_t(32 * 64 + 32);
    ASSERT_TRUE(mask_on(r.mask, centre));
    EXPECT_NEAR(r.image.pixel(centre)[0], kPi, 1e-5);
    EXPECT_EQ(r.image.at(0, 0, 0), 0.0f);
    EXPECT_EQ(light_rmse(random_light(1), random_light(1)), 0.0);
    ShLight off = random_light(1);
    for (auto& row : off.coeffs) row[1] += 0.1;
    EXPECT_NEAR(light_rmse(off, random_light(1)), 0.1 / std::sqrt(3.0), 1e-12);
}

class EvaluateDirs : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new oracle::TempDir("evaluate");
        DatasetOptions opt;
        opt.size = 48;
        opt.bake.samples = 64;
        bake_all("builtin:sphere_wedge", opt, *dir_ / "gt");
        opt.mode = TransportMode::Analytic;
        bake_all("builtin:sphere_wedge", opt, *dir_ / "baseline");
        const ShLight light = random_light(20);
        write_light(light, *dir_ / "gt" / "light.json");
        write_light(light, *dir_ / "baseline" / "light.json");
    }
    static void TearDownTestSuite() {
        delete dir_;
        dir_ = nullptr;
    }
    static fs::path path(const std::string& name) { return *dir_ / name; }
    static oracle::TempDir* dir_;
};

oracle::TempDir* EvaluateDirs::dir_ = nullptr;

TEST_F(EvaluateDirs, SelfComparisonIsPerfect) {
    const auto report = evaluate(path("gt"), path("gt"), path("self.json"));
    ASSERT_TRUE(fs::exists(path("self.json")));
    for (const char* name : {"albedo", "transport", "normal", "ao", "shading", "light"}) {
        const auto& c = report["components"][name];
        ASSERT_TRUE(c.is_object()) << name;
        EXPECT_EQ(c["rmse"].get<double>(), 0.0) << name;
        EXPECT_NEAR(c["ssim"].get<double>(), 1.0, 1e-12) << name;
    }
    ASSERT_TRUE(report["losses"].is_array());
    EXPECT_EQ(report["losses"].size(), 15u);
    EXPECT_EQ(report["losses"][0]["index"], 1);
    EXPECT_NEAR(report["losses"][3]["value"].get<double>(), 0.0, 1e-7);
}

TEST_F(EvaluateDirs, MissingComponentIsNotAvailable) {
    fs::copy(path("gt"), path("no_ao"), fs::copy_options::recursive);
    fs::remove(path("no_ao") / "ao.pfm");
    fs::remove(path("no_ao") / "light.json");
    const auto report = evaluate(path("no_ao"), path("gt"));
    EXPECT_EQ(report["components"]["ao"], "N/A");
    EXPECT_EQ(report["components"]["light"], "N/A");
    EXPECT_EQ(report["losses"], "N/A");
    EXPECT_TRUE(report["components"]["albedo"].is_object());
}

TEST_F(EvaluateDirs, OcclusionFreeBaselineDiffersOnConcaveScene) {
    const auto report = evaluate(path("baseline"), path("gt"));
    EXPECT_GT(report["components"]["shading"]["rmse"].get<double>(), 0.0);
    EXPECT_GT(report["components"]["transport"]["rmse"].get<double>(), 0.0);
    EXPECT_EQ(report["components"]["albedo"]["rmse"].get<double>(), 0.0);
    EXPECT_GT(report["loss_sum"].get<double>(), 0.0);
    EXPECT_THROW(evaluate(path("nowhere"), path("gt")), DataError);
}

}  // namespace
}  // namespace prt
