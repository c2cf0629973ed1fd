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

#include "oracles.h"

#include <prt/vec.h>

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <unistd.h>

namespace prt::oracle {

namespace fs = std::filesystem;

double legendre(int l, double t) {
    switch (l) {
        case 0: return 1.0;
        case 1: return t;
        case 2: return 0.5 * (3.0 * t * t - 1.0);
    }
    return 0.0;
}

double lobe_coefficient(int band, int intervals) {
    if (intervals % 2) ++intervals;
    const double h = 1.0 / intervals;
    double s = 0.0;
    for (int k = 0; k <= intervals; ++k) {
        const double t = k * h;
        const double w = (k == 0 || k == intervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        s += w * t * legendre(band, t);
    }
    return 2.0 * kPi * s * h / 3.0;
}

std::array<double, 9> sh_from_definition(const Vec3& d) {
    const double theta = std::acos(std::clamp(d.z, -1.0, 1.0));
    const double phi = std::atan2(d.y, d.x);
    const double t = std::cos(theta), st = std::sin(theta);
    auto assoc = [&](int l, int m) {
        if (l == 0) return 1.0;
        if (l == 1) return m == 0 ? t : st;
        if (m == 0) return 0.5 * (3.0 * t * t - 1.0);
        if (m == 1) return 3.0 * t * st;
        return 3.0 * st * st;
    };
    auto fact = [](int n) {
        double f = 1.0;
        for (int k = 2; k <= n; ++k) f *= k;
        return f;
    };
    std::array<double, 9> out{};
    for (int l = 0; l <= 2; ++l) {
        for (int m = -l; m <= l; ++m) {
            const int am = std::abs(m);
            const double k = std::sqrt((2 * l + 1) / (4.0 * kPi) * fact(l - am) / fact(l + am));
            double v = k * assoc(l, am);
            if (m > 0) v *= std::sqrt(2.0) * std::cos(am * phi);
            if (m < 0) v *= std::sqrt(2.0) * std::sin(am * phi);
            out[std::size_t(l * (l + 1) + m)] = v;
        }
    }
    return out;
}

std::optional<double> brute_force_hit(const TriMesh& mesh, const Vec3& origin, const Vec3& dir, double tmin) {
    std::optional<double> best;
    for (const auto& tri : mesh.triangles) {
        const Vec3 a = mesh.positions[tri[0]], b = mesh.positions[tri[1]], c = mesh.positions[tri[2]];
        const Vec3 n = cross(b - a, c - a);
        const double denom = dot(n, dir);
        if (std::abs(denom) < 1e-14) continue;
        const double t = dot(n, a - origin) / denom;
        if (!(t > tmin)) continue;
        const Vec3 p = origin + dir * t;
        // Inside iff p is on the inner side of all three edges.
        const double e0 = dot(cross(b - a, p - a), n);
        const double e1 = dot(cross(c - b, p - b), n);
        const double e2 = dot(cross(a - c, p - c), n);
        if (e0 < 0 || e1 < 0 || e2 < 0) continue;
        if (!best || t < *best) best = t;
    }
    return best;
}

namespace {

// Orthonormal frame by Gram-Schmidt against the least aligned axis.
void frame(const Vec3& n, Vec3& t, Vec3& b) {
    const Vec3 axis = std::abs(n.x) < 0.6 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    t = normalize(axis - n * dot(axis, n));
    b = cross(n, t);
}

Vec3 cosine_direction(const Vec3& n, const Vec3& t, const Vec3& b, double u, double v) {
    const double r = std::sqrt(u), phi = 2.0 * kPi * v;
    const double z = std::sqrt(std::max(0.0, 1.0 - u));
    return normalize(t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + n * z);
}

}  // namespace

double cosine_visibility(const TriMesh& mesh, const Vec3& p, const Vec3& n, int grid, double offset) {
    Vec3 t, b;
    frame(n, t, b);
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int visible = 0;
    const Vec3 o = p + n * offset;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const Vec3 w = cosine_direction(n, t, b, (i + uni(rng)) / grid, (j + uni(rng)) / grid);
            if (!brute_force_hit(mesh, o, w, 0.0)) ++visible;
        }
    }
    return double(visible) / (double(grid) * grid);
}

std::vector<MapImage> reference_render(const Scene& scene, const GBuffer& g, const std::vector<EnvMap>& envs,
                                       int samples, std::uint64_t seed) {
    int nu = int(std::sqrt(double(samples)));
    while (samples % nu) --nu;
    const int nv = samples / nu;
    const int w = g.mask.width(), h = g.mask.height();
    std::vector<MapImage> out;
    for (std::size_t k = 0; k < envs.size(); ++k) out.emplace_back(w, h, 3, MapKind::Rgb);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (g.mask.at(x, y) < 0.5f) continue;
            const Vec3 n = normalize(Vec3(g.normal.at(x, y, 0), g.normal.at(x, y, 1), g.normal.at(x, y, 2)));
            const Vec3 p(g.position.at(x, y, 0), g.position.at(x, y, 1), g.position.at(x, y, 2));
            Vec3 t, b;
            frame(n, t, b);
            std::mt19937_64 rng(seed * 1000003u + std::uint64_t(y) * 4099u + std::uint64_t(x));
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            std::vector<Vec3> sum(envs.size());
            for (int i = 0; i < nu; ++i) {
                for (int j = 0; j < nv; ++j) {
                    const Vec3 d = cosine_direction(n, t, b, (i + uni(rng)) / nu, (j + uni(rng)) / nv);
                    if (scene.occluded(p, n, d)) continue;
                    for (std::size_t k = 0; k < envs.size(); ++k) sum[k] += envs[k].lookup(d);
                }
            }
            for (std::size_t k = 0; k < envs.size(); ++k) {
                const Vec3 e = sum[k] * (kPi / samples);
                for (int c = 0; c < 3; ++c) {
                    const double radiance = c == 0 ? e.x : (c == 1 ? e.y : e.z);
                    out[k].at(x, y, c) = float(radiance * g.albedo.at(x, y, c));
                }
            }
        }
    }
    return out;
}

std::array<double, 9> pinv_solve(const std::vector<std::array<double, 9>>& rows, const std::vector<double>& rhs) {
    Eigen::MatrixXd a(rows.size(), 9);
    Eigen::VectorXd b(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int c = 0; c < 9; ++c) a(Eigen::Index(r), c) = rows[r][std::size_t(c)];
        b(Eigen::Index(r)) = rhs[r];
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    cod.setThreshold(1e-10);
    const Eigen::VectorXd x = cod.solve(b);
    std::array<double, 9> out{};
    for (int c = 0; c < 9; ++c) out[std::size_t(c)] = x(c);
    return out;
}

std::array<std::array<double, 3>, 9> project_rotated(const EnvMap& env, double degrees) {
    const int w = env.width(), h = env.height();
    const double alpha = degrees * kPi / 180.0;
    std::array<std::array<double, 3>, 9> out{};
    for (int j = 0; j < h; ++j) {
        const double theta = kPi * (j + 0.5) / h;
        const double d_omega = (2.0 * kPi / w) * (kPi / h) * std::sin(theta);
        for (int i = 0; i < w; ++i) {
            const double phi = 2.0 * kPi * (i + 0.5) / w + alpha;
            const Vec3 d(-std::sin(theta) * std::sin(phi), std::cos(theta), std::sin(theta) * std::cos(phi));
            const auto y = sh_from_definition(d);
            const Vec3 e = env.at(i, j);
            for (int k = 0; k < 9; ++k) {
                out[std::size_t(k)][0] += e.x * y[std::size_t(k)] * d_omega;
                out[std::size_t(k)][1] += e.y * y[std::size_t(k)] * d_omega;
                out[std::size_t(k)][2] += e.z * y[std::size_t(k)] * d_omega;
            }
        }
    }
    return out;
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("prt_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

}  // namespace prt::oracle
