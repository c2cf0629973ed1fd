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

#include <prt/relight.h>

#include <prt/error.h>
#include <prt/map_io.h>
#include <prt/vec.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace prt {

namespace fs = std::filesystem;

namespace {

void require_mask(const MapImage& mask, const MapImage& map, std::string_view what) {
    require_same_size(map, mask, what);
    if (mask.channels() != 1) throw DataError(std::string(what) + ": mask needs 1 channel");
}

void require_transport(const MapImage& transport) {
    if (transport.channels() != 9) {
        throw DataError("transport map needs 9 channels, got " + std::to_string(transport.channels()));
    }
}

void require_color(const MapImage& map, std::string_view what) {
    if (map.channels() != 1 && map.channels() != 3) {
        throw DataError(std::string(what) + " needs 1 or 3 channels, got " + std::to_string(map.channels()));
    }
}

// Light as 3 rows of 9 floats-in-double for a tight inner loop.
std::array<std::array<double, 9>, 3> by_channel(const ShLight& light) {
    std::array<std::array<double, 9>, 3> out{};
    for (int i = 0; i < 9; ++i) {
        for (int c = 0; c < 3; ++c) out[c][i] = light.coeffs[i][c];
    }
    return out;
}

}  // namespace

MapImage shade_map(const MapImage& transport, const ShLight& light, const MapImage& mask) {
    require_transport(transport);
    require_mask(mask, transport, "shade_map");
    const auto l = by_channel(light);
    MapImage out(transport.width(), transport.height(), 3, MapKind::Shading);
    const float* t = transport.data().data();
    float* o = out.data().data();
    for (std::size_t p = 0, n = transport.pixel_count(); p < n; ++p, t += 9, o += 3) {
        if (!mask_on(mask, p)) continue;
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int i = 0; i < 9; ++i) s += double(t[i]) * l[c][i];
            o[c] = float(s);
        }
    }
    return out;
}

MapImage compose(const MapImage& albedo, const MapImage& shading, const MapImage& mask) {
    require_color(albedo, "compose albedo");
    require_color(shading, "compose shading");
    require_same_size(albedo, shading, "compose");
    require_mask(mask, albedo, "compose");
    MapImage out(albedo.width(), albedo.height(), 3, MapKind::Rgb);
    const int ca = albedo.channels(), cs = shading.channels();
    for (std::size_t p = 0, n = albedo.pixel_count(); p < n; ++p) {
        if (!mask_on(mask, p)) continue;
        const auto a = albedo.pixel(p);
        const auto s = shading.pixel(p);
        auto o = out.pixel(p);
        for (int c = 0; c < 3; ++c) o[c] = a[ca == 3 ? c : 0] * s[cs == 3 ? c : 0];
    }
    return out;
}

MapImage relight_image(const MapImage& albedo, const MapImage& transport, const ShLight& light,
                       const MapImage& mask) {
    require_transport(transport);
    require_color(albedo, "relight albedo");
    require_same_size(albedo, transport, "relight");
    require_mask(mask, albedo, "relight");
    const auto l = by_channel(light);
    MapImage out(albedo.width(), albedo.height(), 3, MapKind::Rgb);
    const int ca = albedo.channels();
    const float* t = transport.data().data();
    const float* a = albedo.data().data();
    float* o = out.data().data();
    for (std::size_t p = 0, n = albedo.pixel_count(); p < n; ++p, t += 9, a += ca, o += 3) {
        if (!mask_on(mask, p)) continue;
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int i = 0; i < 9; ++i) s += double(t[i]) * l[c][i];
            // Round the shading first so the result matches compose(shade_map(...)).
            o[c] = a[ca == 3 ? c : 0] * float(s);
        }
    }
    return out;
}

ImageEncoding encoding_for(const fs::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".pfm") return ImageEncoding::LinearPfm;
    if (ext == ".png") return ImageEncoding::SrgbPng;
    throw ArgumentError("unsupported image extension '" + ext + "' (use .pfm or .png)");
}

void write_image(const MapImage& image, const fs::path& path) {
    if (image.channels() != 3 && image.channels() != 1) throw DataError("write_image needs 1 or 3 channels");
    if (encoding_for(path) == ImageEncoding::LinearPfm) {
        write_map(image, path);
        return;
    }
    Image8 png{image.width(), image.height(), image.channels(), {}};
    png.pixels.resize(image.data().size());
    std::transform(image.data().begin(), image.data().end(), png.pixels.begin(),
                   [](float v) { return encode_srgb8(std::clamp(double(v), 0.0, 1.0)); });
    write_png8(png, path);
}

void relight(const fs::path& albedo, const fs::path& transport, const fs::path& mask, const ShLight& light,
             const fs::path& out) {
    encoding_for(out);
    const MapImage a = read_map(albedo, MapKind::Albedo);
    const MapImage t = read_map(transport, MapKind::Transport);
    const MapImage m = read_map(mask, MapKind::Mask);
    write_image(relight_image(a, t, light, m), out);
}

std::array<double, 81> sh_rotation_y(double degrees) {
    const double r = degrees * kPi / 180.0;
    const double c = std::cos(r), s = std::sin(r);
    const double k = std::sqrt(3.0);
    // m[i][j]: Y_i evaluated at the inversely rotated direction, expanded in Y_j.
    double m[9][9] = {};
    m[0][0] = 1.0;
    m[1][1] = 1.0;
    m[2][2] = c;
    m[2][3] = -s;
    m[3][3] = c;
    m[3][2] = s;
    m[4][4] = c;
    m[4][5] = s;
    m[5][4] = -s;
    m[5][5] = c;
    m[6][6] = c * c - 0.5 * s * s;
    m[6][7] = -k * s * c;
    m[6][8] = 0.5 * k * s * s;
    m[7][6] = k * c * s;
    m[7][7] = c * c - s * s;
    m[7][8] = -c * s;
    m[8][6] = 0.5 * k * s * s;
    m[8][7] = c * s;
    m[8][8] = 0.5 * (1.0 + c * c);
    std::array<double, 81> out{};
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) out[std::size_t(j * 9 + i)] = m[i][j];
    }
    return out;
}

ShLight rotate_light_y(const ShLight& light, double degrees) {
    const auto rot = sh_rotation_y(degrees);
    ShLight out;
    out.id = light.id;
    for (int i = 0; i < 9; ++i) {
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int j = 0; j < 9; ++j) s += rot[std::size_t(i * 9 + j)] * light.coeffs[j][c];
            out.coeffs[i][c] = s;
        }
    }
    return out;
}

std::vector<fs::path> sweep(const MapImage& albedo, const MapImage& transport, const MapImage& mask,
                            const ShLight& light, int frames, double step_degrees, const fs::path& out_dir,
                            const std::string& extension) {
    if (frames <= 0) throw ArgumentError("sweep needs at least one frame");
    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    for (int k = 0; k < frames; ++k) {
        char name[64];
        std::snprintf(name, sizeof(name), "frame_%03d%s", k, extension.c_str());
        const fs::path path = out_dir / name;
        write_image(relight_image(albedo, transport, rotate_light_y(light, k * step_degrees), mask), path);
        written.push_back(path);
    }
    return written;
}

void Decomposition::validate() const {
    require_transport(transport);
    require_color(albedo, "albedo");
    require_same_size(albedo, transport, "decomposition albedo/transport");
    require_mask(mask, albedo, "decomposition");
    if (!light.finite()) throw DataError("decomposition light has non-finite coefficients");
}

Decomposition load_decomposition(const fs::path& dir) {
    Decomposition d{read_map(dir / "albedo.mapb", MapKind::Albedo), read_map(dir / "transport.mapb", MapKind::Transport),
                    read_map(dir / "mask.png", MapKind::Mask), load_light_ref((dir / "light.json").string())};
    d.validate();
    return d;
}

std::pair<MapImage, MapImage> transfer_light(const Decomposition& a, const Decomposition& b) {
    a.validate();
    b.validate();
    return {relight_image(a.albedo, a.transport, b.light, a.mask), relight_image(b.albedo, b.transport, a.light, b.mask)};
}

}  // namespace prt
