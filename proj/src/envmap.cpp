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

#include <prt/envmap.h>

#include <prt/error.h>
#include <prt/map_io.h>
#include <prt/sh.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace prt {

namespace fs = std::filesystem;

EnvMap::EnvMap(int width, int height, std::vector<float> rgb)
    : width_(width), height_(height), rgb_(std::move(rgb)) {
    if (width < 0 || height < 0 || rgb_.size() != std::size_t(width) * std::size_t(height) * 3) {
        throw ArgumentError("environment map data does not match its dimensions");
    }
}

EnvMap::EnvMap(int width, int height, float fill)
    : EnvMap(width, height, std::vector<float>(std::size_t(width) * std::size_t(height) * 3, fill)) {}

Vec3 EnvMap::at(int i, int j) const {
    const std::size_t k = (std::size_t(j) * width_ + i) * 3;
    return {rgb_[k], rgb_[k + 1], rgb_[k + 2]};
}

void EnvMap::set(int i, int j, const Vec3& v) {
    const std::size_t k = (std::size_t(j) * width_ + i) * 3;
    rgb_[k] = float(v.x);
    rgb_[k + 1] = float(v.y);
    rgb_[k + 2] = float(v.z);
}

Vec3 EnvMap::pixel_direction(int i, int j) const {
    const double theta = kPi * (j + 0.5) / height_;
    const double phi = 2.0 * kPi * (i + 0.5) / width_;
    const double st = std::sin(theta);
    return {-st * std::sin(phi), std::cos(theta), st * std::cos(phi)};
}

double EnvMap::pixel_solid_angle(int j) const {
    const double theta = kPi * (j + 0.5) / height_;
    return (2.0 * kPi / width_) * (kPi / height_) * std::sin(theta);
}

Vec3 EnvMap::lookup(const Vec3& d) const {
    const double theta = std::acos(std::clamp(d.y, -1.0, 1.0));
    double phi = std::atan2(-d.x, d.z);
    if (phi < 0) phi += 2.0 * kPi;
    const double fx = phi / (2.0 * kPi) * width_ - 0.5;
    const double fy = std::clamp(theta / kPi * height_ - 0.5, 0.0, double(height_ - 1));
    const double x0 = std::floor(fx), y0 = std::floor(fy);
    const double tx = fx - x0, ty = fy - y0;
    const int i0 = ((int(x0) % width_) + width_) % width_;
    const int i1 = (i0 + 1) % width_;
    const int j0 = int(y0), j1 = std::min(j0 + 1, height_ - 1);
    return at(i0, j0) * ((1 - tx) * (1 - ty)) + at(i1, j0) * (tx * (1 - ty)) + at(i0, j1) * ((1 - tx) * ty) +
           at(i1, j1) * (tx * ty);
}

void EnvMap::validate() const {
    if (empty()) throw DataError("environment map is empty");
    for (float v : rgb_) {
        if (!std::isfinite(v) || v < 0.0f) throw DataError("environment radiance must be finite and nonnegative");
    }
}

EnvMap EnvMap::from_function(int width, int height, const std::function<Vec3(const Vec3&)>& radiance) {
    EnvMap env(width, height);
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) env.set(i, j, radiance(env.pixel_direction(i, j)));
    }
    return env;
}

namespace {

void rgbe_to_float(const std::uint8_t* rgbe, float* out) {
    if (rgbe[3] == 0) {
        out[0] = out[1] = out[2] = 0.0f;
        return;
    }
    const float f = std::ldexp(1.0f, int(rgbe[3]) - 136);
    for (int c = 0; c < 3; ++c) out[c] = float(rgbe[c]) * f;
}

void float_to_rgbe(const float* rgb, std::uint8_t* out) {
    const float v = std::max({rgb[0], rgb[1], rgb[2]});
    if (v < 1e-32f) {
        out[0] = out[1] = out[2] = out[3] = 0;
        return;
    }
    int e = 0;
    const float m = std::frexp(v, &e);
    const float scale = m * 256.0f / v;
    for (int c = 0; c < 3; ++c) out[c] = std::uint8_t(std::clamp(rgb[c] * scale, 0.0f, 255.0f));
    out[3] = std::uint8_t(e + 128);
}

}  // namespace

EnvMap read_hdr(const fs::path& path) {
    const auto bytes = read_file_bytes(path);
    std::size_t pos = 0;
    auto read_line = [&]() {
        const std::size_t start = pos;
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        if (pos >= bytes.size()) throw DataError("corrupt HDR header: " + path.string());
        std::string line(bytes.begin() + long(start), bytes.begin() + long(pos));
        ++pos;
        return line;
    };
    const std::string magic = read_line();
    if (!magic.starts_with("#?")) throw DataError("not a Radiance HDR file: " + path.string());
    for (;;) {
        const std::string line = read_line();
        if (line.empty()) break;
        if (line.starts_with("FORMAT=") && line != "FORMAT=32-bit_rle_rgbe") {
            throw DataError("unsupported HDR format " + line);
        }
    }
    std::istringstream res(read_line());
    std::string ya, xa;
    int height = 0, width = 0;
    if (!(res >> ya >> height >> xa >> width) || ya != "-Y" || xa != "+X" || width <= 0 || height <= 0) {
        throw DataError("unsupported HDR orientation or corrupt resolution line");
    }
    std::vector<float> rgb(std::size_t(width) * height * 3);
    std::vector<std::uint8_t> scan(std::size_t(width) * 4);
    auto need = [&](std::size_t n) {
        if (pos + n > bytes.size()) throw DataError("truncated HDR data: " + path.string());
    };
    for (int y = 0; y < height; ++y) {
        need(4);
        const bool rle = width >= 8 && width < 32768 && bytes[pos] == 2 && bytes[pos + 1] == 2 &&
                         (bytes[pos + 2] & 0x80) == 0;
        if (rle) {
            if (((int(bytes[pos + 2]) << 8) | bytes[pos + 3]) != width) throw DataError("HDR scanline width mismatch");
            pos += 4;
            for (int c = 0; c < 4; ++c) {
                int x = 0;
                while (x < width) {
                    need(1);
                    int count = bytes[pos++];
                    if (count > 128) {
                        count -= 128;
                        need(1);
                        const std::uint8_t v = bytes[pos++];
                        if (x + count > width) throw DataError("corrupt HDR run");
                        for (int k = 0; k < count; ++k) scan[std::size_t(x++) * 4 + c] = v;
                    } else {
                        if (count == 0 || x + count > width) throw DataError("corrupt HDR run");
                        need(std::size_t(count));
                        for (int k = 0; k < count; ++k) scan[std::size_t(x++) * 4 + c] = bytes[pos++];
                    }
                }
            }
        } else {
            need(std::size_t(width) * 4);
            std::memcpy(scan.data(), bytes.data() + pos, std::size_t(width) * 4);
            pos += std::size_t(width) * 4;
        }
        for (int x = 0; x < width; ++x) rgbe_to_float(&scan[std::size_t(x) * 4], &rgb[(std::size_t(y) * width + x) * 3]);
    }
    return EnvMap(width, height, std::move(rgb));
}

void write_hdr(const EnvMap& env, const fs::path& path) {
    std::string header = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " + std::to_string(env.height()) + " +X " +
                         std::to_string(env.width()) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const int w = env.width();
    std::vector<std::uint8_t> scan(std::size_t(w) * 4);
    for (int y = 0; y < env.height(); ++y) {
        for (int x = 0; x < w; ++x) float_to_rgbe(&env.rgb()[(std::size_t(y) * w + x) * 3], &scan[std::size_t(x) * 4]);
        if (w < 8 || w >= 32768) {
            out.insert(out.end(), scan.begin(), scan.end());
            continue;
        }
        out.insert(out.end(), {2, 2, std::uint8_t(w >> 8), std::uint8_t(w & 255)});
        for (int c = 0; c < 4; ++c) {
            int x = 0;
            while (x < w) {
                // Run of identical bytes?
                int run = 1;
                while (x + run < w && run < 127 && scan[std::size_t(x + run) * 4 + c] == scan[std::size_t(x) * 4 + c]) ++run;
                if (run >= 3) {
                    out.push_back(std::uint8_t(128 + run));
                    out.push_back(scan[std::size_t(x) * 4 + c]);
                    x += run;
                    continue;
                }
                // Literal block up to the next run of 3 or 128 bytes.
                int lit = 0;
                while (x + lit < w && lit < 128) {
                    const int k = x + lit;
                    if (k + 2 < w && scan[std::size_t(k) * 4 + c] == scan[std::size_t(k + 1) * 4 + c] &&
                        scan[std::size_t(k) * 4 + c] == scan[std::size_t(k + 2) * 4 + c]) {
                        break;
                    }
                    ++lit;
                }
                out.push_back(std::uint8_t(lit));
                for (int k = 0; k < lit; ++k) out.push_back(scan[std::size_t(x + k) * 4 + c]);
                x += lit;
            }
        }
    }
    write_file_bytes(path, out);
}

EnvMap load_env(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    EnvMap env;
    if (ext == ".hdr") {
        env = read_hdr(path);
    } else if (ext == ".pfm") {
        const MapImage map = read_map(path, MapKind::Shading);
        std::vector<float> rgb(map.pixel_count() * 3);
        for (std::size_t i = 0; i < map.pixel_count(); ++i) {
            for (int c = 0; c < 3; ++c) rgb[i * 3 + c] = map.pixel(i)[map.channels() == 3 ? c : 0];
        }
        env = EnvMap(map.width(), map.height(), std::move(rgb));
    } else {
        throw DataError("unsupported environment map format: " + path.string());
    }
    env.validate();
    return env;
}

ShLight env_to_sh(const EnvMap& env, std::string id) {
    if (env.empty()) throw DataError("env_to_sh: zero-size environment map");
    ShLight light = ShLight::zero(std::move(id));
    for (int j = 0; j < env.height(); ++j) {
        std::array<std::array<double, 3>, 9> row{};
        const double dw = env.pixel_solid_angle(j);
        for (int i = 0; i < env.width(); ++i) {
            const Vec3 r = env.at(i, j);
            if (r.x == 0 && r.y == 0 && r.z == 0) continue;
            const sh::Basis y = sh::eval_basis_unchecked(env.pixel_direction(i, j));
            for (int k = 0; k < 9; ++k) {
                row[k][0] += r.x * y[k];
                row[k][1] += r.y * y[k];
                row[k][2] += r.z * y[k];
            }
        }
        for (int k = 0; k < 9; ++k) {
            for (int c = 0; c < 3; ++c) light.coeffs[k][c] += row[k][c] * dw;
        }
    }
    return light;
}

EnvMap rotate_env(const EnvMap& env, double degrees) {
    const int w = env.width(), h = env.height();
    double shift = std::fmod(degrees / 360.0 * w, double(w));
    if (shift < 0) shift += w;
    EnvMap out(w, h);
    const double rounded = std::round(shift);
    if (std::abs(shift - rounded) < 1e-9) {
        const int s = int(rounded) % w;
        for (int j = 0; j < h; ++j) {
            for (int i = 0; i < w; ++i) out.set(i, j, env.at(((i - s) % w + w) % w, j));
        }
        return out;
    }
    const int s0 = int(std::floor(shift));
    const double t = shift - s0;
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            // Source position i - shift lies between columns i - s0 - 1 and i - s0.
            const int a = ((i - s0) % w + w) % w;
            const int b = ((i - s0 - 1) % w + w) % w;
            out.set(i, j, env.at(a, j) * (1.0 - t) + env.at(b, j) * t);
        }
    }
    return out;
}

std::vector<EnvMap> rotate_augment(const EnvMap& env, int count, double step_degrees) {
    std::vector<EnvMap> out;
    out.reserve(std::size_t(std::max(0, count)));
    for (int k = 1; k <= count; ++k) out.push_back(rotate_env(env, step_degrees * k));
    return out;
}

EnvMap procedural_panorama(int variant, int width, int height) {
    struct Lobe {
        Vec3 direction;
        Vec3 color;
        double sharpness;
    };
    struct Style {
        Vec3 zenith, horizon, ground;
        std::vector<Lobe> lobes;
    };
    static const Style styles[4] = {
        {{0.25, 0.35, 0.6}, {0.5, 0.55, 0.6}, {0.25, 0.22, 0.2}, {{{0.5, 0.6, 0.6}, {3.0, 2.7, 2.2}, 6.0}}},
        {{0.55, 0.55, 0.6}, {0.45, 0.45, 0.45}, {0.2, 0.2, 0.2}, {{{-0.5, 0.8, 0.3}, {1.2, 1.25, 1.3}, 3.0}}},
        {{0.2, 0.2, 0.35}, {0.6, 0.4, 0.3}, {0.15, 0.12, 0.1}, {{{-0.9, 0.15, 0.4}, {3.5, 2.0, 1.0}, 5.0}}},
        {{0.3, 0.3, 0.3},
         {0.3, 0.3, 0.3},
         {0.15, 0.15, 0.15},
         {{{0.6, 0.3, 0.75}, {2.5, 2.5, 2.5}, 8.0}, {{-0.8, 0.2, 0.55}, {0.8, 0.9, 1.1}, 4.0}}},
    };
    const Style& st = styles[((variant % 4) + 4) % 4];
    return EnvMap::from_function(width, height, [&](const Vec3& d) {
        Vec3 sky;
        if (d.y >= 0.0) {
            sky = st.horizon * (1.0 - d.y) + st.zenith * d.y;
        } else {
            const double t = std::min(1.0, -d.y * 4.0);
            sky = st.horizon * (1.0 - t) + st.ground * t;
        }
        for (const Lobe& l : st.lobes) sky += l.color * std::exp(l.sharpness * (dot(d, normalize(l.direction)) - 1.0));
        return sky;
    });
}

}  // namespace prt
