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

#include <prt/map_io.h>

#include <prt/error.h>

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace prt {

namespace fs = std::filesystem;
using json = nlohmann::json;

double srgb_to_linear(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
    return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

std::uint8_t encode_srgb8(double linear) {
    const double v = std::clamp(std::isfinite(linear) ? linear : 0.0, 0.0, 1.0);
    return std::uint8_t(std::lround(linear_to_srgb(v) * 255.0));
}

namespace {

std::uint8_t encode_linear8(double v) {
    return std::uint8_t(std::lround(std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0) * 255.0));
}

std::string lower_ext(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return ext;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

void put_f32(std::vector<std::uint8_t>& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }

std::vector<std::uint8_t> encode_pfm(const MapImage& map) {
    if (map.channels() != 1 && map.channels() != 3) {
        throw DataError("PFM supports 1 or 3 channels, map has " + std::to_string(map.channels()));
    }
    std::string header = std::string(map.channels() == 3 ? "PF" : "Pf") + "\n" + std::to_string(map.width()) +
                         " " + std::to_string(map.height()) + "\n-1.0\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + map.data().size() * 4);
    for (int y = map.height() - 1; y >= 0; --y) {
        for (int x = 0; x < map.width(); ++x) {
            for (int c = 0; c < map.channels(); ++c) put_f32(out, map.at(x, y, c));
        }
    }
    return out;
}

MapImage decode_pfm(const std::vector<std::uint8_t>& bytes, MapKind kind) {
    // Header: three whitespace-separated tokens, then a single whitespace byte.
    std::size_t pos = 0;
    auto token = [&]() {
        while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
        std::size_t start = pos;
        while (pos < bytes.size() && !std::isspace(bytes[pos])) ++pos;
        if (start == pos) throw DataError("corrupt PFM header");
        return std::string(bytes.begin() + long(start), bytes.begin() + long(pos));
    };
    const std::string magic = token();
    int channels = 0;
    if (magic == "PF") channels = 3;
    else if (magic == "Pf") channels = 1;
    else throw DataError("corrupt PFM header: bad magic");
    int width = 0, height = 0;
    double scale = 0;
    try {
        width = std::stoi(token());
        height = std::stoi(token());
        scale = std::stod(token());
    } catch (const std::logic_error&) {
        throw DataError("corrupt PFM header");
    }
    if (width <= 0 || height <= 0 || scale == 0.0) throw DataError("corrupt PFM header");
    ++pos;  // single whitespace after the scale
    const std::size_t count = std::size_t(width) * std::size_t(height) * std::size_t(channels);
    if (bytes.size() < pos + count * 4) throw DataError("truncated PFM data");
    const bool little = scale < 0;
    std::vector<float> data(count);
    const std::uint8_t* src = bytes.data() + pos;
    for (int row = 0; row < height; ++row) {
        const int y = height - 1 - row;
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < channels; ++c) {
                std::uint8_t b[4];
                std::memcpy(b, src, 4);
                if (!little) std::reverse(b, b + 4);
                data[(std::size_t(y) * width + x) * channels + c] = get_f32(b);
                src += 4;
            }
        }
    }
    if (kind == MapKind::Mask || kind == MapKind::AO) {
        if (channels != 1) throw DataError("channel count inconsistent with kind " + std::string(to_string(kind)));
    }
    return MapImage(width, height, channels, kind, std::move(data));
}

MapImage decode_png(const fs::path& path, MapKind kind) {
    const Image8 img = read_png8(path);
    const std::size_t n = std::size_t(img.width) * img.height;
    auto sample = [&](std::size_t i, int c) {
        // Gray (+alpha) replicates the gray channel; alpha is ignored.
        const int src_c = img.channels >= 3 ? c : 0;
        return double(img.pixels[i * img.channels + src_c]) / 255.0;
    };
    if (kind == MapKind::Mask || kind == MapKind::AO) {
        std::vector<float> data(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = sample(i, 0);
            data[i] = kind == MapKind::Mask ? (v >= 0.5 ? 1.0f : 0.0f) : float(v);
        }
        return MapImage(img.width, img.height, 1, kind, std::move(data));
    }
    if (kind == MapKind::Transport) throw DataError("PNG cannot hold a transport map");
    const bool srgb = kind == MapKind::Albedo || kind == MapKind::Rgb || kind == MapKind::Shading;
    std::vector<float> data(n * 3);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) {
            const double v = sample(i, c);
            // Normal PNGs store (n + 1) / 2.
            data[i * 3 + c] = float(srgb ? srgb_to_linear(v) : v * 2.0 - 1.0);
        }
    }
    return MapImage(img.width, img.height, 3, kind, std::move(data));
}

}  // namespace

std::optional<MapKind> kind_from_filename(const fs::path& path) {
    std::string stem = path.stem().string();
    std::transform(stem.begin(), stem.end(), stem.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    constexpr std::pair<std::string_view, MapKind> kPrefixes[] = {
        {"mask", MapKind::Mask},           {"albedo", MapKind::Albedo}, {"normal", MapKind::Normal},
        {"transport", MapKind::Transport}, {"ao", MapKind::AO},         {"shading", MapKind::Shading},
    };
    for (const auto& [prefix, kind] : kPrefixes) {
        if (stem.starts_with(prefix)) return kind;
    }
    return std::nullopt;
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw DataError("write failed for " + path.string());
}

void write_text_file(const fs::path& path, const std::string& text) {
    write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::vector<std::uint8_t> encode_mapb(const MapImage& map) {
    std::vector<std::uint8_t> out{'M', 'A', 'P', 'B'};
    out.reserve(21 + map.data().size() * 4);
    put_u32(out, 1);
    put_u32(out, std::uint32_t(map.width()));
    put_u32(out, std::uint32_t(map.height()));
    put_u32(out, std::uint32_t(map.channels()));
    out.push_back(std::uint8_t(map.kind()));
    for (float v : map.data()) put_f32(out, v);
    return out;
}

MapImage decode_mapb(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 21 || std::memcmp(bytes.data(), "MAPB", 4) != 0) throw DataError("corrupt MAPB header");
    const std::uint32_t version = get_u32(bytes.data() + 4);
    if (version != 1) throw DataError("unsupported MAPB version " + std::to_string(version));
    const std::uint32_t width = get_u32(bytes.data() + 8);
    const std::uint32_t height = get_u32(bytes.data() + 12);
    const std::uint32_t channels = get_u32(bytes.data() + 16);
    const std::uint8_t tag = bytes[20];
    if (tag > std::uint8_t(MapKind::Rgb)) throw DataError("corrupt MAPB header: unknown kind tag");
    if (channels != 1 && channels != 3 && channels != 9) throw DataError("corrupt MAPB header: channel count");
    const std::uint64_t count = std::uint64_t(width) * height * channels;
    if (bytes.size() != 21 + count * 4) throw DataError("MAPB payload size mismatch");
    std::vector<float> data(count);
    for (std::size_t i = 0; i < count; ++i) data[i] = get_f32(bytes.data() + 21 + 4 * i);
    return MapImage(int(width), int(height), int(channels), MapKind(tag), std::move(data));
}

MapImage read_map(const fs::path& path, std::optional<MapKind> kind) {
    const std::string ext = lower_ext(path);
    if (ext == ".mapb") {
        MapImage map = decode_mapb(read_file_bytes(path));
        if (kind && *kind != map.kind()) {
            throw DataError(path.string() + ": expected " + std::string(to_string(*kind)) + " map, found " +
                            std::string(to_string(map.kind())));
        }
        return map;
    }
    const std::optional<MapKind> guessed = kind ? kind : kind_from_filename(path);
    if (ext == ".pfm") {
        const auto bytes = read_file_bytes(path);
        if (guessed) return decode_pfm(bytes, *guessed);
        // Unknown stem: 1 channel reads as shading, 3 as RGB.
        MapImage map = decode_pfm(bytes, MapKind::Shading);
        return map.channels() == 3 ? map.with_kind(MapKind::Rgb) : map;
    }
    if (ext == ".png") return decode_png(path, guessed.value_or(MapKind::Rgb));
    throw DataError("unsupported map format: " + path.string());
}

void write_map(const MapImage& map, const fs::path& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".mapb") {
        write_file_bytes(path, encode_mapb(map));
    } else if (ext == ".pfm") {
        write_file_bytes(path, encode_pfm(map));
    } else if (ext == ".png") {
        if (map.channels() != 1 && map.channels() != 3) {
            throw DataError("PNG supports 1 or 3 channels, map has " + std::to_string(map.channels()));
        }
        Image8 img{map.width(), map.height(), map.channels(), {}};
        img.pixels.resize(map.data().size());
        const bool linear = map.kind() == MapKind::Mask || map.kind() == MapKind::AO;
        for (std::size_t i = 0; i < img.pixels.size(); ++i) {
            const float v = map.data()[i];
            if (map.kind() == MapKind::Normal) img.pixels[i] = encode_linear8((v + 1.0) * 0.5);
            else img.pixels[i] = linear ? encode_linear8(v) : encode_srgb8(v);
        }
        write_png8(img, path);
    } else {
        throw DataError("unsupported map format: " + path.string());
    }
}

MapImage apply_mask(const MapImage& map, const MapImage& mask) {
    if (mask.kind() != MapKind::Mask) throw DataError("apply_mask: second argument is not a mask");
    require_same_size(map, mask, "apply_mask");
    MapImage out = map;
    const int c = map.channels();
    for (std::size_t i = 0; i < map.pixel_count(); ++i) {
        const float m = mask.data()[i];
        auto px = out.pixel(i);
        for (int k = 0; k < c; ++k) px[k] = m > 0.5f ? px[k] : 0.0f;
    }
    return out;
}

Image8 read_png8(const fs::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw DataError("cannot read PNG " + path.string() + ": " + image.message);
    }
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    Image8 out{int(image.width), int(image.height), color ? 3 : 1, {}};
    out.pixels.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        png_image_free(&image);
        throw DataError("corrupt PNG " + path.string() + ": " + image.message);
    }
    return out;
}

void write_png8(const Image8& img, const fs::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = png_uint_32(img.width);
    image.height = png_uint_32(img.height);
    switch (img.channels) {
        case 1: image.format = PNG_FORMAT_GRAY; break;
        case 2: image.format = PNG_FORMAT_GA; break;
        case 3: image.format = PNG_FORMAT_RGB; break;
        case 4: image.format = PNG_FORMAT_RGBA; break;
        default: throw DataError("PNG supports 1-4 channels");
    }
    if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels.data(), 0, nullptr)) {
        throw DataError("cannot write PNG " + path.string() + ": " + image.message);
    }
}

json light_to_json(const ShLight& light) {
    json coeffs = json::array();
    for (const auto& row : light.coeffs) coeffs.push_back({row[0], row[1], row[2]});
    return json{{"id", light.id}, {"coeffs", coeffs}};
}

ShLight light_from_json(const json& j) {
    ShLight light;
    try {
        light.id = j.value("id", std::string{});
        const json& coeffs = j.at("coeffs");
        if (!coeffs.is_array() || coeffs.size() != 9) throw DataError("light needs 9 coefficient rows");
        for (std::size_t i = 0; i < 9; ++i) {
            if (!coeffs[i].is_array() || coeffs[i].size() != 3) throw DataError("light rows need 3 values");
            for (std::size_t c = 0; c < 3; ++c) light.coeffs[i][c] = coeffs[i][c].get<double>();
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed light JSON: ") + e.what());
    }
    if (!light.finite()) throw DataError("light has non-finite coefficients");
    return light;
}

void write_light(const ShLight& light, const fs::path& path) {
    write_text_file(path, light_to_json(light).dump(2) + "\n");
}

ShLight load_light_ref(const std::string& ref) {
    const auto hash = ref.find('#');
    const fs::path path = ref.substr(0, hash);
    const std::string id = hash == std::string::npos ? std::string{} : ref.substr(hash + 1);
    const auto bytes = read_file_bytes(path);
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    if (j.contains("lights")) {
        for (const json& entry : j.at("lights")) {
            if (id.empty() || entry.value("id", std::string{}) == id) return light_from_json(entry);
        }
        throw DataError("light '" + id + "' not found in " + path.string());
    }
    ShLight light = light_from_json(j);
    if (!id.empty() && light.id != id) throw DataError("light '" + id + "' not found in " + path.string());
    return light;
}

}  // namespace prt
