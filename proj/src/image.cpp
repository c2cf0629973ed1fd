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

#include <prt/image.h>

#include <prt/error.h>

#include <cmath>
#include <string>
#include <utility>

namespace prt {

namespace {

constexpr std::pair<MapKind, std::string_view> kKindNames[] = {
    {MapKind::Albedo, "albedo"},   {MapKind::Normal, "normal"},   {MapKind::Transport, "transport"},
    {MapKind::AO, "ao"},           {MapKind::Shading, "shading"}, {MapKind::Mask, "mask"},
    {MapKind::Rgb, "rgb"},
};

}  // namespace

std::string_view to_string(MapKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<MapKind> map_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

int required_channels(MapKind kind) {
    switch (kind) {
        case MapKind::Albedo:
        case MapKind::Normal:
        case MapKind::Rgb:
            return 3;
        case MapKind::Transport:
            return 9;
        case MapKind::AO:
        case MapKind::Mask:
            return 1;
        case MapKind::Shading:
            return 0;
    }
    return 0;
}

MapImage::MapImage(int width, int height, int channels, MapKind kind, float fill)
    : MapImage(width, height, channels, kind,
               std::vector<float>(std::size_t(width) * std::size_t(height) * std::size_t(channels), fill)) {}

MapImage::MapImage(int width, int height, int channels, MapKind kind, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), kind_(kind), data_(std::move(data)) {
    if (width < 0 || height < 0) throw ArgumentError("negative map dimensions");
    if (channels != 1 && channels != 3 && channels != 9) {
        throw ArgumentError("unsupported channel count " + std::to_string(channels));
    }
    const int req = required_channels(kind);
    if (req != 0 ? channels != req : (channels != 1 && channels != 3)) {
        throw DataError("channel count " + std::to_string(channels) + " inconsistent with kind " +
                        std::string(to_string(kind)));
    }
    if (data_.size() != std::size_t(width) * std::size_t(height) * std::size_t(channels)) {
        throw ArgumentError("map data length does not match width*height*channels");
    }
}

MapImage MapImage::with_kind(MapKind kind) const {
    return MapImage(width_, height_, channels_, kind, data_);
}

void require_same_size(const MapImage& a, const MapImage& b, std::string_view what) {
    if (!a.same_size(b)) {
        throw DataError(std::string(what) + ": size mismatch " + std::to_string(a.width()) + "x" +
                        std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                        std::to_string(b.height()));
    }
}

void validate_map(const MapImage& map, const MapImage* mask) {
    for (float v : map.data()) {
        if (!std::isfinite(v)) throw DataError("map contains non-finite samples");
    }
    switch (map.kind()) {
        case MapKind::Mask:
            for (float v : map.data()) {
                if (v != 0.0f && v != 1.0f) throw DataError("mask samples must be 0 or 1");
            }
            break;
        case MapKind::AO:
            for (float v : map.data()) {
                if (v < 0.0f || v > 1.0f) throw DataError("AO samples must lie in [0,1]");
            }
            break;
        case MapKind::Normal:
            if (mask) {
                require_same_size(map, *mask, "normal map");
                for (std::size_t i = 0; i < map.pixel_count(); ++i) {
                    auto p = map.pixel(i);
                    const double n2 = double(p[0]) * p[0] + double(p[1]) * p[1] + double(p[2]) * p[2];
                    if (mask_on(*mask, i)) {
                        if (std::abs(std::sqrt(n2) - 1.0) > 1e-4) {
                            throw DataError("normal not unit length at pixel " + std::to_string(i));
                        }
                    } else if (n2 != 0.0) {
                        throw DataError("normal must be zero outside the mask at pixel " + std::to_string(i));
                    }
                }
            }
            break;
        default:
            break;
    }
}

bool ShLight::finite() const {
    for (const auto& row : coeffs) {
        for (double v : row) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

ShLight ShLight::scaled(double s) const {
    ShLight out = *this;
    for (auto& row : out.coeffs) {
        for (double& v : row) v *= s;
    }
    return out;
}

}  // namespace prt
