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

#ifndef PRT_IMAGE_H
#define PRT_IMAGE_H

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prt {

// Semantic tag carried by every raster. The numeric values are the on-disk
// kind tags of the MAPB container and must not change.
enum class MapKind : std::uint8_t {
    Albedo = 0,
    Normal = 1,
    Transport = 2,
    AO = 3,
    Shading = 4,
    Mask = 5,
    Rgb = 6,
};

std::string_view to_string(MapKind kind);
std::optional<MapKind> map_kind_from_string(std::string_view name);

// Channel count a kind requires, or 0 when the kind admits 1 or 3 channels.
int required_channels(MapKind kind);

// Row-major W x H x C float raster, row 0 at the top.
class MapImage {
public:
    MapImage() = default;
    MapImage(int width, int height, int channels, MapKind kind, float fill = 0.0f);
    MapImage(int width, int height, int channels, MapKind kind, std::vector<float> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    MapKind kind() const { return kind_; }
    std::size_t pixel_count() const { return std::size_t(width_) * std::size_t(height_); }
    bool empty() const { return data_.empty(); }

    std::span<const float> data() const { return data_; }
    std::span<float> data() { return data_; }

    std::size_t index(int x, int y, int c = 0) const {
        return (std::size_t(y) * std::size_t(width_) + std::size_t(x)) * std::size_t(channels_) +
               std::size_t(c);
    }
    float at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }
    float& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }

    std::span<const float> pixel(std::size_t i) const {
        return std::span<const float>(data_).subspan(i * std::size_t(channels_), std::size_t(channels_));
    }
    std::span<float> pixel(std::size_t i) {
        return std::span<float>(data_).subspan(i * std::size_t(channels_), std::size_t(channels_));
    }

    bool same_size(const MapImage& o) const { return width_ == o.width_ && height_ == o.height_; }

    MapImage with_kind(MapKind kind) const;

    bool operator==(const MapImage&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    MapKind kind_ = MapKind::Rgb;
    std::vector<float> data_;
};

// Checks the per-kind invariants (binary masks, unit normals under a mask,
// AO range). Throws DataError naming the first violation.
void validate_map(const MapImage& map, const MapImage* mask = nullptr);

// Throws DataError unless both maps share width and height.
void require_same_size(const MapImage& a, const MapImage& b, std::string_view what);

inline bool mask_on(const MapImage& mask, std::size_t i) { return mask.data()[i * mask.channels()] > 0.5f; }

using ShVector9 = std::array<double, 9>;

// 9x3 SH light: rows ordered i = l(l+1)+m, columns R, G, B.
struct ShLight {
    std::string id;
    std::array<std::array<double, 3>, 9> coeffs{};

    static ShLight zero(std::string id = {}) { return ShLight{std::move(id), {}}; }
    bool finite() const;
    ShLight scaled(double s) const;
    bool operator==(const ShLight&) const = default;
};

}  // namespace prt

#endif  // PRT_IMAGE_H
