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

#ifndef PRT_MAP_IO_H
#define PRT_MAP_IO_H

#include <prt/image.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace prt {

/*
 * File formats
 *
 *  .mapb  "MAPB" | u32 version=1 | u32 width | u32 height | u32 channels | u8 kind
 *         followed by width*height*channels float32 samples, row-major,
 *         top row first. Everything little-endian. Carries any channel count.
 *  .pfm   Portable float map, 1 ("Pf") or 3 ("PF") channels, scale -1.0
 *         (little-endian), rows stored bottom-to-top.
 *  .png   8-bit gray or RGB. Albedo/Rgb/Shading samples are sRGB-encoded on
 *         write and decoded on read; masks threshold at 0.5; AO is linear.
 */

// sRGB transfer functions on [0,1].
double srgb_to_linear(double v);
double linear_to_srgb(double v);
std::uint8_t encode_srgb8(double linear);

// Kind guessed from a file stem such as "mask", "albedo" or "transport".
std::optional<MapKind> kind_from_filename(const std::filesystem::path& path);

// Reads MAPB, PFM or PNG. The kind comes from the MAPB header, otherwise from
// `kind` if given, otherwise from the file name (falling back to Rgb/Shading).
MapImage read_map(const std::filesystem::path& path, std::optional<MapKind> kind = std::nullopt);

// Writes by extension. Output bytes depend only on the map contents.
void write_map(const MapImage& map, const std::filesystem::path& path);

std::vector<std::uint8_t> encode_mapb(const MapImage& map);
MapImage decode_mapb(const std::vector<std::uint8_t>& bytes);

// Element-wise product with a binary mask; out-of-mask pixels become exactly 0.
MapImage apply_mask(const MapImage& map, const MapImage& mask);

// 8-bit PNG helpers shared with texture loading.
struct Image8 {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1..4
    std::vector<std::uint8_t> pixels;
};
Image8 read_png8(const std::filesystem::path& path);
void write_png8(const Image8& image, const std::filesystem::path& path);

// ShLight JSON: {"id": str, "coeffs": [[r,g,b] x 9]}.
nlohmann::json light_to_json(const ShLight& light);
ShLight light_from_json(const nlohmann::json& j);
void write_light(const ShLight& light, const std::filesystem::path& path);

// Loads "file.json" or "file.json#ID". A file may hold a single light or a
// light set ({"lights": [...]}); a set without "#ID" yields its first light.
ShLight load_light_ref(const std::string& ref);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace prt

#endif  // PRT_MAP_IO_H
