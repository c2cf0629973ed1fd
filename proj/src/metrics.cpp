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

#include <prt/metrics.h>

#include <prt/error.h>
#include <prt/map_io.h>
#include <prt/relight.h>
#include <prt/sh.h>

#include <algorithm>
#include <cmath>
#include <optional>

namespace prt {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void require_pair(const MapImage& a, const MapImage& b, const MapImage& mask, std::string_view what) {
    require_same_size(a, b, what);
    require_same_size(a, mask, what);
    if (a.channels() != b.channels()) {
        throw DataError(std::string(what) + ": channel counts differ (" + std::to_string(a.channels()) + " vs " +
                        std::to_string(b.channels()) + ")");
    }
}

// Row sums accumulated separately then added, which keeps the rounding
// error small for large images.
template <typename F>
std::pair<double, std::size_t> masked_sum(const MapImage& mask, F&& per_pixel) {
    double total = 0.0;
    std::size_t count = 0;
    const int w = mask.width();
    for (int y = 0; y < mask.height(); ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            const std::size_t p = std::size_t(y) * std::size_t(w) + std::size_t(x);
            if (!mask_on(mask, p)) continue;
            row += per_pixel(p);
            ++count;
        }
        total += row;
    }
    return {total, count};
}

}  // namespace

void DecompositionPair::validate() const {
    for (const MapImage* m : {&pred_albedo, &pred_transport, &albedo, &transport, &image}) {
        require_same_size(*m, mask, "decomposition pair");
    }
    if (image.channels() != 1 && image.channels() != 3) throw DataError("decomposition pair: image needs 1 or 3 channels");
    if (pred_transport.channels() != 9 || transport.channels() != 9) {
        throw DataError("decomposition pair: transport maps need 9 channels");
    }
}

const std::array<std::string_view, kLossCount>& loss_names() {
    static const std::array<std::string_view, kLossCount> names = {
        "albedo",
        "transport",
        "light",
        "reconstruction",
        "tv_albedo",
        "tv_transport",
        "shading_pred_transport",
        "shading_pred_light",
        "shading_pred_both",
        "image_gt_albedo_pred_light",
        "image_gt_albedo_pred_transport",
        "image_gt_albedo_pred_both",
        "image_pred_albedo_gt_shading",
        "image_pred_albedo_pred_light",
        "image_pred_albedo_pred_transport",
    };
    return names;
}

double l1_masked(const MapImage& a, const MapImage& b, const MapImage& mask) {
    require_pair(a, b, mask, "l1_masked");
    const int c = a.channels();
    const auto [sum, count] = masked_sum(mask, [&](std::size_t p) {
        const auto pa = a.pixel(p), pb = b.pixel(p);
        double s = 0.0;
        for (int k = 0; k < c; ++k) s += std::abs(double(pa[k]) - double(pb[k]));
        return s;
    });
    if (count == 0) throw DataError("l1_masked: empty mask");
    return sum / double(count * std::size_t(c));
}

double tv_masked(const MapImage& map, const MapImage& mask) {
    require_same_size(map, mask, "tv_masked");
    const int w = map.width(), h = map.height(), c = map.channels();
    double total = 0.0;
    std::size_t pairs = 0;
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            const std::size_t p = std::size_t(y) * std::size_t(w) + std::size_t(x);
            if (!mask_on(mask, p)) continue;
            const auto v = map.pixel(p);
            for (const std::size_t q : {p + 1, p + std::size_t(w)}) {
                if ((q == p + 1 && x + 1 >= w) || (q == p + std::size_t(w) && y + 1 >= h)) continue;
                if (!mask_on(mask, q)) continue;
                const auto u = map.pixel(q);
                for (int k = 0; k < c; ++k) row += std::abs(double(u[k]) - double(v[k]));
                ++pairs;
            }
        }
        total += row;
    }
    return pairs == 0 ? 0.0 : total / double(pairs * std::size_t(c));
}

double light_l1(const ShLight& a, const ShLight& b) {
    double s = 0.0;
    for (int i = 0; i < 9; ++i) {
        for (int c = 0; c < 3; ++c) s += std::abs(a.coeffs[i][c] - b.coeffs[i][c]);
    }
    return s / 27.0;
}

double light_rmse(const ShLight& a, const ShLight& b) {
    double s = 0.0;
    for (int i = 0; i < 9; ++i) {
        for (int c = 0; c < 3; ++c) s += (a.coeffs[i][c] - b.coeffs[i][c]) * (a.coeffs[i][c] - b.coeffs[i][c]);
    }
    return std::sqrt(s / 27.0);
}

std::array<double, kLossCount> losses15(const DecompositionPair& d) {
    d.validate();
    const MapImage& m = d.mask;
    const MapImage s_gt = shade_map(d.transport, d.light, m);
    const MapImage s_pt = shade_map(d.pred_transport, d.light, m);
    const MapImage s_pl = shade_map(d.transport, d.pred_light, m);
    const MapImage s_pp = shade_map(d.pred_transport, d.pred_light, m);
    MapImage image(d.image.width(), d.image.height(), 3, MapKind::Rgb);
    for (std::size_t p = 0; p < image.pixel_count(); ++p) {
        for (int c = 0; c < 3; ++c) image.pixel(p)[c] = d.image.pixel(p)[d.image.channels() == 3 ? c : 0];
    }
    auto img = [&](const MapImage& albedo, const MapImage& shading) {
        return l1_masked(compose(albedo, shading, m), image, m);
    };
    std::array<double, kLossCount> out{};
    out[0] = l1_masked(d.pred_albedo, d.albedo, m);
    out[1] = l1_masked(d.pred_transport, d.transport, m);
    out[2] = light_l1(d.pred_light, d.light);
    out[3] = img(d.pred_albedo, s_pp);
    out[4] = tv_masked(d.pred_albedo, m);
    out[5] = tv_masked(d.pred_transport, m);
    out[6] = l1_masked(s_pt, s_gt, m);
    out[7] = l1_masked(s_pl, s_gt, m);
    out[8] = l1_masked(s_pp, s_gt, m);
    out[9] = img(d.albedo, s_pl);
    out[10] = img(d.albedo, s_pt);
    out[11] = img(d.albedo, s_pp);
    out[12] = img(d.pred_albedo, s_gt);
    out[13] = img(d.pred_albedo, s_pl);
    out[14] = img(d.pred_albedo, s_pt);
    return out;
}

double rmse_masked(const MapImage& a, const MapImage& b, const MapImage& mask) {
    require_pair(a, b, mask, "rmse_masked");
    const int c = a.channels();
    const auto [sum, count] = masked_sum(mask, [&](std::size_t p) {
        const auto pa = a.pixel(p), pb = b.pixel(p);
        double s = 0.0;
        for (int k = 0; k < c; ++k) {
            const double d = double(pa[k]) - double(pb[k]);
            s += d * d;
        }
        return s;
    });
    if (count == 0) throw DataError("rmse_masked: empty mask");
    return std::sqrt(sum / double(count * std::size_t(c)));
}

double ssim_region(const MapImage& a, const MapImage& b, int channel, int x0, int y0, int width, int height,
                   const SsimParams& params) {
    const int win = params.window;
    if (width < win || height < win) throw DataError("ssim: region smaller than the window");
    std::vector<double> kernel(static_cast<std::size_t>(win));
    double ksum = 0.0;
    for (int i = 0; i < win; ++i) {
        const double d = i - (win - 1) / 2.0;
        kernel[std::size_t(i)] = std::exp(-d * d / (2.0 * params.sigma * params.sigma));
        ksum += kernel[std::size_t(i)];
    }
    for (double& k : kernel) k /= ksum;

    // Five moment images, blurred horizontally then vertically ('valid').
    const int ow = width - win + 1, oh = height - win + 1;
    std::vector<std::array<double, 5>> hblur(std::size_t(ow) * std::size_t(height));
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < ow; ++x) {
            std::array<double, 5> acc{};
            for (int k = 0; k < win; ++k) {
                const double va = a.at(x0 + x + k, y0 + y, channel), vb = b.at(x0 + x + k, y0 + y, channel);
                const double wk = kernel[std::size_t(k)];
                acc[0] += wk * va;
                acc[1] += wk * vb;
                acc[2] += wk * va * va;
                acc[3] += wk * vb * vb;
                acc[4] += wk * va * vb;
            }
            hblur[std::size_t(y) * std::size_t(ow) + std::size_t(x)] = acc;
        }
    }
    const double c1 = (params.k1 * params.range) * (params.k1 * params.range);
    const double c2 = (params.k2 * params.range) * (params.k2 * params.range);
    double total = 0.0;
    for (int y = 0; y < oh; ++y) {
        double row = 0.0;
        for (int x = 0; x < ow; ++x) {
            std::array<double, 5> m{};
            for (int k = 0; k < win; ++k) {
                const auto& h = hblur[std::size_t(y + k) * std::size_t(ow) + std::size_t(x)];
                for (int j = 0; j < 5; ++j) m[std::size_t(j)] += kernel[std::size_t(k)] * h[std::size_t(j)];
            }
            const double va = m[2] - m[0] * m[0], vb = m[3] - m[1] * m[1], cov = m[4] - m[0] * m[1];
            row += ((2 * m[0] * m[1] + c1) * (2 * cov + c2)) / ((m[0] * m[0] + m[1] * m[1] + c1) * (va + vb + c2));
        }
        total += row;
    }
    return total / (double(ow) * double(oh));
}

double ssim_bbox(const MapImage& a, const MapImage& b, const MapImage& mask) {
    require_pair(a, b, mask, "ssim_bbox");
    int x0 = a.width(), y0 = a.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
            if (!mask_on(mask, std::size_t(y) * std::size_t(a.width()) + std::size_t(x))) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) throw DataError("ssim_bbox: empty mask");
    const SsimParams params;
    int w = x1 - x0 + 1, h = y1 - y0 + 1;
    if (w < params.window || h < params.window) {
        x0 = y0 = 0;
        w = a.width();
        h = a.height();
    }
    double s = 0.0;
    for (int c = 0; c < a.channels(); ++c) s += ssim_region(a, b, c, x0, y0, w, h, params);
    return s / a.channels();
}

SphereRender render_light_sphere(const ShLight& light, int size) {
    if (size <= 0) throw ArgumentError("sphere render size must be positive");
    SphereRender out{MapImage(size, size, 3, MapKind::Shading), MapImage(size, size, 1, MapKind::Mask)};
    for (int j = 0; j < size; ++j) {
        for (int i = 0; i < size; ++i) {
            const double x = 2.0 * (i + 0.5) / size - 1.0, y = 1.0 - 2.0 * (j + 0.5) / size;
            const double r2 = x * x + y * y;
            if (r2 >= 1.0) continue;
            const auto rgb = sh::shade(sh::analytic_transport_unchecked({x, y, std::sqrt(1.0 - r2)}), light);
            for (int c = 0; c < 3; ++c) out.image.at(i, j, c) = float(rgb[c]);
            out.mask.at(i, j) = 1.0f;
        }
    }
    return out;
}

namespace {

std::optional<fs::path> find_component(const fs::path& dir, const std::string& stem) {
    for (const char* ext : {".mapb", ".pfm", ".png", ".json"}) {
        const fs::path p = dir / (stem + ext);
        if (fs::is_regular_file(p)) return p;
    }
    return std::nullopt;
}

struct Side {
    std::optional<MapImage> albedo, transport, normal, ao, shading, image, mask;
    std::optional<ShLight> light;
};

Side load_side(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DataError("evaluate: not a directory: " + dir.string());
    Side s;
    auto map = [&](std::optional<MapImage>& slot, const std::string& stem, MapKind kind) {
        if (const auto p = find_component(dir, stem); p && p->extension() != ".json") slot = read_map(*p, kind);
    };
    map(s.albedo, "albedo", MapKind::Albedo);
    map(s.transport, "transport", MapKind::Transport);
    map(s.normal, "normal", MapKind::Normal);
    map(s.ao, "ao", MapKind::AO);
    map(s.shading, "shading", MapKind::Shading);
    map(s.image, "image", MapKind::Rgb);
    map(s.mask, "mask", MapKind::Mask);
    if (fs::is_regular_file(dir / "light.json")) s.light = load_light_ref((dir / "light.json").string());
    if (!s.shading && s.transport && s.light && s.mask) s.shading = shade_map(*s.transport, *s.light, *s.mask);
    return s;
}

json compare(const std::optional<MapImage>& pred, const std::optional<MapImage>& gt, const MapImage& mask) {
    if (!pred || !gt) return "N/A";
    return json{{"rmse", rmse_masked(*pred, *gt, mask)}, {"ssim", ssim_bbox(*pred, *gt, mask)}};
}

}  // namespace

json evaluate(const fs::path& pred_dir, const fs::path& gt_dir, const fs::path& out) {
    const Side pred = load_side(pred_dir);
    const Side gt = load_side(gt_dir);
    const std::optional<MapImage>& mask = gt.mask ? gt.mask : pred.mask;
    if (!mask) throw DataError("evaluate: no mask in either directory");

    json components = json::object();
    components["albedo"] = compare(pred.albedo, gt.albedo, *mask);
    components["transport"] = compare(pred.transport, gt.transport, *mask);
    components["normal"] = compare(pred.normal, gt.normal, *mask);
    components["ao"] = compare(pred.ao, gt.ao, *mask);
    components["shading"] = compare(pred.shading, gt.shading, *mask);
    if (pred.light && gt.light) {
        const SphereRender a = render_light_sphere(*pred.light), b = render_light_sphere(*gt.light);
        components["light"] = {{"rmse", light_rmse(*pred.light, *gt.light)}, {"ssim", ssim_bbox(a.image, b.image, a.mask)}};
    } else {
        components["light"] = "N/A";
    }

    json report = {{"pred", pred_dir.string()}, {"gt", gt_dir.string()}, {"components", components}};
    if (pred.albedo && pred.transport && pred.light && gt.albedo && gt.transport && gt.light) {
        DecompositionPair pair{*pred.albedo, *pred.transport, *pred.light, *gt.albedo, *gt.transport, *gt.light, *mask, {}};
        pair.image = gt.image ? *gt.image : compose(*gt.albedo, *gt.shading, *mask);
        const auto values = losses15(pair);
        json losses = json::array();
        double sum = 0.0;
        for (int i = 0; i < kLossCount; ++i) {
            losses.push_back({{"index", i + 1}, {"name", loss_names()[std::size_t(i)]}, {"value", values[std::size_t(i)]}});
            sum += values[std::size_t(i)];
        }
        report["losses"] = losses;
        report["loss_sum"] = sum;
    } else {
        report["losses"] = "N/A";
        report["loss_sum"] = "N/A";
    }
    if (!out.empty()) write_text_file(out, report.dump(2) + "\n");
    return report;
}

}  // namespace prt
