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

#include <prt/illum.h>

#include <prt/error.h>
#include <prt/map_io.h>
#include <prt/sampling.h>
#include <prt/sh.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace prt {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

double shading_luminance(const ShLight& light, const Vec3& normal) {
    const auto rgb = sh::shade(sh::analytic_transport_unchecked(normal), light);
    return luminance(rgb[0], rgb[1], rgb[2]);
}

std::vector<double> flatten(const ShLight& light) {
    std::vector<double> v;
    v.reserve(27);
    for (const auto& row : light.coeffs) v.insert(v.end(), row.begin(), row.end());
    return v;
}

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

}  // namespace

double reference_brightness(const ShLight& light) { return shading_luminance(light, {0, 0, 1}) / kPi; }

std::optional<double> brightness_scale(const ShLight& light, const BrightnessRange& range) {
    if (!(range.low < range.high)) throw ArgumentError("brightness range needs low < high");
    const double b = reference_brightness(light);
    if (!(b >= range.reject_below)) return std::nullopt;
    if (b >= range.low && b <= range.high) return 1.0;
    return 0.5 * (range.low + range.high) / b;
}

std::optional<ShLight> normalize_brightness(const ShLight& light, const BrightnessRange& range) {
    const auto s = brightness_scale(light, range);
    if (!s) return std::nullopt;
    return *s == 1.0 ? light : light.scaled(*s);
}

double back_light_ratio(const ShLight& light) {
    const double front = shading_luminance(light, {0, 0, 1});
    const double back = shading_luminance(light, {0, 0, -1});
    if (!(front > 0.0)) return std::numeric_limits<double>::infinity();
    return back / front;
}

double shading_contrast(const ShLight& light) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int x = -1; x <= 1; ++x) {
        for (int y = -1; y <= 1; ++y) {
            for (int z = -1; z <= 1; ++z) {
                if (x == 0 && y == 0 && z == 0) continue;
                const double l = shading_luminance(light, normalize(Vec3(x, y, z)));
                lo = std::min(lo, l);
                hi = std::max(hi, l);
            }
        }
    }
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

const ShLight* LightSet::find(const std::string& id) const {
    for (const auto& l : lights) {
        if (l.id == id) return &l;
    }
    return nullptr;
}

KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed, int max_iterations) {
    const std::size_t n = points.size();
    if (k <= 0 || std::size_t(k) > n) throw ArgumentError("k-means needs 1 <= k <= number of points");
    Rng rng(seed);
    KMeansResult r;
    // k-means++ seeding.
    r.centroids.push_back(points[rng.below(n)]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = dist2(points[i], r.centroids[0]);
    while (r.centroids.size() < std::size_t(k)) {
        double total = 0;
        for (double v : d2) total += v;
        std::size_t pick = 0;
        if (total > 0) {
            const double target = rng.uniform() * total;
            double acc = 0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target && d2[i] > 0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.below(n);
        }
        r.centroids.push_back(points[pick]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], dist2(points[i], r.centroids.back()));
    }
    // Lloyd iterations.
    r.assignment.assign(n, -1);
    for (r.iterations = 0; r.iterations < max_iterations; ++r.iterations) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = dist2(points[i], r.centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = dist2(points[i], r.centroids[std::size_t(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (r.assignment[i] != best) {
                r.assignment[i] = best;
                changed = true;
            }
        }
        if (!changed) break;
        std::vector<std::vector<double>> sums(std::size_t(k), std::vector<double>(points[0].size(), 0.0));
        std::vector<std::size_t> counts(std::size_t(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = sums[std::size_t(r.assignment[i])];
            for (std::size_t d = 0; d < s.size(); ++d) s[d] += points[i][d];
            ++counts[std::size_t(r.assignment[i])];
        }
        for (std::size_t c = 0; c < std::size_t(k); ++c) {
            if (counts[c] == 0) continue;  // empty cluster keeps its centroid
            for (std::size_t d = 0; d < sums[c].size(); ++d) r.centroids[c][d] = sums[c][d] / double(counts[c]);
        }
    }
    return r;
}

LightSet dedup_and_filter(const std::vector<ShLight>& lights, const std::vector<LightProvenance>& provenance,
                          const DedupOptions& options) {
    if (options.clusters <= 0 || std::size_t(options.clusters) > lights.size()) {
        throw ArgumentError("dedup_and_filter: " + std::to_string(options.clusters) + " clusters for " +
                            std::to_string(lights.size()) + " lights");
    }
    if (!provenance.empty() && provenance.size() != lights.size()) {
        throw ArgumentError("dedup_and_filter: provenance does not match lights");
    }
    std::vector<std::vector<double>> points;
    points.reserve(lights.size());
    for (const auto& l : lights) points.push_back(flatten(l));
    const KMeansResult km = kmeans(points, options.clusters, options.seed, options.max_iterations);

    LightSet set;
    for (int c = 0; c < options.clusters; ++c) {
        std::size_t best = lights.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < lights.size(); ++i) {
            if (km.assignment[i] != c) continue;
            const double d = dist2(points[i], km.centroids[std::size_t(c)]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        if (best == lights.size()) continue;
        const ShLight& l = lights[best];
        if (back_light_ratio(l) > options.max_back_light_ratio) continue;
        if (shading_contrast(l) > options.max_contrast) continue;
        set.lights.push_back(l);
        set.provenance.push_back(provenance.empty() ? LightProvenance{} : provenance[best]);
    }

    std::vector<std::string> ids;
    for (const auto& l : set.lights) ids.push_back(l.id);
    Rng rng(mix64(options.seed ^ 0x5eed5eedull));
    for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
    const auto n_test = std::size_t(std::llround(double(ids.size()) * options.test_fraction));
    set.test.assign(ids.begin(), ids.begin() + long(n_test));
    set.train.assign(ids.begin() + long(n_test), ids.end());
    set.config = {{"clusters", options.clusters},
                  {"seed", options.seed},
                  {"max_iterations", options.max_iterations},
                  {"kmeans_iterations", km.iterations},
                  {"max_back_light_ratio", options.max_back_light_ratio},
                  {"max_contrast", options.max_contrast},
                  {"test_fraction", options.test_fraction}};
    return set;
}

LightSet prepare_lights(const std::vector<std::pair<std::string, EnvMap>>& inputs, const EnvPrepOptions& options) {
    std::vector<ShLight> lights;
    std::vector<LightProvenance> provenance;
    json rejected = json::array();
    for (const auto& [name, env] : inputs) {
        env.validate();
        const auto scale = brightness_scale(env_to_sh(env), options.brightness);
        if (!scale) {
            rejected.push_back(name);
            continue;
        }
        const std::string stem = fs::path(name).stem().string();
        for (int k = 0; k <= options.rotations; ++k) {
            const double deg = options.step_degrees * k;
            char suffix[32];
            std::snprintf(suffix, sizeof(suffix), "_r%03d", int(std::lround(deg)));
            ShLight l = env_to_sh(k == 0 ? env : rotate_env(env, deg), stem + suffix).scaled(*scale);
            lights.push_back(std::move(l));
            provenance.push_back({name, deg});
        }
    }
    LightSet set = dedup_and_filter(lights, provenance, options.dedup);
    set.config["rotations"] = options.rotations;
    set.config["step_degrees"] = options.step_degrees;
    set.config["bright_min"] = options.brightness.reject_below;
    set.config["target"] = {options.brightness.low, options.brightness.high};
    set.config["inputs"] = inputs.size();
    set.config["candidates"] = lights.size();
    set.config["rejected"] = rejected;
    return set;
}

LightSet prepare_lights(const std::vector<fs::path>& inputs, const EnvPrepOptions& options) {
    std::vector<fs::path> sorted = inputs;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<std::string, EnvMap>> envs;
    for (const auto& p : sorted) envs.emplace_back(p.filename().string(), load_env(p));
    return prepare_lights(envs, options);
}

json light_set_to_json(const LightSet& set) {
    json lights = json::array();
    for (std::size_t i = 0; i < set.lights.size(); ++i) {
        json entry = light_to_json(set.lights[i]);
        const LightProvenance p = i < set.provenance.size() ? set.provenance[i] : LightProvenance{};
        entry["source"] = p.source;
        entry["rotation_deg"] = p.rotation_deg;
        lights.push_back(entry);
    }
    return json{{"lights", lights}, {"train", set.train}, {"test", set.test}, {"config", set.config}};
}

LightSet light_set_from_json(const json& j) {
    LightSet set;
    try {
        for (const json& entry : j.at("lights")) {
            set.lights.push_back(light_from_json(entry));
            set.provenance.push_back({entry.value("source", std::string{}), entry.value("rotation_deg", 0.0)});
        }
        set.train = j.value("train", std::vector<std::string>{});
        set.test = j.value("test", std::vector<std::string>{});
        set.config = j.value("config", json::object());
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed light set: ") + e.what());
    }
    return set;
}

std::string dump_light_set(const LightSet& set) { return light_set_to_json(set).dump(2) + "\n"; }

}  // namespace prt
