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

// prt: command line front end for baking, light preparation, relighting,
// inverse estimation and evaluation.

#include <prt/baker.h>
#include <prt/envmap.h>
#include <prt/error.h>
#include <prt/hash.h>
#include <prt/illum.h>
#include <prt/inverse.h>
#include <prt/map_io.h>
#include <prt/metrics.h>
#include <prt/relight.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Common {
    std::uint64_t seed = 7;
    unsigned threads = 0;
    bool quiet = false;
};

Common g_common;

void log_event(const std::string& command, const json& payload) {
    if (g_common.quiet) return;
    json line = {{"command", command}, {"seed", g_common.seed}};
    line.update(payload);
    std::cerr << "prt: " << line.dump() << "\n";
}

json hashes_of(const std::vector<fs::path>& paths) {
    json out = json::object();
    for (const auto& p : paths) out[p.filename().string()] = prt::sha256_file(p);
    return out;
}

std::pair<double, double> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw prt::ArgumentError("expected LOW:HIGH, got '" + text + "'");
    try {
        return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw prt::ArgumentError("expected LOW:HIGH, got '" + text + "'");
    }
}

std::vector<fs::path> list_panoramas(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw prt::DataError("not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string ext = e.path().extension().string();
        if (e.is_regular_file() && (ext == ".hdr" || ext == ".pfm")) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw prt::DataError("no .hdr or .pfm panoramas in " + dir.string());
    return out;
}

// Side-by-side PNG of equally sized RGB images.
prt::MapImage side_by_side(const std::vector<prt::MapImage>& images) {
    const int w = images.front().width(), h = images.front().height();
    prt::MapImage out(w * int(images.size()), h, 3, prt::MapKind::Rgb);
    for (std::size_t k = 0; k < images.size(); ++k) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                for (int c = 0; c < 3; ++c) out.at(int(k) * w + x, y, c) = images[k].at(x, y, c);
            }
        }
    }
    return out;
}

struct BakeArgs {
    std::string mesh;
    int size = 1024;
    double padding = 0.05;
    std::uint64_t samples = 256;
    std::string out;
    std::string transport = "occlusion";
};

int run_bake(const BakeArgs& a) {
    prt::DatasetOptions opt;
    opt.size = a.size;
    opt.padding = a.padding;
    opt.mode = prt::transport_mode_from_string(a.transport);
    opt.bake.samples = a.samples;
    opt.bake.seed = g_common.seed;
    opt.bake.threads = g_common.threads;
    const auto rec = prt::bake_all(a.mesh, opt, a.out);
    log_event("bake", {{"out", a.out}, {"config", rec.manifest["config"]}, {"hashes", rec.manifest["hashes"]}});
    return 0;
}

struct EnvprepArgs {
    std::string in;
    std::string out;
    int rotations = 35;
    double step = 10.0;
    int clusters = 50;
    double bright_min = 0.2;
    std::string target = "0.7:0.9";
};

int run_envprep(const EnvprepArgs& a) {
    prt::EnvPrepOptions opt;
    opt.rotations = a.rotations;
    opt.step_degrees = a.step;
    opt.brightness.reject_below = a.bright_min;
    std::tie(opt.brightness.low, opt.brightness.high) = parse_range(a.target);
    opt.dedup.clusters = a.clusters;
    opt.dedup.seed = g_common.seed;
    const prt::LightSet set = prt::prepare_lights(list_panoramas(a.in), opt);
    prt::write_text_file(a.out, prt::dump_light_set(set));
    log_event("envprep", {{"out", a.out},
                          {"lights", set.lights.size()},
                          {"train", set.train.size()},
                          {"test", set.test.size()},
                          {"config", set.config},
                          {"hashes", hashes_of({a.out})}});
    return 0;
}

struct MapArgs {
    std::string albedo, transport, mask, light, out;
};

int run_shade(const MapArgs& a) {
    const auto t = prt::read_map(a.transport, prt::MapKind::Transport);
    const auto m = prt::read_map(a.mask, prt::MapKind::Mask);
    prt::write_image(prt::shade_map(t, prt::load_light_ref(a.light), m), a.out);
    log_event("shade", {{"light", a.light}, {"hashes", hashes_of({a.out})}});
    return 0;
}

int run_relight(const MapArgs& a) {
    prt::relight(a.albedo, a.transport, a.mask, prt::load_light_ref(a.light), a.out);
    log_event("relight", {{"light", a.light}, {"hashes", hashes_of({a.out})}});
    return 0;
}

struct SweepArgs {
    MapArgs maps;
    int frames = 36;
    double step = 10.0;
    std::string format = "png";
};

int run_sweep(const SweepArgs& a) {
    const auto written = prt::sweep(prt::read_map(a.maps.albedo, prt::MapKind::Albedo),
                                    prt::read_map(a.maps.transport, prt::MapKind::Transport),
                                    prt::read_map(a.maps.mask, prt::MapKind::Mask), prt::load_light_ref(a.maps.light),
                                    a.frames, a.step, a.maps.out, "." + a.format);
    log_event("sweep", {{"frames", a.frames}, {"step", a.step}, {"hashes", hashes_of(written)}});
    return 0;
}

struct TransferArgs {
    std::string a, b, out, format = "png";
};

int run_transfer(const TransferArgs& t) {
    const auto da = prt::load_decomposition(t.a);
    const auto db = prt::load_decomposition(t.b);
    const auto [ab, ba] = prt::transfer_light(da, db);
    fs::create_directories(t.out);
    const fs::path pa = fs::path(t.out) / ("a_lit_by_b." + t.format);
    const fs::path pb = fs::path(t.out) / ("b_lit_by_a." + t.format);
    prt::write_image(ab, pa);
    prt::write_image(ba, pb);
    log_event("transfer", {{"a", t.a}, {"b", t.b}, {"hashes", hashes_of({pa, pb})}});
    return 0;
}

struct EstimateArgs {
    std::string shading, image, albedo, transport, normal, mask, out;
};

int run_estimate(const EstimateArgs& e) {
    const auto mask = prt::read_map(e.mask, prt::MapKind::Mask);
    prt::MapImage transport;
    if (!e.transport.empty() == !e.normal.empty()) throw prt::ArgumentError("give exactly one of --transport, --normal");
    if (!e.transport.empty()) {
        transport = prt::read_map(e.transport, prt::MapKind::Transport);
    } else {
        transport = prt::transport_from_normals(prt::read_map(e.normal, prt::MapKind::Normal), mask);
    }
    prt::MapImage observed;
    if (!e.shading.empty() == !e.image.empty()) throw prt::ArgumentError("give exactly one of --shading, --image");
    if (!e.shading.empty()) {
        observed = prt::read_map(e.shading, prt::MapKind::Shading);
    } else {
        if (e.albedo.empty()) throw prt::ArgumentError("--image needs --albedo");
        const auto image = prt::read_map(e.image, prt::MapKind::Rgb);
        observed = prt::recover_albedo(image, prt::read_map(e.albedo, prt::MapKind::Albedo), mask).albedo;
    }
    const prt::LightEstimate est = prt::estimate_light(observed, transport, mask, g_common.threads);
    prt::ShLight light = est.light;
    light.id = fs::path(e.out).stem().string();
    prt::write_light(light, e.out);
    if (est.rank_deficient && !g_common.quiet) {
        std::cerr << "prt: warning: rank-deficient transport (condition " << est.condition
                  << "), minimum-norm light returned\n";
    }
    log_event("estimate-light", {{"residual", est.residual},
                                 {"condition", est.condition},
                                 {"rank_deficient", est.rank_deficient},
                                 {"hashes", hashes_of({e.out})}});
    return 0;
}

struct EvaluateArgs {
    std::string pred, gt, out;
};

int run_evaluate(const EvaluateArgs& e) {
    const json report = prt::evaluate(e.pred, e.gt, e.out);
    log_event("evaluate", {{"components", report["components"]}, {"loss_sum", report["loss_sum"]}});
    return 0;
}

struct DemoArgs {
    std::string out;
    int size = 256;
    std::uint64_t samples = 256;
};

int run_demo(const DemoArgs& d) {
    const fs::path root = d.out;
    fs::create_directories(root / "panoramas");
    std::vector<std::pair<std::string, prt::EnvMap>> panoramas;
    for (int v = 0; v < 4; ++v) {
        const std::string name = "sky" + std::to_string(v) + ".hdr";
        panoramas.emplace_back(name, prt::procedural_panorama(v));
        prt::write_hdr(panoramas.back().second, root / "panoramas" / name);
    }
    prt::EnvPrepOptions env_opt;
    env_opt.dedup.seed = g_common.seed;
    const prt::LightSet lights = prt::prepare_lights(panoramas, env_opt);
    prt::write_text_file(root / "lights.json", prt::dump_light_set(lights));
    const std::vector<std::string>& pool = lights.test.empty() ? lights.train : lights.test;
    if (pool.empty()) throw prt::DataError("demo: no lights survived filtering");

    json summary = json::object();
    std::size_t pick = 0;
    for (const std::string scene : {"sphere", "sphere_wedge", "figure"}) {
        const fs::path dir = root / scene;
        prt::DatasetOptions opt;
        opt.size = d.size;
        opt.bake.samples = d.samples;
        opt.bake.seed = g_common.seed;
        opt.bake.threads = g_common.threads;
        prt::bake_all("builtin:" + scene, opt, dir);

        const prt::ShLight light = *lights.find(pool[pick++ % pool.size()]);
        prt::write_light(light, dir / "light.json");
        const prt::Decomposition gt = prt::load_decomposition(dir);
        const prt::MapImage occluded = prt::relight_image(gt.albedo, gt.transport, light, gt.mask);
        const prt::MapImage analytic =
            prt::transport_from_normals(prt::read_map(dir / "normal.mapb", prt::MapKind::Normal), gt.mask);
        const prt::MapImage unoccluded = prt::relight_image(gt.albedo, analytic, light, gt.mask);
        prt::write_map(occluded, dir / "image.pfm");
        prt::write_image(occluded, dir / "occluded.png");
        prt::write_image(unoccluded, dir / "unoccluded.png");
        prt::write_image(side_by_side({unoccluded, occluded}), dir / "comparison.png");

        // Occlusion-free baseline: light fitted through the analytic transport.
        const fs::path base = dir / "baseline";
        fs::create_directories(base);
        const prt::MapImage observed = prt::recover_albedo(occluded, gt.albedo, gt.mask).albedo;
        prt::ShLight fitted = prt::estimate_light(observed, analytic, gt.mask, g_common.threads).light;
        fitted.id = "baseline";
        prt::write_map(gt.albedo, base / "albedo.mapb");
        prt::write_map(analytic, base / "transport.mapb");
        prt::write_map(gt.mask, base / "mask.png");
        prt::write_light(fitted, base / "light.json");
        const json report = prt::evaluate(base, dir, dir / "report.json");
        summary[scene] = {{"light", light.id},
                          {"shading_rmse", report["components"]["shading"]["rmse"]},
                          {"hashes", hashes_of({dir / "occluded.png", dir / "unoccluded.png", dir / "comparison.png"})}};
    }
    prt::write_text_file(root / "summary.json", summary.dump(2) + "\n");
    log_event("demo", {{"out", d.out}, {"size", d.size}, {"samples", d.samples}, {"scenes", summary}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prt: occlusion-aware spherical harmonics baking, relighting and inverse lighting"};
    app.set_version_flag("--version", std::string("prt ") + PRT_VERSION + " (" + __VERSION__ + ")");
    app.require_subcommand(1);
    app.add_option("--seed", g_common.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", g_common.threads, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_flag("--quiet", g_common.quiet, "Suppress log lines");

    int rc = 0;
    auto sub = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };

    BakeArgs bake;
    auto* c_bake = sub("bake", "Rasterize a mesh and bake mask, albedo, normal, transport and AO maps");
    c_bake->add_option("--mesh", bake.mesh, "OBJ path or builtin:<name>")->required();
    c_bake->add_option("--size", bake.size, "Image size in pixels")->capture_default_str()->check(CLI::PositiveNumber);
    c_bake->add_option("--padding", bake.padding, "Border fraction")->capture_default_str();
    c_bake->add_option("--samples", bake.samples, "Samples per pixel")->capture_default_str()->check(CLI::PositiveNumber);
    c_bake->add_option("--out", bake.out, "Output directory")->required();
    c_bake->add_option("--transport", bake.transport, "occlusion | analytic | analytic-ao")
        ->capture_default_str()
        ->check(CLI::IsMember({"occlusion", "analytic", "analytic-ao"}));
    c_bake->callback([&] { rc = run_bake(bake); });

    EnvprepArgs env;
    auto* c_env = sub("envprep", "Project, normalize, augment and deduplicate HDR panoramas into a light set");
    c_env->add_option("--in", env.in, "Directory of .hdr/.pfm panoramas")->required();
    c_env->add_option("--out", env.out, "lights.json path")->required();
    c_env->add_option("--rotations", env.rotations)->capture_default_str()->check(CLI::NonNegativeNumber);
    c_env->add_option("--step", env.step, "Rotation step in degrees")->capture_default_str();
    c_env->add_option("--clusters", env.clusters)->capture_default_str()->check(CLI::PositiveNumber);
    c_env->add_option("--bright-min", env.bright_min)->capture_default_str();
    c_env->add_option("--target", env.target, "Brightness range LOW:HIGH")->capture_default_str();
    c_env->callback([&] { rc = run_envprep(env); });

    MapArgs shade;
    auto* c_shade = sub("shade", "Shading map T.L");
    c_shade->add_option("--transport", shade.transport)->required();
    c_shade->add_option("--mask", shade.mask)->required();
    c_shade->add_option("--light", shade.light, "light.json or lights.json#ID")->required();
    c_shade->add_option("--out", shade.out, ".pfm or .png")->required();
    c_shade->callback([&] { rc = run_shade(shade); });

    MapArgs rel;
    auto* c_rel = sub("relight", "Compose albedo with T.L");
    c_rel->add_option("--albedo", rel.albedo)->required();
    c_rel->add_option("--transport", rel.transport)->required();
    c_rel->add_option("--mask", rel.mask)->required();
    c_rel->add_option("--light", rel.light, "light.json or lights.json#ID")->required();
    c_rel->add_option("--out", rel.out, ".pfm or .png")->required();
    c_rel->callback([&] { rc = run_relight(rel); });

    SweepArgs sw;
    auto* c_sw = sub("sweep", "Relight under a light rotating about +y");
    c_sw->add_option("--albedo", sw.maps.albedo)->required();
    c_sw->add_option("--transport", sw.maps.transport)->required();
    c_sw->add_option("--mask", sw.maps.mask)->required();
    c_sw->add_option("--light", sw.maps.light)->required();
    c_sw->add_option("--out", sw.maps.out, "Output directory")->required();
    c_sw->add_option("--frames", sw.frames)->capture_default_str()->check(CLI::PositiveNumber);
    c_sw->add_option("--step", sw.step, "Degrees per frame")->capture_default_str();
    c_sw->add_option("--format", sw.format)->capture_default_str()->check(CLI::IsMember({"png", "pfm"}));
    c_sw->callback([&] { rc = run_sweep(sw); });

    TransferArgs tr;
    auto* c_tr = sub("transfer", "Swap the lights of two decompositions");
    c_tr->add_option("--a", tr.a, "Directory with albedo, transport, mask and light")->required();
    c_tr->add_option("--b", tr.b)->required();
    c_tr->add_option("--out", tr.out)->required();
    c_tr->add_option("--format", tr.format)->capture_default_str()->check(CLI::IsMember({"png", "pfm"}));
    c_tr->callback([&] { rc = run_transfer(tr); });

    EstimateArgs est;
    auto* c_est = sub("estimate-light", "Least-squares SH light from shading and transport");
    c_est->add_option("--shading", est.shading);
    c_est->add_option("--image", est.image);
    c_est->add_option("--albedo", est.albedo);
    c_est->add_option("--transport", est.transport);
    c_est->add_option("--normal", est.normal);
    c_est->add_option("--mask", est.mask)->required();
    c_est->add_option("--out", est.out)->required();
    c_est->callback([&] { rc = run_estimate(est); });

    EvaluateArgs ev;
    auto* c_ev = sub("evaluate", "RMSE, SSIM and the 15 losses between two map directories");
    c_ev->add_option("--pred", ev.pred)->required();
    c_ev->add_option("--gt", ev.gt)->required();
    c_ev->add_option("--out", ev.out, "report.json")->required();
    c_ev->callback([&] { rc = run_evaluate(ev); });

    DemoArgs demo;
    auto* c_demo = sub("demo", "End-to-end run on the builtin sphere, wedge and figure scenes");
    c_demo->add_option("--out", demo.out)->required();
    c_demo->add_option("--size", demo.size)->capture_default_str()->check(CLI::PositiveNumber);
    c_demo->add_option("--samples", demo.samples)->capture_default_str()->check(CLI::PositiveNumber);
    c_demo->callback([&] { rc = run_demo(demo); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const prt::ArgumentError& e) {
        std::cerr << "prt: error: " << e.what() << "\n";
        return 1;
    } catch (const prt::DataError& e) {
        std::cerr << "prt: error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "prt: error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
