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

#include <prt/mesh.h>

#include <prt/error.h>
#include <prt/map_io.h>
#include <prt/sampling.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace prt {

namespace fs = std::filesystem;

Vec3 Texture::texel(int x, int y) const {
    x = ((x % width) + width) % width;
    y = ((y % height) + height) % height;
    const std::size_t i = (std::size_t(y) * width + x) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

Vec3 Texture::sample(double u, double v) const {
    const double fx = u * width - 0.5;
    const double fy = (1.0 - v) * height - 0.5;
    const double x0 = std::floor(fx), y0 = std::floor(fy);
    const double tx = fx - x0, ty = fy - y0;
    const int ix = int(x0), iy = int(y0);
    return texel(ix, iy) * ((1 - tx) * (1 - ty)) + texel(ix + 1, iy) * (tx * (1 - ty)) +
           texel(ix, iy + 1) * ((1 - tx) * ty) + texel(ix + 1, iy + 1) * (tx * ty);
}

Bounds3 TriMesh::bounds() const {
    Bounds3 b;
    for (const Vec3& p : positions) b.extend(p);
    return b;
}

Vec3 TriMesh::albedo(std::size_t tri, double b1, double b2) const {
    const auto& t = triangles[tri];
    const double b0 = 1.0 - b1 - b2;
    const Material* mat = material_ids.empty() ? nullptr : &materials[material_ids[tri]];
    if (mat && mat->diffuse_map && !uvs.empty()) {
        const auto& a = uvs[t[0]];
        const auto& b = uvs[t[1]];
        const auto& c = uvs[t[2]];
        return mat->diffuse_map->sample(b0 * a[0] + b1 * b[0] + b2 * c[0], b0 * a[1] + b1 * b[1] + b2 * c[1]);
    }
    if (!colors.empty()) return colors[t[0]] * b0 + colors[t[1]] * b1 + colors[t[2]] * b2;
    if (mat) return mat->kd;
    return {kDefaultAlbedo, kDefaultAlbedo, kDefaultAlbedo};
}

void TriMesh::validate() const {
    if (triangles.empty()) throw DataError("mesh has no triangles");
    if (normals.size() != positions.size()) throw DataError("mesh needs one normal per vertex");
    if (!uvs.empty() && uvs.size() != positions.size()) throw DataError("mesh uv count mismatch");
    if (!colors.empty() && colors.size() != positions.size()) throw DataError("mesh color count mismatch");
    if (!material_ids.empty() && material_ids.size() != triangles.size()) {
        throw DataError("mesh material id count mismatch");
    }
    for (const auto& t : triangles) {
        for (auto i : t) {
            if (i >= positions.size()) throw DataError("triangle index out of range");
        }
    }
    for (auto m : material_ids) {
        if (m >= materials.size()) throw DataError("material index out of range");
    }
    for (const Vec3& n : normals) {
        if (std::abs(length(n) - 1.0) > 1e-3) throw DataError("vertex normal is not unit length");
    }
}

void TriMesh::compute_normals() {
    std::vector<Vec3> acc(positions.size());
    for (const auto& t : triangles) {
        // Unnormalized cross product: length is twice the area.
        const Vec3 n = cross(positions[t[1]] - positions[t[0]], positions[t[2]] - positions[t[0]]);
        for (auto i : t) acc[i] += n;
    }
    normals.resize(positions.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        const Vec3 n = normalize(acc[i]);
        normals[i] = length(n) > 0.5 ? n : Vec3{0, 0, 1};
    }
}

void TriMesh::append(const TriMesh& other) {
    const auto base = std::uint32_t(positions.size());
    const bool had_uvs = !uvs.empty() || positions.empty();
    const bool had_colors = !colors.empty() || positions.empty();
    positions.insert(positions.end(), other.positions.begin(), other.positions.end());
    normals.insert(normals.end(), other.normals.begin(), other.normals.end());
    if (had_uvs && !other.uvs.empty()) uvs.insert(uvs.end(), other.uvs.begin(), other.uvs.end());
    else uvs.clear();
    if (had_colors && !other.colors.empty()) colors.insert(colors.end(), other.colors.begin(), other.colors.end());
    else colors.clear();
    for (auto t : other.triangles) triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    if (!other.material_ids.empty() || !material_ids.empty()) {
        // Merged meshes fall back to per-triangle Kd materials.
        const auto mat_base = std::uint32_t(materials.size());
        if (material_ids.empty()) {
            materials.push_back(Material{});
            material_ids.assign(triangles.size() - other.triangles.size(), mat_base);
        }
        const auto other_base = std::uint32_t(materials.size());
        if (other.material_ids.empty()) {
            materials.push_back(Material{});
            material_ids.insert(material_ids.end(), other.triangles.size(), other_base);
        } else {
            materials.insert(materials.end(), other.materials.begin(), other.materials.end());
            for (auto m : other.material_ids) material_ids.push_back(m + other_base);
        }
    }
}

namespace {

struct ObjIndex {
    long v = 0, vt = 0, vn = 0;
    auto operator<=>(const ObjIndex&) const = default;
};

long resolve_index(long idx, std::size_t count, std::size_t line) {
    const long n = long(count);
    const long r = idx < 0 ? n + idx : idx - 1;
    if (r < 0 || r >= n) throw DataError("OBJ index out of range at line " + std::to_string(line));
    return r;
}

ObjIndex parse_corner(const std::string& tok, std::size_t line) {
    ObjIndex out;
    long* fields[3] = {&out.v, &out.vt, &out.vn};
    std::size_t start = 0;
    for (int f = 0; f < 3 && start <= tok.size(); ++f) {
        const std::size_t end = std::min(tok.find('/', start), tok.size());
        if (end > start) {
            long value = 0;
            auto [p, ec] = std::from_chars(tok.data() + start, tok.data() + end, value);
            if (ec != std::errc() || p != tok.data() + end) {
                throw DataError("bad OBJ face token '" + tok + "' at line " + std::to_string(line));
            }
            *fields[f] = value;
        }
        start = end + 1;
    }
    if (out.v == 0) throw DataError("OBJ face without vertex index at line " + std::to_string(line));
    return out;
}

std::shared_ptr<const Texture> load_texture(const fs::path& path) {
    const Image8 img = read_png8(path);
    auto tex = std::make_shared<Texture>();
    tex->width = img.width;
    tex->height = img.height;
    tex->rgb.resize(std::size_t(img.width) * img.height * 3);
    for (std::size_t i = 0; i < std::size_t(img.width) * img.height; ++i) {
        for (int c = 0; c < 3; ++c) {
            const int src = img.channels >= 3 ? c : 0;
            tex->rgb[i * 3 + c] = float(srgb_to_linear(img.pixels[i * img.channels + src] / 255.0));
        }
    }
    return tex;
}

std::vector<Material> load_mtl(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open material library " + path.string());
    std::vector<Material> out;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') continue;
        if (key == "newmtl") {
            out.push_back(Material{});
            ls >> out.back().name;
        } else if (out.empty()) {
            continue;
        } else if (key == "Kd") {
            Vec3 kd;
            ls >> kd.x >> kd.y >> kd.z;
            out.back().kd = kd;
        } else if (key == "map_Kd") {
            std::string file;
            // Options such as -s are not supported; the last token is the file.
            for (std::string tok; ls >> tok;) file = tok;
            out.back().diffuse_map = load_texture(path.parent_path() / file);
        }
    }
    return out;
}

}  // namespace

TriMesh load_mesh(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open mesh " + path.string());

    std::vector<Vec3> v, vn, vcolor;
    std::vector<std::array<double, 2>> vt;
    std::vector<Material> materials;
    std::map<std::string, std::uint32_t> material_index;
    std::map<ObjIndex, std::uint32_t> vertex_index;
    bool has_colors = false;
    long current_material = -1;

    TriMesh mesh;
    std::vector<char> normal_given;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') continue;
        if (key == "v") {
            Vec3 p, c{kDefaultAlbedo, kDefaultAlbedo, kDefaultAlbedo};
            if (!(ls >> p.x >> p.y >> p.z)) throw DataError("bad vertex at line " + std::to_string(line_no));
            double r, g, b;
            if (ls >> r >> g >> b) {
                has_colors = true;
                c = {srgb_to_linear(r), srgb_to_linear(g), srgb_to_linear(b)};
            }
            v.push_back(p);
            vcolor.push_back(c);
        } else if (key == "vn") {
            Vec3 n;
            if (!(ls >> n.x >> n.y >> n.z)) throw DataError("bad normal at line " + std::to_string(line_no));
            vn.push_back(normalize(n));
        } else if (key == "vt") {
            std::array<double, 2> uv{};
            if (!(ls >> uv[0] >> uv[1])) throw DataError("bad uv at line " + std::to_string(line_no));
            vt.push_back(uv);
        } else if (key == "mtllib") {
            std::string file;
            ls >> file;
            for (auto& m : load_mtl(path.parent_path() / file)) {
                material_index[m.name] = std::uint32_t(materials.size());
                materials.push_back(std::move(m));
            }
        } else if (key == "usemtl") {
            std::string name;
            ls >> name;
            auto it = material_index.find(name);
            current_material = it == material_index.end() ? -1 : long(it->second);
        } else if (key == "f") {
            std::vector<std::uint32_t> poly;
            for (std::string tok; ls >> tok;) {
                ObjIndex idx = parse_corner(tok, line_no);
                idx.v = resolve_index(idx.v, v.size(), line_no);
                idx.vt = idx.vt ? resolve_index(idx.vt, vt.size(), line_no) : -1;
                idx.vn = idx.vn ? resolve_index(idx.vn, vn.size(), line_no) : -1;
                auto [it, inserted] = vertex_index.try_emplace(idx, std::uint32_t(mesh.positions.size()));
                if (inserted) {
                    mesh.positions.push_back(v[idx.v]);
                    mesh.colors.push_back(vcolor[idx.v]);
                    mesh.uvs.push_back(idx.vt >= 0 ? vt[idx.vt] : std::array<double, 2>{0, 0});
                    mesh.normals.push_back(idx.vn >= 0 ? vn[idx.vn] : Vec3{});
                    normal_given.push_back(idx.vn >= 0);
                }
                poly.push_back(it->second);
            }
            if (poly.size() < 3) throw DataError("face with fewer than 3 vertices at line " + std::to_string(line_no));
            for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
                mesh.triangles.push_back({poly[0], poly[k], poly[k + 1]});
                mesh.material_ids.push_back(current_material < 0 ? 0u : std::uint32_t(current_material) + 1);
            }
        }
    }
    if (mesh.triangles.empty()) throw DataError("mesh has no triangles: " + path.string());

    // Slot 0 is the default material for faces without usemtl.
    mesh.materials.push_back(Material{"default", {kDefaultAlbedo, kDefaultAlbedo, kDefaultAlbedo}, nullptr});
    mesh.materials.insert(mesh.materials.end(), materials.begin(), materials.end());
    if (!has_colors) mesh.colors.clear();
    if (vt.empty()) mesh.uvs.clear();

    if (std::find(normal_given.begin(), normal_given.end(), 0) != normal_given.end()) {
        // Area-weighted normals accumulated per OBJ position so uv seams stay smooth.
        std::vector<Vec3> acc(v.size());
        std::vector<long> pos_of(mesh.positions.size());
        for (const auto& [idx, out] : vertex_index) pos_of[out] = idx.v;
        for (const auto& t : mesh.triangles) {
            const Vec3 n = cross(mesh.positions[t[1]] - mesh.positions[t[0]], mesh.positions[t[2]] - mesh.positions[t[0]]);
            for (auto i : t) acc[std::size_t(pos_of[i])] += n;
        }
        for (std::size_t i = 0; i < mesh.positions.size(); ++i) {
            if (normal_given[i]) continue;
            const Vec3 n = normalize(acc[std::size_t(pos_of[i])]);
            mesh.normals[i] = length(n) > 0.5 ? n : Vec3{0, 0, 1};
        }
    }
    for (Vec3& n : mesh.normals) {
        if (length(n) < 0.5) n = {0, 0, 1};
    }
    mesh.validate();
    return mesh;
}

void save_obj(const TriMesh& mesh, const fs::path& path) {
    std::ostringstream out;
    out.precision(9);
    for (const Vec3& p : mesh.positions) out << "v " << p.x << ' ' << p.y << ' ' << p.z << '\n';
    for (const Vec3& n : mesh.normals) out << "vn " << n.x << ' ' << n.y << ' ' << n.z << '\n';
    for (const auto& t : mesh.triangles) {
        out << "f";
        for (auto i : t) out << ' ' << (i + 1) << "//" << (i + 1);
        out << '\n';
    }
    write_text_file(path, out.str());
}

namespace shapes {

namespace {

struct ProfilePoint {
    Vec3 base;      // point on the axis
    double radial;  // distance from the axis
    double axial;   // offset along the axis from base
    double n_radial, n_axial;
};

// Surface of revolution around `axis`; triangles are oriented along the
// analytic normals.
TriMesh lathe(const std::vector<ProfilePoint>& profile, const Vec3& axis, int slices) {
    Vec3 t, b;
    tangent_frame(axis, t, b);
    TriMesh mesh;
    for (const auto& p : profile) {
        for (int j = 0; j < slices; ++j) {
            const double phi = 2.0 * kPi * j / slices;
            const Vec3 radial_dir = t * std::cos(phi) + b * std::sin(phi);
            mesh.positions.push_back(p.base + axis * p.axial + radial_dir * p.radial);
            mesh.normals.push_back(normalize(radial_dir * p.n_radial + axis * p.n_axial));
        }
    }
    auto id = [&](std::size_t k, int j) { return std::uint32_t(k * slices + ((j % slices) + slices) % slices); };
    auto emit = [&](std::uint32_t a, std::uint32_t c, std::uint32_t d) {
        const Vec3& pa = mesh.positions[a];
        Vec3 n = cross(mesh.positions[c] - pa, mesh.positions[d] - pa);
        if (length(n) < 1e-14) return;
        if (dot(n, mesh.normals[a] + mesh.normals[c] + mesh.normals[d]) < 0) std::swap(c, d);
        mesh.triangles.push_back({a, c, d});
    };
    for (std::size_t k = 0; k + 1 < profile.size(); ++k) {
        for (int j = 0; j < slices; ++j) {
            emit(id(k, j), id(k + 1, j), id(k + 1, j + 1));
            emit(id(k, j), id(k + 1, j + 1), id(k, j + 1));
        }
    }
    return mesh;
}

}  // namespace

TriMesh capsule(const Vec3& a, const Vec3& b, double radius, int rings, int slices) {
    const double len = length(b - a);
    const Vec3 axis = len > 0 ? (b - a) / len : Vec3{0, 1, 0};
    std::vector<ProfilePoint> profile;
    for (int i = 0; i <= rings; ++i) {
        const double ang = -kPi / 2 + (kPi / 2) * i / rings;
        profile.push_back({a, radius * std::cos(ang), radius * std::sin(ang), std::cos(ang), std::sin(ang)});
    }
    const int start = len > 0 ? 0 : 1;  // a sphere needs no duplicated equator
    for (int i = start; i <= rings; ++i) {
        const double ang = (kPi / 2) * i / rings;
        profile.push_back({b, radius * std::cos(ang), radius * std::sin(ang), std::cos(ang), std::sin(ang)});
    }
    return lathe(profile, axis, slices);
}

TriMesh uv_sphere(const Vec3& center, double radius, int stacks, int slices) {
    return capsule(center, center, radius, std::max(1, stacks / 2), slices);
}

TriMesh quad(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3, int subdivisions) {
    // Corners in counter-clockwise order seen from the front.
    const int n = std::max(1, subdivisions);
    const Vec3 normal = normalize(cross(p1 - p0, p3 - p0));
    TriMesh mesh;
    for (int j = 0; j <= n; ++j) {
        const double v = double(j) / n;
        for (int i = 0; i <= n; ++i) {
            const double u = double(i) / n;
            mesh.positions.push_back(p0 * ((1 - u) * (1 - v)) + p1 * (u * (1 - v)) + p2 * (u * v) + p3 * ((1 - u) * v));
            mesh.normals.push_back(normal);
            mesh.uvs.push_back({u, v});
        }
    }
    auto id = [&](int i, int j) { return std::uint32_t(j * (n + 1) + i); };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return mesh;
}

TriMesh box(const Vec3& lo, const Vec3& hi, bool inward) {
    const Vec3 c[8] = {{lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
                       {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
    // Outward CCW faces.
    const int faces[6][4] = {{4, 5, 6, 7}, {1, 0, 3, 2}, {5, 1, 2, 6}, {0, 4, 7, 3}, {7, 6, 2, 3}, {0, 1, 5, 4}};
    TriMesh mesh;
    for (const auto& f : faces) {
        TriMesh q = inward ? quad(c[f[3]], c[f[2]], c[f[1]], c[f[0]]) : quad(c[f[0]], c[f[1]], c[f[2]], c[f[3]]);
        mesh.append(q);
    }
    mesh.uvs.clear();
    return mesh;
}

TriMesh wedge(double arm, double half_extent, int subdivisions) {
    const double d = arm / std::sqrt(2.0);
    const double h = half_extent;
    // Right arm lies in x = z and faces (-1, 0, 1); left arm lies in x = -z and faces (1, 0, 1).
    TriMesh mesh = quad({0, -h, 0}, {d, -h, d}, {d, h, d}, {0, h, 0}, subdivisions);
    mesh.append(quad({-d, -h, d}, {0, -h, 0}, {0, h, 0}, {-d, h, d}, subdivisions));
    mesh.uvs.clear();
    return mesh;
}

TriMesh figure(int detail) {
    detail = std::max(1, detail);
    const int slices = 24 * detail, rings = 6 * detail;
    TriMesh mesh = capsule({0, 0.95, 0}, {0, 1.33, 0}, 0.17, rings, slices);  // torso
    mesh.append(capsule({0, 1.40, 0}, {0, 1.50, 0}, 0.05, rings, slices));     // neck
    mesh.append(uv_sphere({0, 1.62, 0.01}, 0.11, 2 * rings, slices));          // head
    for (double side : {-1.0, 1.0}) {
        mesh.append(capsule({side * 0.235, 1.40, 0}, {side * 0.28, 0.86, 0.02}, 0.05, rings, slices));  // arm
        mesh.append(capsule({side * 0.085, 0.90, 0}, {side * 0.10, 0.07, 0}, 0.07, rings, slices));     // leg
    }
    return mesh;
}

TriMesh sphere_and_wedge(int detail) {
    detail = std::max(1, detail);
    TriMesh mesh = wedge(1.2, 0.9, 4 * detail);
    mesh.append(uv_sphere({0, -0.35, 0.62}, 0.3, 32 * detail, 64 * detail));
    return mesh;
}

std::optional<TriMesh> builtin(const std::string& spec) {
    std::string name = spec;
    int detail = 1;
    if (auto colon = spec.find(':'); colon != std::string::npos) {
        name = spec.substr(0, colon);
        try {
            detail = std::stoi(spec.substr(colon + 1));
        } catch (const std::exception&) {
            return std::nullopt;
        }
        if (detail < 1) return std::nullopt;
    }
    if (name == "sphere") return uv_sphere({0, 0, 0}, 1.0, 64 * detail, 128 * detail);
    if (name == "wedge") return wedge(1.5, 1.0, 4 * detail);
    if (name == "figure") return figure(detail);
    if (name == "sphere_wedge") return sphere_and_wedge(detail);
    if (name == "cube") return box({-1, -1, -1}, {1, 1, 1});
    return std::nullopt;
}

}  // namespace shapes

}  // namespace prt
