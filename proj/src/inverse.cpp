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

#include <prt/inverse.h>

#include <prt/error.h>
#include <prt/parallel.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace prt {

namespace {

constexpr std::size_t kBlockPixels = 4096;

struct Normal {
    Eigen::Matrix<double, 9, 9> gram = Eigen::Matrix<double, 9, 9>::Zero();
    Eigen::Matrix<double, 9, 3> rhs = Eigen::Matrix<double, 9, 3>::Zero();
    std::size_t count = 0;

    void add(const Normal& o) {
        gram += o.gram;
        rhs += o.rhs;
        count += o.count;
    }
};

// Pairwise reduction over fixed blocks, so the sum order is independent of
// the thread count.
Normal reduce(std::vector<Normal>& parts, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return parts[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    Normal a = reduce(parts, lo, mid);
    a.add(reduce(parts, mid, hi));
    return a;
}

double observed_at(const MapImage& observed, std::size_t p, int c) {
    const auto v = observed.pixel(p);
    return v[observed.channels() == 3 ? c : 0];
}

}  // namespace

LightEstimate estimate_light(const MapImage& observed, const MapImage& transport, const MapImage& mask,
                             unsigned threads) {
    require_same_size(observed, transport, "estimate_light");
    require_same_size(mask, transport, "estimate_light mask");
    if (transport.channels() != 9) throw DataError("estimate_light: transport map needs 9 channels");
    if (observed.channels() != 1 && observed.channels() != 3) {
        throw DataError("estimate_light: observed map needs 1 or 3 channels");
    }
    const std::size_t n = transport.pixel_count();
    const std::size_t blocks = std::max<std::size_t>(1, (n + kBlockPixels - 1) / kBlockPixels);
    std::vector<Normal> parts(blocks);
    parallel_for(blocks, threads, 1, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            Normal& acc = parts[b];
            const std::size_t end = std::min(n, (b + 1) * kBlockPixels);
            for (std::size_t p = b * kBlockPixels; p < end; ++p) {
                if (!mask_on(mask, p)) continue;
                Eigen::Matrix<double, 9, 1> t;
                const auto tp = transport.pixel(p);
                for (int i = 0; i < 9; ++i) t[i] = tp[i];
                acc.gram.selfadjointView<Eigen::Lower>().rankUpdate(t);
                for (int c = 0; c < 3; ++c) acc.rhs.col(c) += t * observed_at(observed, p, c);
                ++acc.count;
            }
        }
    });
    Normal total = reduce(parts, 0, parts.size());
    if (total.count < 9) {
        throw DataError("estimate_light needs at least 9 mask pixels, got " + std::to_string(total.count));
    }
    Eigen::Matrix<double, 9, 9> gram = total.gram.selfadjointView<Eigen::Lower>();
    if (gram.cwiseAbs().maxCoeff() == 0.0) throw DataError("estimate_light: transport is zero on the mask");

    LightEstimate out;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> eig(gram);
    const auto& lambda = eig.eigenvalues();
    const double lmax = lambda.maxCoeff();
    const double lmin = std::max(lambda.minCoeff(), 0.0);
    out.condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    Eigen::Matrix<double, 9, 3> coeffs;
    if (out.condition <= kMaxCondition) {
        coeffs = gram.llt().solve(total.rhs);
    } else {
        out.rank_deficient = true;
        Eigen::Matrix<double, 9, 1> inv = Eigen::Matrix<double, 9, 1>::Zero();
        for (int i = 0; i < 9; ++i) {
            if (lambda[i] > lmax / kMaxCondition) inv[i] = 1.0 / lambda[i];
        }
        coeffs = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose() * total.rhs;
    }
    for (int i = 0; i < 9; ++i) {
        for (int c = 0; c < 3; ++c) out.light.coeffs[i][c] = coeffs(i, c);
    }
    if (!out.light.finite()) throw DataError("estimate_light produced non-finite coefficients");

    double sq = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        if (!mask_on(mask, p)) continue;
        const auto tp = transport.pixel(p);
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int i = 0; i < 9; ++i) s += double(tp[i]) * coeffs(i, c);
            const double r = s - observed_at(observed, p, c);
            sq += r * r;
        }
    }
    out.residual = std::sqrt(sq / double(3 * total.count));
    return out;
}

AlbedoEstimate recover_albedo(const MapImage& image, const MapImage& shading, const MapImage& mask, double epsilon) {
    require_same_size(image, shading, "recover_albedo");
    require_same_size(image, mask, "recover_albedo mask");
    if (!(epsilon > 0.0)) throw ArgumentError("recover_albedo epsilon must be positive");
    for (const MapImage* m : {&image, &shading}) {
        if (m->channels() != 1 && m->channels() != 3) throw DataError("recover_albedo needs 1 or 3 channel maps");
    }
    AlbedoEstimate out{MapImage(image.width(), image.height(), 3, MapKind::Albedo),
                       MapImage(image.width(), image.height(), 1, MapKind::Mask)};
    const int ci = image.channels(), cs = shading.channels();
    for (std::size_t p = 0; p < image.pixel_count(); ++p) {
        if (!mask_on(mask, p)) continue;
        bool valid = true;
        auto a = out.albedo.pixel(p);
        for (int c = 0; c < 3; ++c) {
            const double s = shading.pixel(p)[cs == 3 ? c : 0];
            if (s < epsilon) valid = false;
            a[c] = float(image.pixel(p)[ci == 3 ? c : 0] / std::max(s, epsilon));
        }
        out.valid.data()[p] = valid ? 1.0f : 0.0f;
    }
    return out;
}

}  // namespace prt
