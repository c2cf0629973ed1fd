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

#ifndef PRT_INVERSE_H
#define PRT_INVERSE_H

#include <prt/image.h>

namespace prt {

struct LightEstimate {
    ShLight light;
    double residual = 0.0;  // RMS over mask pixels and channels
    double condition = 1.0;  // of the 9x9 Gram matrix
    bool rank_deficient = false;
};

// Condition number above which the Gram matrix is treated as singular.
inline constexpr double kMaxCondition = 1e8;

// Per-channel least squares fit of `observed` (1 or 3 channels) by the
// transport vectors at mask pixels. Rank-deficient systems get the
// minimum-norm solution. Results do not depend on `threads`.
LightEstimate estimate_light(const MapImage& observed, const MapImage& transport, const MapImage& mask,
                             unsigned threads = 1);

struct AlbedoEstimate {
    MapImage albedo;  // 3 channels
    MapImage valid;   // Mask; 0 where any shading channel was below epsilon
};

AlbedoEstimate recover_albedo(const MapImage& image, const MapImage& shading, const MapImage& mask,
                              double epsilon = 1e-3);

}  // namespace prt

#endif  // PRT_INVERSE_H
