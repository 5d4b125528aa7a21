// Copyright 2026 The qstrength Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Barnsley's fern by the chaos game: repeatedly apply one of four affine
// maps chosen at random with fixed probabilities.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qstrength/random.hpp"

namespace qstrength::fern {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// x -> linear * x + translation, chosen with `probability`.
struct AffineMap2D {
  double linear[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  Point translation;
  double probability = 0.0;
};

struct IfsSystem {
  std::vector<AffineMap2D> maps;

  void validate() const {
    if (maps.empty()) throw std::invalid_argument("IFS needs at least one map");
    double total = 0.0;
    for (const auto& m : maps) {
      if (!(m.probability >= 0.0 && m.probability <= 1.0)) {
        throw std::invalid_argument("map probability outside [0, 1]");
      }
      total += m.probability;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("map probabilities must sum to 1");
    }
  }
};

struct PointCloud2D {
  std::vector<Point> points;
  /// Index of the map that produced each point.
  std::vector<std::uint8_t> map_index;
  std::uint64_t seed = 0;
  long iterations = 0;
  long burn_in = 0;
};

inline IfsSystem barnsley_fern_system() {
  return IfsSystem{{
      {{{0.0, 0.0}, {0.0, 0.16}}, {0.0, 0.0}, 0.01},
      {{{0.85, 0.04}, {-0.04, 0.85}}, {0.0, 1.6}, 0.85},
      {{{0.2, -0.26}, {0.23, 0.22}}, {0.0, 1.6}, 0.07},
      {{{-0.15, 0.28}, {0.26, 0.24}}, {0.0, 0.44}, 0.07},
  }};
}

inline Point apply_map(const AffineMap2D& m, const Point& p) {
  return {m.linear[0][0] * p.x + m.linear[0][1] * p.y + m.translation.x,
          m.linear[1][0] * p.x + m.linear[1][1] * p.y + m.translation.y};
}

/// Running sums of the map probabilities; a uniform draw u selects the first
/// map whose cumulative sum exceeds u.
inline std::vector<double> cumulative_thresholds(const IfsSystem& sys) {
  std::vector<double> cum;
  double acc = 0.0;
  for (const auto& m : sys.maps) {
    acc += m.probability;
    cum.push_back(acc);
  }
  return cum;
}

inline std::size_t select_map(const std::vector<double>& cum, double u) {
  for (std::size_t i = 0; i < cum.size(); ++i) {
    if (u < cum[i]) return i;
  }
  return cum.size() - 1;
}

/// Runs `iterations` steps from `start` and keeps the points after the
/// first `burn_in` steps.
inline PointCloud2D chaos_game(const IfsSystem& sys, Point start, long iterations,
                               long burn_in, std::uint64_t seed) {
  if (burn_in < 0 || iterations <= burn_in) {
    throw std::invalid_argument("chaos_game: need iterations > burn_in >= 0");
  }
  sys.validate();
  const auto cum = cumulative_thresholds(sys);
  Rng rng(seed);
  PointCloud2D cloud;
  cloud.seed = seed;
  cloud.iterations = iterations;
  cloud.burn_in = burn_in;
  cloud.points.reserve(static_cast<std::size_t>(iterations - burn_in));
  cloud.map_index.reserve(static_cast<std::size_t>(iterations - burn_in));
  Point p = start;
  for (long step = 0; step < iterations; ++step) {
    const std::size_t k = select_map(cum, rng.uniform());
    p = apply_map(sys.maps[k], p);
    if (step >= burn_in) {
      cloud.points.push_back(p);
      cloud.map_index.push_back(static_cast<std::uint8_t>(k));
    }
  }
  return cloud;
}

struct BoundingBox {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;

  bool contains(const Point& p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
};

/// Envelope of the fern attractor. A 10^7-step pilot run (seed 1, burn-in
/// 20) spans x in [-2.18192, 2.65578], y in [0.00870, 9.99826]; the box is
/// that range rounded outward to 1e-3, with ymin at 0 because the origin (the
/// fixed point of the first map) lies on the attractor.
inline constexpr BoundingBox kFernEnvelope{-2.182, 2.656, 0.0, 9.999};

struct Raster {
  int width = 0;
  int height = 0;
  /// Row-major, row 0 at the top (ymax).
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(col)];
  }
  double nonzero_fraction() const {
    if (pixels.empty()) return 0.0;
    const auto nz = std::count_if(pixels.begin(), pixels.end(),
                                  [](std::uint8_t v) { return v != 0; });
    return static_cast<double>(nz) / static_cast<double>(pixels.size());
  }
};

/// Hit-count histogram scaled as 255 * log(1 + hits) / log(1 + max hits).
/// Points outside `box` are ignored.
inline Raster rasterize(const PointCloud2D& cloud, int width, int height,
                        const BoundingBox& box) {
  if (width < 1 || height < 1) throw std::invalid_argument("raster size must be >= 1");
  if (!(box.xmax > box.xmin) || !(box.ymax > box.ymin)) {
    throw std::invalid_argument("degenerate bounding box");
  }
  std::vector<std::uint64_t> hits(static_cast<std::size_t>(width) *
                                  static_cast<std::size_t>(height));
  for (const Point& p : cloud.points) {
    if (!box.contains(p)) continue;
    const double fx = (p.x - box.xmin) / (box.xmax - box.xmin) * width;
    const double fy = (box.ymax - p.y) / (box.ymax - box.ymin) * height;
    const int col = std::min(width - 1, static_cast<int>(fx));
    const int row = std::min(height - 1, static_cast<int>(fy));
    ++hits[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(col)];
  }
  Raster r{width, height, std::vector<std::uint8_t>(hits.size(), 0)};
  const std::uint64_t peak = hits.empty() ? 0 : *std::max_element(hits.begin(), hits.end());
  if (peak == 0) return r;
  const double scale = 255.0 / std::log1p(static_cast<double>(peak));
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i] == 0) continue;
    const double v = std::round(scale * std::log1p(static_cast<double>(hits[i])));
    r.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 1.0, 255.0));
  }
  return r;
}

}  // namespace qstrength::fern
