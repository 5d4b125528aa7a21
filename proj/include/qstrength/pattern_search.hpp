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

#pragma once

#include <algorithm>
#include <cstddef>
#include <numbers>
#include <vector>

namespace qstrength {

struct PatternSearchOptions {
  double initial_step = std::numbers::pi / 8.0;
  double min_step = 1e-10;
  int max_sweeps = 500;
  bool pattern_moves = true;
};

struct PatternSearchResult {
  std::vector<double> x;
  double value = 0.0;
  std::vector<double> history;  // best value after each sweep
  int sweeps = 0;
  bool converged = false;  // step fell below min_step
};

/// Compass search: poll +/- step along each coordinate, move on the first
/// strict decrease, halve the step after a sweep with no move. With
/// `pattern_moves`, a productive sweep is followed by one extrapolated trial
/// along its net displacement.
template <class Objective>
PatternSearchResult compass_search(Objective&& f, std::vector<double> x,
                                   const PatternSearchOptions& opts) {
  PatternSearchResult res;
  double fx = f(x);
  double step = opts.initial_step;
  std::vector<double> sweep_start = x;
  std::vector<double> trial(x.size());
  while (res.sweeps < opts.max_sweeps) {
    bool moved = false;
    sweep_start = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double orig = x[i];
      for (const double dir : {1.0, -1.0}) {
        x[i] = orig + dir * step;
        const double fy = f(x);
        if (fy < fx) {
          fx = fy;
          moved = true;
          break;
        }
        x[i] = orig;
      }
    }
    if (moved && opts.pattern_moves) {
      // Hooke-Jeeves acceleration: repeat the net displacement of the sweep.
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = 2.0 * x[i] - sweep_start[i];
      const double ft = f(trial);
      if (ft < fx) {
        fx = ft;
        x.swap(trial);
      }
    }
    ++res.sweeps;
    res.history.push_back(fx);
    if (!moved) {
      step *= 0.5;
      if (step < opts.min_step) {
        res.converged = true;
        break;
      }
    }
  }
  res.x = std::move(x);
  res.value = fx;
  return res;
}

}  // namespace qstrength
