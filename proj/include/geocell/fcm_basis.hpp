// Copyright 2026 The Geocell Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "geocell/vec.hpp"

namespace geocell {

constexpr int kMaxShapeDegree = 8;

/// 1D hierarchic basis on [-1, 1]: the two linear nodal functions followed
/// by integrated Legendre bubbles of order 2..p (Szabo-Babuska
/// normalization). `values` and `derivs` receive p+1 entries; `derivs` may
/// be null.
void shape_functions_1d(int p, double xi, double* values, double* derivs);

}  // namespace geocell
