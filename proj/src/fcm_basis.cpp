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

#include "geocell/fcm_basis.hpp"

#include <cmath>

namespace geocell {

void shape_functions_1d(int p, double xi, double* values, double* derivs) {
  if (p < 1 || p > kMaxShapeDegree) throw Error("shape functions: degree must be in [1, 8]");
  values[0] = 0.5 * (1.0 - xi);
  values[1] = 0.5 * (1.0 + xi);
  if (derivs) {
    derivs[0] = -0.5;
    derivs[1] = 0.5;
  }
  if (p == 1) return;

  // Legendre values up to P_p; bubbles are
  //   N_j(xi) = (P_j - P_{j-2}) / sqrt(2 (2j - 1)),   N_j(+-1) = 0,
  // with derivative sqrt((2j - 1) / 2) * P_{j-1}.
  double leg[kMaxShapeDegree + 1];
  leg[0] = 1.0;
  leg[1] = xi;
  for (int j = 2; j <= p; ++j)
    leg[j] = ((2.0 * j - 1.0) * xi * leg[j - 1] - (j - 1.0) * leg[j - 2]) / j;
  for (int j = 2; j <= p; ++j) {
    double c = std::sqrt(2.0 * (2.0 * j - 1.0));
    values[j] = (leg[j] - leg[j - 2]) / c;
    if (derivs) derivs[j] = std::sqrt((2.0 * j - 1.0) / 2.0) * leg[j - 1];
  }
}

}  // namespace geocell
