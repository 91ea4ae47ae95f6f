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

/// A solid that can answer point membership. Implementations are immutable
/// and queries are concurrent-safe; bodies are closed (boundary included).
class Body {
 public:
  virtual ~Body() = default;
  virtual bool contains(Vec3 p) const = 0;
  /// Conservative world-space bounds: contains(p) implies bounding_box().contains(p).
  virtual Box3 bounding_box() const = 0;
};

}  // namespace geocell
