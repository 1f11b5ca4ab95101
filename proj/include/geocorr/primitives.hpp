// Copyright (c) 2026 The geocorr Authors. All Rights Reserved.
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

#include "geocorr/mesh.hpp"

namespace geocorr {

/// Regular tetrahedron with the given edge length.
TriMesh make_tetrahedron(double edge = 1.0);
/// Icosahedron refined `subdivisions` times and projected onto the sphere.
TriMesh make_icosphere(double radius, int subdivisions);
/// Flat nx-by-ny vertex grid in the z = 0 plane, split along one diagonal.
TriMesh make_grid(int nx, int ny, double spacing = 1.0);
/// Two-row triangle strip of `columns` columns (2 * columns vertices).
TriMesh make_strip(int columns, double spacing = 1.0, double width = 1.0);

}  // namespace geocorr
