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
#include "geocorr/primitives.hpp"

#include "geocorr/augment.hpp"

namespace geocorr {

TriMesh make_tetrahedron(double edge) {
  Points v(4, 3);
  const double s = edge / (2.0 * std::sqrt(2.0));
  v << s, s, s, s, -s, -s, -s, s, -s, -s, -s, s;
  Triangles f(4, 3);
  f << 0, 1, 2, 0, 3, 1, 0, 2, 3, 1, 3, 2;
  return TriMesh(std::move(v), std::move(f));
}

TriMesh make_icosphere(double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Points v(12, 3);
  v << -1, t, 0, 1, t, 0, -1, -t, 0, 1, -t, 0, 0, -1, t, 0, 1, t, 0, -1, -t, 0, 1, -t, t, 0, -1, t, 0, 1, -t, 0, -1,
      -t, 0, 1;
  Triangles f(20, 3);
  f << 0, 11, 5, 0, 5, 1, 0, 1, 7, 0, 7, 10, 0, 10, 11, 1, 5, 9, 5, 11, 4, 11, 10, 2, 10, 7, 6, 7, 1, 8, 3, 9, 4, 3, 4,
      2, 3, 2, 6, 3, 6, 8, 3, 8, 9, 4, 9, 5, 2, 4, 11, 6, 2, 10, 8, 6, 7, 9, 8, 1;
  for (int s = 0; s < subdivisions; ++s) {
    Subdivision sub = midpoint_subdivide(v, f);
    v = std::move(sub.vertices);
    f = std::move(sub.faces);
  }
  v.rowwise().normalize();
  return TriMesh(v * radius, std::move(f));
}

TriMesh make_grid(int nx, int ny, double spacing) {
  Points v(static_cast<Index>(nx) * ny, 3);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) v.row(j * nx + i) << i * spacing, j * spacing, 0.0;
  }
  Triangles f(2 * static_cast<Index>(nx - 1) * (ny - 1), 3);
  Index k = 0;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const int a = j * nx + i, b = a + 1, c = a + nx, d = c + 1;
      f.row(k++) << a, b, d;
      f.row(k++) << a, d, c;
    }
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh make_strip(int columns, double spacing, double width) {
  Points v(2 * static_cast<Index>(columns), 3);
  for (int i = 0; i < columns; ++i) {
    v.row(i) << i * spacing, 0.0, 0.0;
    v.row(columns + i) << i * spacing, width, 0.0;
  }
  Triangles f(2 * static_cast<Index>(columns - 1), 3);
  for (int i = 0; i + 1 < columns; ++i) {
    f.row(2 * i) << i, i + 1, columns + i + 1;
    f.row(2 * i + 1) << i, columns + i + 1, columns + i;
  }
  return TriMesh(std::move(v), std::move(f));
}

}  // namespace geocorr
