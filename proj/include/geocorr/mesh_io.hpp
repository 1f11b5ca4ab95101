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

#include <filesystem>
#include <optional>

namespace geocorr {

/// Loads a Wavefront OBJ or ASCII PLY triangle mesh, chosen by extension.
/// Vertex order is preserved from the file.
TriMesh load_mesh(const std::filesystem::path& path);
TriMesh parse_obj(std::string_view text, const std::string& origin = "<obj>");
TriMesh parse_ply(std::string_view text, const std::string& origin = "<ply>");

void save_obj(const TriMesh& mesh, const std::filesystem::path& path);
std::string format_obj(const TriMesh& mesh);

/// ASCII PLY; `colors` (n x 3, 0..255) adds uchar red/green/blue properties.
void save_ply(const TriMesh& mesh, const std::filesystem::path& path,
              const std::optional<Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>>& colors = std::nullopt);

/// One integer per line; line k belongs to vertex k.
Labels load_labels(const std::filesystem::path& path);
void save_labels(const Labels& labels, const std::filesystem::path& path);
/// Same layout as labels; used for ground-truth correspondence files.
std::vector<int> load_indices(const std::filesystem::path& path);

}  // namespace geocorr
