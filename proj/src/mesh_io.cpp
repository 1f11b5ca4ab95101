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
#include "geocorr/mesh_io.hpp"

#include "geocorr/binary_io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace geocorr {

namespace {

std::string lower_ext(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

[[noreturn]] void parse_fail(const std::string& origin, std::size_t line, const std::string& what) {
  data_error(origin + ": " + what + " at line " + std::to_string(line));
}

class LineCursor {
 public:
  explicit LineCursor(std::string_view text) : text_(text) {}
  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++number_;
    return true;
  }
  std::size_t number() const { return number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t number_ = 0;
};

TriMesh assemble(std::vector<double>& v, std::vector<int>& f) {
  if (v.empty() || f.empty()) data_error("empty mesh");
  Points pts = Eigen::Map<Points>(v.data(), static_cast<Index>(v.size() / 3), 3);
  Triangles tris = Eigen::Map<Triangles>(f.data(), static_cast<Index>(f.size() / 3), 3);
  return TriMesh(std::move(pts), std::move(tris));
}

}  // namespace

TriMesh parse_obj(std::string_view text, const std::string& origin) {
  std::vector<double> v;
  std::vector<int> f;
  std::vector<std::size_t> face_lines;
  LineCursor cursor(text);
  std::string_view line;
  while (cursor.next(line)) {
    auto tok = split_ws(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) parse_fail(origin, cursor.number(), "vertex needs three coordinates");
      for (int c = 1; c <= 3; ++c) {
        double x;
        if (!parse_number(tok[c], x)) parse_fail(origin, cursor.number(), "bad vertex coordinate");
        v.push_back(x);
      }
    } else if (tok[0] == "f") {
      if (tok.size() != 4) parse_fail(origin, cursor.number(), "non-triangular face");
      for (int c = 1; c <= 3; ++c) {
        std::string_view s = tok[c].substr(0, tok[c].find('/'));
        long idx;
        if (!parse_number(s, idx) || idx == 0) parse_fail(origin, cursor.number(), "bad face index");
        const long nv = static_cast<long>(v.size() / 3);
        const long zero_based = idx > 0 ? idx - 1 : nv + idx;
        if (zero_based < 0 || zero_based >= nv) parse_fail(origin, cursor.number(), "face index out of range");
        f.push_back(static_cast<int>(zero_based));
      }
      face_lines.push_back(cursor.number());
    }
  }
  for (std::size_t k = 0; k < face_lines.size(); ++k) {
    const int a = f[3 * k], b = f[3 * k + 1], c = f[3 * k + 2];
    if (a == b || b == c || a == c) parse_fail(origin, face_lines[k], "degenerate face");
  }
  return assemble(v, f);
}

TriMesh parse_ply(std::string_view text, const std::string& origin) {
  LineCursor cursor(text);
  std::string_view line;
  if (!cursor.next(line) || split_ws(line) != std::vector<std::string_view>{"ply"}) {
    parse_fail(origin, cursor.number(), "missing ply magic");
  }
  struct Element {
    std::string name;
    long count = 0;
    std::vector<std::string> props;
    bool has_list = false;
  };
  std::vector<Element> elements;
  bool header_done = false;
  while (!header_done && cursor.next(line)) {
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "format") {
      if (tok.size() < 2 || tok[1] != "ascii") parse_fail(origin, cursor.number(), "only ASCII PLY is supported");
    } else if (tok[0] == "element") {
      if (tok.size() != 3) parse_fail(origin, cursor.number(), "bad element line");
      Element e;
      e.name = std::string(tok[1]);
      if (!parse_number(tok[2], e.count) || e.count < 0) parse_fail(origin, cursor.number(), "bad element count");
      elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      if (elements.empty()) parse_fail(origin, cursor.number(), "property before element");
      if (tok.size() >= 2 && tok[1] == "list") {
        elements.back().has_list = true;
        elements.back().props.emplace_back(tok.back());
      } else if (tok.size() == 3) {
        elements.back().props.emplace_back(tok[2]);
      } else {
        parse_fail(origin, cursor.number(), "bad property line");
      }
    } else if (tok[0] == "end_header") {
      header_done = true;
    }
  }
  if (!header_done) parse_fail(origin, cursor.number(), "missing end_header");

  std::vector<double> v;
  std::vector<int> f;
  long nv = 0;
  for (const Element& e : elements) {
    int xi = -1, yi = -1, zi = -1;
    for (std::size_t p = 0; p < e.props.size(); ++p) {
      if (e.props[p] == "x") xi = static_cast<int>(p);
      if (e.props[p] == "y") yi = static_cast<int>(p);
      if (e.props[p] == "z") zi = static_cast<int>(p);
    }
    for (long r = 0; r < e.count; ++r) {
      if (!cursor.next(line)) parse_fail(origin, cursor.number(), "unexpected end of file");
      auto tok = split_ws(line);
      if (e.name == "vertex") {
        if (xi < 0 || yi < 0 || zi < 0) parse_fail(origin, cursor.number(), "vertex element lacks x/y/z");
        if (tok.size() < e.props.size()) parse_fail(origin, cursor.number(), "short vertex line");
        for (int c : {xi, yi, zi}) {
          double x;
          if (!parse_number(tok[static_cast<std::size_t>(c)], x)) parse_fail(origin, cursor.number(), "bad vertex coordinate");
          v.push_back(x);
        }
        ++nv;
      } else if (e.name == "face") {
        long k;
        if (tok.empty() || !parse_number(tok[0], k)) parse_fail(origin, cursor.number(), "bad face line");
        if (k != 3 || tok.size() < 4) parse_fail(origin, cursor.number(), "non-triangular face");
        int idx[3];
        for (int c = 0; c < 3; ++c) {
          if (!parse_number(tok[static_cast<std::size_t>(c) + 1], idx[c]) || idx[c] < 0 || idx[c] >= nv) {
            parse_fail(origin, cursor.number(), "bad face index");
          }
        }
        if (idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2]) parse_fail(origin, cursor.number(), "degenerate face");
        f.insert(f.end(), idx, idx + 3);
      }
    }
  }
  return assemble(v, f);
}

TriMesh load_mesh(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const std::string ext = lower_ext(path);
  if (ext == ".obj") return parse_obj(text, path.string());
  if (ext == ".ply") return parse_ply(text, path.string());
  data_error("unsupported mesh extension: " + path.string());
}

std::string format_obj(const TriMesh& mesh) {
  std::string out;
  char buf[128];
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", mesh.vertices()(v, 0), mesh.vertices()(v, 1),
                  mesh.vertices()(v, 2));
    out += buf;
  }
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    std::snprintf(buf, sizeof buf, "f %d %d %d\n", mesh.faces()(f, 0) + 1, mesh.faces()(f, 1) + 1,
                  mesh.faces()(f, 2) + 1);
    out += buf;
  }
  return out;
}

void save_obj(const TriMesh& mesh, const std::filesystem::path& path) { write_text_file(path, format_obj(mesh)); }

void save_ply(const TriMesh& mesh, const std::filesystem::path& path,
              const std::optional<Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>>& colors) {
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(mesh.num_vertices()) +
                    "\nproperty double x\nproperty double y\nproperty double z\n";
  if (colors) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "element face " + std::to_string(mesh.num_faces()) + "\nproperty list uchar int vertex_indices\nend_header\n";
  char buf[160];
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g", mesh.vertices()(v, 0), mesh.vertices()(v, 1),
                  mesh.vertices()(v, 2));
    out += buf;
    if (colors) {
      std::snprintf(buf, sizeof buf, " %d %d %d", (*colors)(v, 0), (*colors)(v, 1), (*colors)(v, 2));
      out += buf;
    }
    out += '\n';
  }
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    std::snprintf(buf, sizeof buf, "3 %d %d %d\n", mesh.faces()(f, 0), mesh.faces()(f, 1), mesh.faces()(f, 2));
    out += buf;
  }
  write_text_file(path, out);
}

std::vector<int> load_indices(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<int> out;
  LineCursor cursor(text);
  std::string_view line;
  while (cursor.next(line)) {
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    int x;
    if (tok.size() != 1 || !parse_number(tok[0], x)) parse_fail(path.string(), cursor.number(), "expected one integer");
    out.push_back(x);
  }
  return out;
}

Labels load_labels(const std::filesystem::path& path) { return load_indices(path); }

void save_labels(const Labels& labels, const std::filesystem::path& path) {
  std::string out;
  for (int l : labels) {
    out += std::to_string(l);
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace geocorr
