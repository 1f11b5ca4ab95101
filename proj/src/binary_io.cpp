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
#include "geocorr/binary_io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

namespace geocorr {

namespace {

void atomic_write(const std::filesystem::path& path, const char* data, std::size_t size) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) data_error("cannot open for writing: " + tmp.string());
    out.write(data, static_cast<std::streamsize>(size));
    if (!out) data_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) data_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace

void BinaryWriter::save(const std::filesystem::path& path) const {
  atomic_write(path, reinterpret_cast<const char*>(bytes_.data()), bytes_.size());
}

void write_binary_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  atomic_write(path, reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

std::vector<unsigned char> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) data_error("cannot open: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void BinaryReader::need(std::size_t n) const {
  if (pos_ + n > bytes_.size()) data_error("truncated binary file " + origin_);
}

void BinaryReader::expect_magic(std::string_view magic) {
  need(magic.size());
  if (!std::equal(magic.begin(), magic.end(), bytes_.begin() + static_cast<std::ptrdiff_t>(pos_))) {
    data_error("bad magic in " + origin_ + " (expected " + std::string(magic) + ")");
  }
  pos_ += magic.size();
}

std::string BinaryReader::get_bytes(std::size_t n) {
  need(n);
  std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
  pos_ += n;
  return s;
}

void BinaryReader::expect_end() const {
  if (!at_end()) data_error("trailing bytes in " + origin_);
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  atomic_write(path, text.data(), text.size());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) data_error("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace geocorr
