// phrasekit/io_util.hpp

// Copyright 2026  The PhraseKit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PHRASEKIT_IO_UTIL_HPP
#define PHRASEKIT_IO_UTIL_HPP

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "phrasekit/common.hpp"

namespace pk {

// Little-endian binary writers/readers for the PK** model file family.
// The implementation assumes a little-endian host (checked at startup of
// every reader/writer); all deployment targets here are x86-64/aarch64 LE.

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path);
  void write_bytes(const void* data, std::size_t n);
  void write_magic(const char magic[4]);
  void write_u32(std::uint32_t v);
  void write_u64(std::uint64_t v);
  void write_f32(float v);
  void write_f64(double v);
  void write_f32_array(const float* data, std::size_t n);
  void write_f64_array(const double* data, std::size_t n);
  void write_string(const std::string& s);  // u32 length prefix + bytes
  void close();

 private:
  std::ofstream os_;
  std::string path_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path);
  void read_bytes(void* data, std::size_t n);
  // Throws Error("bad-magic") when the file does not start with `magic`.
  void expect_magic(const char magic[4]);
  // Throws Error("bad-version") when the stored version != expected.
  void expect_version(std::uint32_t expected);
  std::uint32_t read_u32();
  std::uint64_t read_u64();
  float read_f32();
  double read_f64();
  void read_f32_array(float* data, std::size_t n);
  void read_f64_array(double* data, std::size_t n);
  std::string read_string();
  bool at_eof();

 private:
  std::ifstream is_;
  std::string path_;
};

// Whole-file helpers.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Hex SHA-256 (used for artifact hashes in run reports).
std::string sha256_file_hex(const std::string& path);
std::string sha256_string_hex(const std::string& data);

}  // namespace pk

#endif  // PHRASEKIT_IO_UTIL_HPP
