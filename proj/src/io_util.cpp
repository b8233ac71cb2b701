// phrasekit/io_util.cpp

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

#include "phrasekit/io_util.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <sstream>

namespace pk {

static_assert(std::endian::native == std::endian::little,
              "PK** binary formats are little-endian; big-endian hosts are not supported");

BinaryWriter::BinaryWriter(const std::string& path)
    : os_(path, std::ios::binary), path_(path) {
  PK_CHECK(os_.good(), "io", "cannot open for writing: " << path);
}

void BinaryWriter::write_bytes(const void* data, std::size_t n) {
  os_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  PK_CHECK(os_.good(), "io", "write failed: " << path_);
}

void BinaryWriter::write_magic(const char magic[4]) { write_bytes(magic, 4); }
void BinaryWriter::write_u32(std::uint32_t v) { write_bytes(&v, 4); }
void BinaryWriter::write_u64(std::uint64_t v) { write_bytes(&v, 8); }
void BinaryWriter::write_f32(float v) { write_bytes(&v, 4); }
void BinaryWriter::write_f64(double v) { write_bytes(&v, 8); }

void BinaryWriter::write_f32_array(const float* data, std::size_t n) {
  if (n) write_bytes(data, 4 * n);
}

void BinaryWriter::write_f64_array(const double* data, std::size_t n) {
  if (n) write_bytes(data, 8 * n);
}

void BinaryWriter::write_string(const std::string& s) {
  write_u32(static_cast<std::uint32_t>(s.size()));
  if (!s.empty()) write_bytes(s.data(), s.size());
}

void BinaryWriter::close() {
  os_.close();
  PK_CHECK(!os_.fail(), "io", "close failed: " << path_);
}

BinaryReader::BinaryReader(const std::string& path)
    : is_(path, std::ios::binary), path_(path) {
  PK_CHECK(is_.good(), "io", "cannot open for reading: " << path);
}

void BinaryReader::read_bytes(void* data, std::size_t n) {
  is_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  PK_CHECK(static_cast<std::size_t>(is_.gcount()) == n, "io",
           "truncated read in " << path_);
}

void BinaryReader::expect_magic(const char magic[4]) {
  char got[4];
  read_bytes(got, 4);
  PK_CHECK(std::memcmp(got, magic, 4) == 0, "bad-magic",
           path_ << ": expected magic '" << std::string(magic, 4) << "', got '"
                 << std::string(got, 4) << "'");
}

void BinaryReader::expect_version(std::uint32_t expected) {
  std::uint32_t v = read_u32();
  PK_CHECK(v == expected, "bad-version",
           path_ << ": unsupported version " << v << " (expected " << expected << ")");
}

std::uint32_t BinaryReader::read_u32() {
  std::uint32_t v;
  read_bytes(&v, 4);
  return v;
}

std::uint64_t BinaryReader::read_u64() {
  std::uint64_t v;
  read_bytes(&v, 8);
  return v;
}

float BinaryReader::read_f32() {
  float v;
  read_bytes(&v, 4);
  return v;
}

double BinaryReader::read_f64() {
  double v;
  read_bytes(&v, 8);
  return v;
}

void BinaryReader::read_f32_array(float* data, std::size_t n) {
  if (n) read_bytes(data, 4 * n);
}

void BinaryReader::read_f64_array(double* data, std::size_t n) {
  if (n) read_bytes(data, 8 * n);
}

std::string BinaryReader::read_string() {
  std::uint32_t len = read_u32();
  std::string s(len, '\0');
  if (len) read_bytes(s.data(), len);
  return s;
}

bool BinaryReader::at_eof() {
  return is_.peek() == std::ifstream::traits_type::eof();
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  PK_CHECK(is.good(), "io", "cannot open for reading: " << path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  PK_CHECK(os.good(), "io", "cannot open for writing: " << path);
  os << content;
  PK_CHECK(os.good(), "io", "write failed: " << path);
}

namespace {

std::string digest_to_hex(const unsigned char* digest, unsigned int len) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace

std::string sha256_file_hex(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  PK_CHECK(is.good(), "io", "cannot open for hashing: " << path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  PK_CHECK(ctx != nullptr, "io", "EVP_MD_CTX_new failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (is) {
    is.read(buf, sizeof(buf));
    std::streamsize got = is.gcount();
    if (got > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  return digest_to_hex(digest, len);
}

std::string sha256_string_hex(const std::string& data) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  PK_CHECK(ctx != nullptr, "io", "EVP_MD_CTX_new failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, data.data(), data.size());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  return digest_to_hex(digest, len);
}

}  // namespace pk
