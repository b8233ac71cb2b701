// phrasekit/wav.cpp

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

#include "phrasekit/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "phrasekit/common.hpp"

namespace pk {

namespace {

struct ChunkHeader {
  char id[4];
  std::uint32_t size;
};

bool read_chunk_header(std::ifstream& is, ChunkHeader* h) {
  is.read(h->id, 4);
  if (is.gcount() != 4) return false;
  is.read(reinterpret_cast<char*>(&h->size), 4);
  return is.gcount() == 4;
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  PK_CHECK(is.good(), "io", "cannot open wav file: " << path);

  char riff[4], wave[4];
  std::uint32_t riff_size = 0;
  is.read(riff, 4);
  is.read(reinterpret_cast<char*>(&riff_size), 4);
  is.read(wave, 4);
  PK_CHECK(is.good() && std::memcmp(riff, "RIFF", 4) == 0 &&
               std::memcmp(wave, "WAVE", 4) == 0,
           "wav-malformed", path << ": not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t audio_format = 0, num_channels = 0, bits_per_sample = 0;
  std::uint32_t sample_rate = 0;
  std::vector<std::int16_t> pcm;
  bool have_data = false;

  ChunkHeader h;
  while (read_chunk_header(is, &h)) {
    if (std::memcmp(h.id, "fmt ", 4) == 0) {
      PK_CHECK(h.size >= 16, "wav-malformed", path << ": fmt chunk too small");
      std::uint16_t block_align;
      std::uint32_t byte_rate;
      is.read(reinterpret_cast<char*>(&audio_format), 2);
      is.read(reinterpret_cast<char*>(&num_channels), 2);
      is.read(reinterpret_cast<char*>(&sample_rate), 4);
      is.read(reinterpret_cast<char*>(&byte_rate), 4);
      is.read(reinterpret_cast<char*>(&block_align), 2);
      is.read(reinterpret_cast<char*>(&bits_per_sample), 2);
      PK_CHECK(is.good(), "wav-malformed", path << ": truncated fmt chunk");
      is.seekg(h.size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(h.id, "data", 4) == 0) {
      PK_CHECK(have_fmt, "wav-malformed", path << ": data chunk before fmt chunk");
      PK_CHECK(num_channels == 1, "wav-multichannel",
               path << ": expected mono, found " << num_channels << " channels");
      PK_CHECK(audio_format == 1 && bits_per_sample == 16, "wav-encoding",
               path << ": only 16-bit linear PCM is supported (format "
                    << audio_format << ", " << bits_per_sample << " bits)");
      pcm.resize(h.size / 2);
      is.read(reinterpret_cast<char*>(pcm.data()),
              static_cast<std::streamsize>(pcm.size() * 2));
      PK_CHECK(static_cast<std::size_t>(is.gcount()) == pcm.size() * 2,
               "wav-malformed", path << ": truncated data chunk");
      have_data = true;
      break;
    } else {
      // Skip LIST/fact/etc.; chunks are word-aligned.
      is.seekg(h.size + (h.size & 1), std::ios::cur);
      PK_CHECK(is.good(), "wav-malformed", path << ": truncated chunk");
    }
  }
  PK_CHECK(have_data, "wav-malformed", path << ": missing data chunk");
  PK_CHECK(sample_rate > 0, "wav-malformed", path << ": zero sample rate");
  PK_CHECK(!pcm.empty(), "wav-malformed", path << ": empty data chunk");

  AudioBuffer out;
  out.sample_rate = static_cast<int>(sample_rate);
  out.samples.resize(pcm.size());
  for (std::size_t i = 0; i < pcm.size(); ++i)
    out.samples[i] = static_cast<double>(pcm[i]) / 32768.0;
  return out;
}

void write_wav(const std::string& path, const AudioBuffer& audio) {
  PK_CHECK(audio.sample_rate > 0, "wav-malformed", "sample_rate must be positive");
  PK_CHECK(!audio.samples.empty(), "wav-malformed", "refusing to write empty audio");

  std::vector<std::int16_t> pcm(audio.samples.size());
  for (std::size_t i = 0; i < audio.samples.size(); ++i) {
    double x = std::clamp(audio.samples[i], -1.0, 1.0);
    pcm[i] = static_cast<std::int16_t>(std::lrint(x * 32767.0));
  }

  const std::uint32_t data_size = static_cast<std::uint32_t>(pcm.size() * 2);
  const std::uint32_t riff_size = 36 + data_size;
  const std::uint16_t audio_format = 1, num_channels = 1, bits = 16;
  const std::uint32_t sr = static_cast<std::uint32_t>(audio.sample_rate);
  const std::uint32_t byte_rate = sr * 2;
  const std::uint16_t block_align = 2;
  const std::uint32_t fmt_size = 16;

  std::ofstream os(path, std::ios::binary);
  PK_CHECK(os.good(), "io", "cannot open for writing: " << path);
  os.write("RIFF", 4);
  os.write(reinterpret_cast<const char*>(&riff_size), 4);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  os.write(reinterpret_cast<const char*>(&fmt_size), 4);
  os.write(reinterpret_cast<const char*>(&audio_format), 2);
  os.write(reinterpret_cast<const char*>(&num_channels), 2);
  os.write(reinterpret_cast<const char*>(&sr), 4);
  os.write(reinterpret_cast<const char*>(&byte_rate), 4);
  os.write(reinterpret_cast<const char*>(&block_align), 2);
  os.write(reinterpret_cast<const char*>(&bits), 2);
  os.write("data", 4);
  os.write(reinterpret_cast<const char*>(&data_size), 4);
  os.write(reinterpret_cast<const char*>(pcm.data()), data_size);
  PK_CHECK(os.good(), "io", "write failed: " << path);
}

}  // namespace pk
