// Copyright 2026 The altk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "altk/features/features.hpp"

namespace altk::features {

// Binary feature archive. Each record is
//   "ALTKFEAT" | u32 len + utt id | u32 len + speaker id | u32 len + kind |
//   u64 rows | u64 cols | rows*cols little-endian float32
// and the companion index has one "<utt_id> <byte_offset>" line per record.
class ArchiveWriter {
 public:
  ArchiveWriter(const std::string& archive_path, const std::string& index_path);
  ~ArchiveWriter();
  ArchiveWriter(const ArchiveWriter&) = delete;
  ArchiveWriter& operator=(const ArchiveWriter&) = delete;

  void Write(const FeatureMatrix& features);
  void Close();

 private:
  struct Impl;
  Impl* impl_;
};

// Random access through the index.
class ArchiveReader {
 public:
  ArchiveReader(const std::string& archive_path, const std::string& index_path);

  const std::vector<std::string>& keys() const { return keys_; }
  bool Contains(const std::string& utt_id) const;
  FeatureMatrix Read(const std::string& utt_id) const;

 private:
  std::string archive_path_;
  std::vector<std::string> keys_;
  std::map<std::string, std::uint64_t> offsets_;
};

// Sequential scan that ignores the index.
std::vector<FeatureMatrix> ReadArchive(const std::string& archive_path);

struct ManifestEntry {
  std::string utterance_id;
  std::string wav_path;
  std::string speaker_id;
  std::string transcript;
};

// "<utt_id>\t<wav_path>\t<speaker_id>\t<transcript>" per line.
std::vector<ManifestEntry> ReadManifest(const std::string& path);
void WriteManifest(const std::string& path,
                   const std::vector<ManifestEntry>& entries);

}  // namespace altk::features
