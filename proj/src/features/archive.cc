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

#include "altk/features/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "altk/util/error.hpp"

namespace altk::features {
namespace {

constexpr char kMagic[8] = {'A', 'L', 'T', 'K', 'F', 'E', 'A', 'T'};
static_assert(std::endian::native == std::endian::little,
              "archive I/O assumes a little-endian host");

template <typename T>
void Put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void PutString(std::ostream& os, const std::string& s) {
  Put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T Get(std::istream& is, const std::string& what) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw FormatError("archive: truncated record reading " + what);
  return v;
}

std::string GetString(std::istream& is, const std::string& what) {
  const auto n = Get<std::uint32_t>(is, what);
  if (n > (1u << 20)) throw FormatError("archive: implausible " + what + " length");
  std::string s(n, '\0');
  if (n && !is.read(s.data(), n))
    throw FormatError("archive: truncated record reading " + what);
  return s;
}

// Returns false on clean EOF before a record starts.
bool ReadRecord(std::istream& is, FeatureMatrix* out) {
  char magic[8];
  is.read(magic, 8);
  if (is.gcount() == 0 && is.eof()) return false;
  if (is.gcount() != 8 || std::memcmp(magic, kMagic, 8) != 0)
    throw FormatError("archive: bad magic");
  out->utterance_id = GetString(is, "utterance id");
  out->speaker_id = GetString(is, "speaker id");
  out->kind = KindFromName(GetString(is, "kind"));
  out->frames = Get<std::uint64_t>(is, "rows");
  out->dims = Get<std::uint64_t>(is, "cols");
  if (out->dims > (1u << 16) || out->frames > (1u << 26))
    throw FormatError("archive: implausible shape for " + out->utterance_id);
  out->data.resize(out->frames * out->dims);
  const auto bytes = static_cast<std::streamsize>(out->data.size() * sizeof(float));
  if (bytes && !is.read(reinterpret_cast<char*>(out->data.data()), bytes))
    throw FormatError("archive: truncated data for " + out->utterance_id);
  return true;
}

}  // namespace

struct ArchiveWriter::Impl {
  std::ofstream archive, index;
};

ArchiveWriter::ArchiveWriter(const std::string& archive_path,
                             const std::string& index_path)
    : impl_(new Impl) {
  impl_->archive.open(archive_path, std::ios::binary | std::ios::trunc);
  impl_->index.open(index_path, std::ios::trunc);
  if (!impl_->archive || !impl_->index) {
    delete impl_;
    throw Error("archive: cannot open " + archive_path + " / " + index_path);
  }
}

ArchiveWriter::~ArchiveWriter() { delete impl_; }

void ArchiveWriter::Write(const FeatureMatrix& f) {
  if (f.data.size() != f.frames * f.dims)
    throw std::invalid_argument("archive: matrix size mismatch for " +
                                f.utterance_id);
  if (f.utterance_id.empty() ||
      f.utterance_id.find_first_of(" \t\n") != std::string::npos)
    throw std::invalid_argument("archive: utterance id must be a nonempty token");
  auto& os = impl_->archive;
  impl_->index << f.utterance_id << ' ' << static_cast<std::uint64_t>(os.tellp())
               << '\n';
  os.write(kMagic, 8);
  PutString(os, f.utterance_id);
  PutString(os, f.speaker_id);
  PutString(os, KindName(f.kind));
  Put<std::uint64_t>(os, f.frames);
  Put<std::uint64_t>(os, f.dims);
  os.write(reinterpret_cast<const char*>(f.data.data()),
           static_cast<std::streamsize>(f.data.size() * sizeof(float)));
  if (!os) throw Error("archive: write failed");
}

void ArchiveWriter::Close() {
  impl_->archive.close();
  impl_->index.close();
}

ArchiveReader::ArchiveReader(const std::string& archive_path,
                             const std::string& index_path)
    : archive_path_(archive_path) {
  std::ifstream in(index_path);
  if (!in) throw FormatError("archive: cannot open index " + index_path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string key;
    std::uint64_t offset;
    if (!(ss >> key >> offset))
      throw FormatError(index_path + ":" + std::to_string(lineno) +
                        ": expected '<utt_id> <offset>'");
    if (!offsets_.emplace(key, offset).second)
      throw FormatError("archive: duplicate key " + key);
    keys_.push_back(key);
  }
}

bool ArchiveReader::Contains(const std::string& utt_id) const {
  return offsets_.count(utt_id) > 0;
}

FeatureMatrix ArchiveReader::Read(const std::string& utt_id) const {
  auto it = offsets_.find(utt_id);
  if (it == offsets_.end()) throw Error("archive: no utterance " + utt_id);
  std::ifstream in(archive_path_, std::ios::binary);
  if (!in) throw FormatError("archive: cannot open " + archive_path_);
  in.seekg(static_cast<std::streamoff>(it->second));
  FeatureMatrix f;
  if (!ReadRecord(in, &f) || f.utterance_id != utt_id)
    throw FormatError("archive: index offset for " + utt_id + " is stale");
  return f;
}

std::vector<FeatureMatrix> ReadArchive(const std::string& archive_path) {
  std::ifstream in(archive_path, std::ios::binary);
  if (!in) throw FormatError("archive: cannot open " + archive_path);
  std::vector<FeatureMatrix> out;
  FeatureMatrix f;
  while (ReadRecord(in, &f)) out.push_back(f);
  return out;
}

std::vector<ManifestEntry> ReadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("manifest: cannot open " + path);
  std::vector<ManifestEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      const auto tab = line.find('\t', start);
      if (tab == std::string::npos)
        throw FormatError(path + ":" + std::to_string(lineno) +
                          ": expected 4 tab-separated fields");
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    fields.push_back(line.substr(start));
    out.push_back({fields[0], fields[1], fields[2], fields[3]});
  }
  return out;
}

void WriteManifest(const std::string& path,
                   const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw Error("manifest: cannot write " + path);
  for (const auto& e : entries)
    out << e.utterance_id << '\t' << e.wav_path << '\t' << e.speaker_id << '\t'
        << e.transcript << '\n';
}

}  // namespace altk::features
