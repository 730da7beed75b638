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

#include "altk/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "altk/util/error.hpp"

namespace altk::nn {
namespace {

constexpr char kMagic[8] = {'A', 'L', 'T', 'K', 'C', 'K', 'P', 'T'};

template <typename T>
void Put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T Get(const std::string& in, std::size_t& pos, const std::string& path) {
  if (pos + sizeof(T) > in.size()) throw FormatError(path + ": checkpoint truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

template <typename Real>
std::vector<Tensor<Real>*> Tensors(Layer<Real>& layer) {
  std::vector<Tensor<Real>*> out;
  for (auto* p : layer.Params()) out.push_back(&p->value);
  for (auto* b : layer.Buffers()) out.push_back(b);
  return out;
}

}  // namespace

template <typename Real>
void WriteCheckpoint(const std::string& path,
                     const std::vector<std::unique_ptr<Layer<Real>>>& layers,
                     const nlohmann::json& meta) {
  nlohmann::json header;
  header["layers"] = nlohmann::json::array();
  for (const auto& l : layers) header["layers"].push_back(l->Config());
  header["meta"] = meta;
  const std::string text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  Put<std::uint32_t>(out, kCheckpointVersion);
  Put<std::uint64_t>(out, text.size());
  out += text;
  for (const auto& l : layers)
    for (auto* t : Tensors(*l))
      for (Real v : t->vec()) Put<float>(out, static_cast<float>(v));

  // Write-then-rename so readers never see a half-written file.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(tmp + ": cannot write");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error(tmp + ": write failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error(path + ": cannot rename");
}

template <typename Real>
LoadedCheckpoint<Real> ReadCheckpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(path + ": cannot open");
  const std::string in((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (in.size() < sizeof(kMagic) || std::memcmp(in.data(), kMagic, sizeof(kMagic)) != 0)
    throw FormatError(path + ": not a checkpoint");
  std::size_t pos = sizeof(kMagic);
  const auto version = Get<std::uint32_t>(in, pos, path);
  if (version != kCheckpointVersion)
    throw FormatError(path + ": unsupported checkpoint version " + std::to_string(version));
  const auto len = Get<std::uint64_t>(in, pos, path);
  if (pos + len > in.size()) throw FormatError(path + ": checkpoint truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in.substr(pos, len));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": bad checkpoint header: " + e.what());
  }
  pos += len;

  LoadedCheckpoint<Real> ck;
  ck.meta = header.value("meta", nlohmann::json::object());
  for (const auto& c : header.at("layers")) {
    ck.layers.push_back(MakeLayer<Real>(c));
    for (auto* t : Tensors(*ck.layers.back()))
      for (Real& v : t->vec()) v = static_cast<Real>(Get<float>(in, pos, path));
  }
  if (pos != in.size()) throw FormatError(path + ": trailing bytes in checkpoint");
  return ck;
}

template void WriteCheckpoint<float>(const std::string&,
                                     const std::vector<std::unique_ptr<Layer<float>>>&,
                                     const nlohmann::json&);
template void WriteCheckpoint<double>(const std::string&,
                                      const std::vector<std::unique_ptr<Layer<double>>>&,
                                      const nlohmann::json&);
template LoadedCheckpoint<float> ReadCheckpoint<float>(const std::string&);
template LoadedCheckpoint<double> ReadCheckpoint<double>(const std::string&);

}  // namespace altk::nn
