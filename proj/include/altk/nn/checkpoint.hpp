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

#include <memory>
#include <string>
#include <vector>

#include "altk/nn/layers.hpp"
#include "json.hpp"

namespace altk::nn {

// Binary checkpoint: magic "ALTKCKPT", u32 format version, u64 header length,
// a JSON header {"layers": [layer configs], "meta": ...}, then every
// parameter value followed by every buffer, layer by layer in declaration
// order, as little-endian float32, row-major.
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <typename Real>
void WriteCheckpoint(const std::string& path,
                     const std::vector<std::unique_ptr<Layer<Real>>>& layers,
                     const nlohmann::json& meta);

template <typename Real>
struct LoadedCheckpoint {
  std::vector<std::unique_ptr<Layer<Real>>> layers;
  nlohmann::json meta;
};

// Throws FormatError on a bad magic, version, or size.
template <typename Real>
LoadedCheckpoint<Real> ReadCheckpoint(const std::string& path);

}  // namespace altk::nn
