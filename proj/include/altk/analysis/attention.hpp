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

#include <string>
#include <utility>
#include <vector>

#include "altk/am/train.hpp"

namespace altk::analysis {

// Per-head attention weights over relative offsets -left..right, averaged
// over every full-context frame of a dataset.
struct AttentionProfile {
  std::size_t left = 0;
  std::size_t right = 0;
  std::vector<std::vector<double>> weights;  // [heads][left + right + 1]
  std::vector<std::size_t> head_ids;         // original head index per row
  std::size_t frames = 0;                    // frames that entered the average
  std::string model_id;
  std::string dataset_id;

  std::size_t num_heads() const { return weights.size(); }
  std::size_t num_bins() const { return left + right + 1; }
};

// Frames with at least `left` frames before and `right` after are the only
// ones counted, so every row is an average of proper distributions. Throws
// std::invalid_argument when the model has no attention layer or no
// utterance is long enough. Utterances run in parallel on model copies.
AttentionProfile ExtractProfile(const am::AcousticModel& model,
                                const std::vector<am::Utterance>& data,
                                const std::string& model_id = "",
                                const std::string& dataset_id = "");

// Stable ascending sort of the heads by their weight at the leftmost bin.
AttentionProfile SortHeads(const AttentionProfile& profile);

struct ProfileSummary {
  std::vector<double> mean;  // per bin, over heads
  double median = 0;         // median of `mean` across bins
};
ProfileSummary Summarize(const AttentionProfile& profile);

// Report metrics; these describe the profile and are never thresholds.
struct ProfileMetrics {
  std::vector<double> entropy;        // nats, per head
  std::vector<std::size_t> argmax;    // bin index per head
  // Least-squares slope of the head-averaged weight against distance from
  // the centre, past side and future side. More negative means sharper.
  double left_slope = 0;
  double right_slope = 0;
};
ProfileMetrics ComputeMetrics(const AttentionProfile& profile);

// Header "head,-L,...,R"; one row per head labelled by its original index.
std::string ProfileToCsv(const AttentionProfile& profile);
// Two-row figure: heatmap of the heads on top, head average with a dashed
// median line below.
std::string ProfileToSvg(const AttentionProfile& profile);

struct ParamRow {
  std::string model;
  std::size_t parameters = 0;
};
// Counts come from the parameter shapes of the built networks.
std::vector<ParamRow> ParamReport(
    const std::vector<std::pair<std::string, am::ModelConfig>>& models);
std::string ParamReportToCsv(const std::vector<ParamRow>& rows);

}  // namespace altk::analysis
