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

#include "altk/analysis/attention.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace altk::analysis {
namespace {

void RequireHeads(const AttentionProfile& p) {
  if (p.weights.empty()) throw std::invalid_argument("attention profile has no heads");
  for (const auto& row : p.weights)
    if (row.size() != p.num_bins())
      throw std::invalid_argument("attention profile row has the wrong number of bins");
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return 0;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::string Num(double v) {
  std::ostringstream os;
  os << std::setprecision(8) << v;
  return os.str();
}

}  // namespace

AttentionProfile ExtractProfile(const am::AcousticModel& model,
                                const std::vector<am::Utterance>& data,
                                const std::string& model_id, const std::string& dataset_id) {
  if (!model.config().attention) throw std::invalid_argument("model has no attention layer");
  const auto ctx = *model.config().attention;
  const std::size_t heads = ctx.num_heads, bins = ctx.window();

  // Per-utterance sums, reduced in utterance order for determinism.
  std::vector<std::vector<double>> sums(data.size());
  std::vector<std::size_t> counts(data.size(), 0);
  std::vector<std::size_t> eligible;
  for (std::size_t u = 0; u < data.size(); ++u)
    if (data[u].features->frames >= ctx.left + ctx.right + 1) eligible.push_back(u);
  if (eligible.empty())
    throw std::invalid_argument("no utterance is long enough for a full attention context");

  const int n = static_cast<int>(eligible.size());
#pragma omp parallel
  {
    am::AcousticModel local = model;
#pragma omp for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
      const std::size_t u = eligible[static_cast<std::size_t>(i)];
      const auto& f = *data[u].features;
      local.Forward(am::MakeInput<float>(f, *data[u].embedding), nn::Mode::kInference);
      const auto& w = local.attention()->last_weights();  // [1,H,T,bins]
      const std::size_t T = f.frames;
      std::vector<double> acc(heads * bins, 0.0);
      for (std::size_t h = 0; h < heads; ++h)
        for (std::size_t t = ctx.left; t + ctx.right < T; ++t)
          for (std::size_t b = 0; b < bins; ++b)
            acc[h * bins + b] += w[(h * T + t) * bins + b];
      sums[u] = std::move(acc);
      counts[u] = T - ctx.left - ctx.right;
    }
  }

  AttentionProfile p;
  p.left = ctx.left;
  p.right = ctx.right;
  p.model_id = model_id;
  p.dataset_id = dataset_id;
  std::vector<double> total(heads * bins, 0.0);
  for (std::size_t u : eligible) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += sums[u][i];
    p.frames += counts[u];
  }
  p.weights.assign(heads, std::vector<double>(bins));
  for (std::size_t h = 0; h < heads; ++h)
    for (std::size_t b = 0; b < bins; ++b)
      p.weights[h][b] = total[h * bins + b] / static_cast<double>(p.frames);
  p.head_ids.resize(heads);
  std::iota(p.head_ids.begin(), p.head_ids.end(), 0);
  return p;
}

AttentionProfile SortHeads(const AttentionProfile& profile) {
  RequireHeads(profile);
  std::vector<std::size_t> order(profile.num_heads());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return profile.weights[a][0] < profile.weights[b][0];
  });
  AttentionProfile out = profile;
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.weights[i] = profile.weights[order[i]];
    out.head_ids[i] = profile.head_ids.empty() ? order[i] : profile.head_ids[order[i]];
  }
  out.head_ids.resize(order.size());
  return out;
}

ProfileSummary Summarize(const AttentionProfile& profile) {
  RequireHeads(profile);
  ProfileSummary s;
  s.mean.assign(profile.num_bins(), 0.0);
  for (const auto& row : profile.weights)
    for (std::size_t b = 0; b < row.size(); ++b) s.mean[b] += row[b];
  for (double& v : s.mean) v /= static_cast<double>(profile.num_heads());
  s.median = Median(s.mean);
  return s;
}

ProfileMetrics ComputeMetrics(const AttentionProfile& profile) {
  RequireHeads(profile);
  ProfileMetrics m;
  for (const auto& row : profile.weights) {
    double h = 0;
    for (double w : row)
      if (w > 0) h -= w * std::log(w);
    m.entropy.push_back(h);
    m.argmax.push_back(static_cast<std::size_t>(
        std::max_element(row.begin(), row.end()) - row.begin()));
  }
  const auto mean = Summarize(profile).mean;
  std::vector<double> dx, dy;
  for (std::size_t d = 0; d <= profile.left; ++d) {
    dx.push_back(static_cast<double>(d));
    dy.push_back(mean[profile.left - d]);
  }
  m.left_slope = Slope(dx, dy);
  dx.clear();
  dy.clear();
  for (std::size_t d = 0; d <= profile.right; ++d) {
    dx.push_back(static_cast<double>(d));
    dy.push_back(mean[profile.left + d]);
  }
  m.right_slope = Slope(dx, dy);
  return m;
}

std::string ProfileToCsv(const AttentionProfile& profile) {
  RequireHeads(profile);
  std::ostringstream os;
  os << "head";
  for (long b = -static_cast<long>(profile.left); b <= static_cast<long>(profile.right); ++b)
    os << ',' << b;
  os << '\n';
  for (std::size_t h = 0; h < profile.num_heads(); ++h) {
    os << (h < profile.head_ids.size() ? profile.head_ids[h] : h);
    for (double w : profile.weights[h]) os << ',' << Num(w);
    os << '\n';
  }
  return os.str();
}

std::string ProfileToSvg(const AttentionProfile& profile) {
  RequireHeads(profile);
  const auto summary = Summarize(profile);
  const std::size_t H = profile.num_heads(), B = profile.num_bins();
  const double cell_w = 24, cell_h = 14, margin = 40;
  const double width = margin * 2 + cell_w * B;
  const double heat_h = cell_h * H, plot_h = 160;
  const double height = margin * 3 + heat_h + plot_h;
  double wmax = 0;
  for (const auto& row : profile.weights)
    for (double w : row) wmax = std::max(wmax, w);
  if (wmax <= 0) wmax = 1;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  os << "<text x=\"" << margin << "\" y=\"" << margin - 10 << "\">attention weights by head ("
     << profile.model_id << (profile.dataset_id.empty() ? "" : ", " + profile.dataset_id)
     << ")</text>\n";
  // Heatmap: row 0 at the bottom, as in a sorted-from-bottom display.
  for (std::size_t h = 0; h < H; ++h)
    for (std::size_t b = 0; b < B; ++b) {
      const int shade = static_cast<int>(std::lround(255 * (1 - profile.weights[h][b] / wmax)));
      os << "<rect x=\"" << margin + b * cell_w << "\" y=\""
         << margin + (H - 1 - h) * cell_h << "\" width=\"" << cell_w << "\" height=\""
         << cell_h << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\"/>\n";
    }
  for (std::size_t h = 0; h < H; ++h)
    os << "<text x=\"" << margin - 4 << "\" y=\"" << margin + (H - h) * cell_h - 3
       << "\" text-anchor=\"end\">"
       << (h < profile.head_ids.size() ? profile.head_ids[h] : h) << "</text>\n";

  // Line plot of the head average.
  const double top = margin * 2 + heat_h;
  double mmax = *std::max_element(summary.mean.begin(), summary.mean.end());
  if (mmax <= 0) mmax = 1;
  auto y_of = [&](double v) { return top + plot_h * (1 - v / mmax); };
  auto x_of = [&](std::size_t b) { return margin + (b + 0.5) * cell_w; };
  os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
  for (std::size_t b = 0; b < B; ++b) os << x_of(b) << ',' << y_of(summary.mean[b]) << ' ';
  os << "\"/>\n";
  os << "<line x1=\"" << margin << "\" x2=\"" << margin + B * cell_w << "\" y1=\""
     << y_of(summary.median) << "\" y2=\"" << y_of(summary.median)
     << "\" stroke=\"red\" stroke-dasharray=\"4,3\"/>\n";
  for (std::size_t b = 0; b < B; ++b)
    os << "<text x=\"" << x_of(b) << "\" y=\"" << top + plot_h + 14
       << "\" text-anchor=\"middle\">"
       << static_cast<long>(b) - static_cast<long>(profile.left) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::vector<ParamRow> ParamReport(
    const std::vector<std::pair<std::string, am::ModelConfig>>& models) {
  std::vector<ParamRow> rows;
  for (const auto& [name, config] : models)
    rows.push_back({name, am::AcousticModel(config).NumParameters()});
  return rows;
}

std::string ParamReportToCsv(const std::vector<ParamRow>& rows) {
  std::ostringstream os;
  os << "model,parameters\n";
  for (const auto& r : rows) os << r.model << ',' << r.parameters << '\n';
  return os.str();
}

}  // namespace altk::analysis
