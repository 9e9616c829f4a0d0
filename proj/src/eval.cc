// Copyright 2026 The wolonet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wolonet/eval.h"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "wolonet/ops.h"
#include "wolonet/wolo.h"

namespace wolonet {

namespace {

void check_ck(const char* what, int64_t channels, int64_t kernel) {
  if (channels < 1 || kernel < 1)
    throw ValueError(std::string(what) + ": C and K must be >= 1");
}

}  // namespace

int64_t madds_wolo(int64_t channels, int64_t kernel) {
  check_ck("madds_wolo", channels, kernel);
  const int64_t c = channels, k = kernel;
  return 2 * (k * k + k) * c + c * c + c;
}

int64_t madds_resblock(int64_t channels, int64_t kernel) {
  check_ck("madds_resblock", channels, kernel);
  return kernel * channels * channels;
}

int64_t madds_resblock_with_bias(int64_t channels, int64_t kernel) {
  return madds_resblock(channels, kernel) + channels;
}

double madds_ratio(int64_t channels, int64_t kernel) {
  return static_cast<double>(madds_resblock(channels, kernel)) /
         static_cast<double>(madds_wolo(channels, kernel));
}

int64_t madds_slack(int64_t channels, int64_t kernel) {
  return 3 * kernel * kernel + 3 * kernel + 2 * channels;
}

int64_t empirical_madds(int64_t channels, int64_t kernel) {
  check_ck("empirical_madds", channels, kernel);
  if (kernel % 2 == 0) throw ValueError("empirical_madds: K must be odd");
  std::mt19937_64 rng(7);
  WoloParams p = WoloParams::init(channels, kernel, 1, KernelActivation::kSine, rng);
  std::normal_distribution<double> dist;
  std::vector<double> xv(channels);
  for (auto& v : xv) v = dist(rng);
  Tensor x({channels, 1}, std::move(xv));
  NoGradGuard no_grad;
  OpCountScope scope;
  Tensor h = wolo_attention(x, p);
  conv1d(h, reshape(p.post_w, {channels, channels, 1}), p.post_b);
  return scope.count();
}

MAddsReport madds_report(int64_t channels, int64_t kernel, bool with_empirical) {
  MAddsReport r;
  r.channels = channels;
  r.kernel = kernel;
  r.wolo_madds = madds_wolo(channels, kernel);
  r.resblock_madds = madds_resblock(channels, kernel);
  r.resblock_with_bias = madds_resblock_with_bias(channels, kernel);
  r.ratio = madds_ratio(channels, kernel);
  if (with_empirical) r.empirical = empirical_madds(channels, kernel);
  return r;
}

std::string madds_table_markdown(const std::vector<MAddsReport>& rows) {
  std::ostringstream os;
  os << "| C | K | wolo | resblock | resblock+C | ratio | empirical |\n"
     << "|---|---|------|----------|------------|-------|-----------|\n";
  for (const auto& r : rows) {
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%.6f", r.ratio);
    os << "| " << r.channels << " | " << r.kernel << " | " << r.wolo_madds << " | "
       << r.resblock_madds << " | " << r.resblock_with_bias << " | " << ratio << " | "
       << r.empirical << " |\n";
  }
  return os.str();
}

std::string madds_table_csv(const std::vector<MAddsReport>& rows) {
  std::ostringstream os;
  os << "C,K,wolo,resblock,resblock_with_bias,ratio,empirical\n";
  for (const auto& r : rows) {
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%.6f", r.ratio);
    os << r.channels << "," << r.kernel << "," << r.wolo_madds << "," << r.resblock_madds << ","
       << r.resblock_with_bias << "," << ratio << "," << r.empirical << "\n";
  }
  return os.str();
}

std::vector<std::vector<double>> mel_cepstra(const Tensor& log_mel, int order) {
  if (log_mel.rank() != 2) throw ShapeError("mel_cepstra", {log_mel.shape()}, "expected (n_mels, F)");
  const int64_t m = log_mel.dim(0), frames = log_mel.dim(1);
  if (order < 1 || order >= m)
    throw ValueError("mel_cepstra: order must lie in [1, n_mels - 1]");
  auto d = log_mel.data();
  const double scale = std::sqrt(2.0 / static_cast<double>(m));
  std::vector<std::vector<double>> out(frames, std::vector<double>(order));
  for (int64_t f = 0; f < frames; ++f)
    for (int i = 1; i <= order; ++i) {
      double acc = 0.0;
      for (int64_t j = 0; j < m; ++j)
        acc += d[j * frames + f] * std::cos(std::numbers::pi * i * (2.0 * j + 1.0) / (2.0 * m));
      out[f][i - 1] = scale * acc;
    }
  return out;
}

double mcd_from_cepstra(const std::vector<std::vector<double>>& a,
                        const std::vector<std::vector<double>>& b) {
  if (a.size() != b.size()) throw ValueError("mcd: frame counts differ");
  if (a.empty()) throw ValueError("mcd: no frames");
  const double k = 10.0 / std::numbers::ln10;
  double total = 0.0;
  for (size_t f = 0; f < a.size(); ++f) {
    if (a[f].size() != b[f].size()) throw ValueError("mcd: cepstral orders differ");
    double sq = 0.0;
    for (size_t i = 0; i < a[f].size(); ++i) {
      const double diff = a[f][i] - b[f][i];
      sq += diff * diff;
    }
    total += k * std::sqrt(2.0 * sq);
  }
  return total / static_cast<double>(a.size());
}

double mcd(const Waveform& ref, const Waveform& syn, const MelConfig& cfg) {
  if (ref.samples.size() != syn.samples.size())
    throw ValueError("mcd: reference has " + std::to_string(ref.samples.size()) +
                     " samples, synthesis has " + std::to_string(syn.samples.size()));
  NoGradGuard no_grad;
  return mcd_from_cepstra(mel_cepstra(log_mel(ref, cfg)), mel_cepstra(log_mel(syn, cfg)));
}

}  // namespace wolonet
