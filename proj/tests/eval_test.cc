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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_util.h"

namespace wolonet {
namespace {

TEST(MAdds, ClosedForms) {
  EXPECT_EQ(madds_wolo(8, 3), 2 * 12 * 8 + 64 + 8);
  EXPECT_EQ(madds_wolo(512, 5), 293376);
  EXPECT_EQ(madds_resblock(512, 5), 1310720);
  EXPECT_EQ(madds_resblock_with_bias(512, 5), 1310720 + 512);
  EXPECT_NEAR(madds_ratio(512, 5), 1310720.0 / 293376.0, 1e-15);
  EXPECT_EQ(std::round(madds_ratio(512, 5) * 1000.0), 4468.0);
}

TEST(MAdds, EmpiricalWithinSlackOnGrid) {
  for (int64_t C : {8, 64, 512})
    for (int64_t K : {1, 3, 5}) {
      const int64_t e = empirical_madds(C, K);
      EXPECT_LE(std::llabs(e - madds_wolo(C, K)), madds_slack(C, K)) << "C " << C << " K " << K;
      EXPECT_EQ(madds_slack(C, K), 3 * K * K + 3 * K + 2 * C);
    }
}

TEST(MAdds, ReportAndTables) {
  MAddsReport r = madds_report(512, 5);
  EXPECT_EQ(r.wolo_madds, 293376);
  EXPECT_EQ(r.resblock_madds, 1310720);
  EXPECT_DOUBLE_EQ(r.ratio, madds_ratio(512, 5));
  EXPECT_GT(r.empirical, 0);
  const std::string md = madds_table_markdown({r});
  EXPECT_NE(md.find("293376"), std::string::npos);
  const std::string csv = madds_table_csv({r, madds_report(8, 3, false)});
  EXPECT_NE(csv.find("1310720"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

// c_i = sqrt(2/M) sum_m x_m cos(pi i (m + 1/2) / M)
std::vector<double> dct_loops(const std::vector<double>& x, int order) {
  const double M = static_cast<double>(x.size());
  std::vector<double> c;
  for (int i = 1; i <= order; ++i) {
    double acc = 0.0;
    for (size_t m = 0; m < x.size(); ++m) acc += x[m] * std::cos(std::numbers::pi * i * (m + 0.5) / M);
    c.push_back(std::sqrt(2.0 / M) * acc);
  }
  return c;
}

TEST(Mcd, CepstraMatchLoopDct) {
  std::mt19937_64 rng(1);
  Tensor lm = testing::random_tensor({20, 3}, rng);
  auto cep = mel_cepstra(lm, 13);
  ASSERT_EQ(cep.size(), 3u);
  for (int64_t f = 0; f < 3; ++f) {
    std::vector<double> frame;
    for (int64_t m = 0; m < 20; ++m) frame.push_back(lm.at({m, f}));
    auto expect = dct_loops(frame, 13);
    for (int i = 0; i < 13; ++i) EXPECT_NEAR(cep[f][i], expect[i], 1e-12);
  }
}

TEST(Mcd, SingleCoefficientPerturbation) {
  const double k = 10.0 / std::log(10.0);
  std::vector<std::vector<double>> a(5, std::vector<double>(13, 0.3)), b = a;
  for (double delta : {0.1, 0.2, -1.5}) {
    b = a;
    for (auto& f : b) f[4] += delta;
    EXPECT_NEAR(mcd_from_cepstra(a, b), k * std::sqrt(2.0) * std::fabs(delta), 1e-9);
  }
  b = a;
  b[0][0] += 1.0;
  EXPECT_NEAR(mcd_from_cepstra(a, b), k * std::sqrt(2.0) / 5.0, 1e-12);
}

TEST(Mcd, IdentitySymmetryAndErrors) {
  Waveform a, b;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 0.1);
  for (int i = 0; i < 4096; ++i) {
    a.samples.push_back(n(rng));
    b.samples.push_back(n(rng));
  }
  EXPECT_EQ(mcd(a, a), 0.0);
  EXPECT_EQ(mcd(a, b), mcd(b, a));
  EXPECT_GT(mcd(a, b), 0.0);
  b.samples.pop_back();
  EXPECT_THROW(mcd(a, b), ValueError);
}

}  // namespace
}  // namespace wolonet
