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

#include "wolonet/checks.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "wolonet/dsp.h"
#include "wolonet/grad_check.h"
#include "wolonet/losses.h"
#include "wolonet/ops.h"
#include "wolonet/wolo.h"

namespace wolonet {

namespace {

class Sampler {
 public:
  explicit Sampler(uint64_t seed) : rng_(seed) {}

  Tensor normal(Shape shape, double scale = 1.0, bool grad = true) {
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> v(shape_numel(shape));
    for (auto& x : v) x = d(rng_);
    Tensor t(std::move(shape), std::move(v));
    if (grad) t.set_requires_grad(true);
    return t;
  }
  Tensor uniform(Shape shape, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(shape_numel(shape));
    for (auto& x : v) x = d(rng_);
    Tensor t(std::move(shape), std::move(v));
    t.set_requires_grad(true);
    return t;
  }
  // Magnitudes in [lo, hi] with random sign, keeping away from kinks at 0.
  Tensor signed_away(Shape shape, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::bernoulli_distribution sign;
    std::vector<double> v(shape_numel(shape));
    for (auto& x : v) x = sign(rng_) ? d(rng_) : -d(rng_);
    Tensor t(std::move(shape), std::move(v));
    t.set_requires_grad(true);
    return t;
  }
  int64_t integer(int64_t lo, int64_t hi) {
    return std::uniform_int_distribution<int64_t>(lo, hi)(rng_);
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Projects a tensor-valued function onto a fixed random direction so that
// every output entry contributes to the checked scalar.
GradSuiteEntry check(std::string name, const std::function<Tensor()>& build,
                     std::vector<Tensor> params, Sampler& s, GradCheckOptions opt = {}) {
  Shape out_shape;
  {
    NoGradGuard no_grad;
    out_shape = build().shape();
  }
  Tensor direction = s.normal(out_shape, 1.0, false);
  auto f = [&] { return sum(mul(build(), direction)); };
  GradCheckResult r = grad_check(f, std::move(params), opt);
  return {std::move(name), r.max_rel_error, r.entries_checked};
}

void ops_suite(Sampler& s, std::vector<GradSuiteEntry>& out) {
  {
    Tensor a = s.normal({3, 4}), b = s.normal({4});
    out.push_back(check("add", [&] { return add(a, b); }, {a, b}, s));
  }
  {
    Tensor a = s.normal({3, 4}), b = s.normal({3, 4});
    out.push_back(check("sub", [&] { return sub(a, b); }, {a, b}, s));
  }
  {
    Tensor a = s.normal({2, 3, 4}), b = s.normal({3, 4});
    out.push_back(check("mul", [&] { return mul(a, b); }, {a, b}, s));
  }
  {
    Tensor a = s.normal({5});
    out.push_back(check("add_scalar", [&] { return add_scalar(a, 0.7); }, {a}, s));
    out.push_back(check("mul_scalar", [&] { return mul_scalar(a, -1.3); }, {a}, s));
    out.push_back(check("neg", [&] { return neg(a); }, {a}, s));
  }
  {
    Tensor a = s.normal({3, 4}), b = s.normal({4, 5});
    out.push_back(check("matmul", [&] { return matmul(a, b); }, {a, b}, s));
    Tensor c = s.normal({2, 3, 4}), d = s.normal({2, 4, 2});
    out.push_back(check("matmul_batched", [&] { return matmul(c, d); }, {c, d}, s));
    Tensor e = s.normal({3, 4});
    out.push_back(check("matmul_broadcast", [&] { return matmul(e, d); }, {e, d}, s));
  }
  {
    Tensor a = s.normal({3, 4});
    out.push_back(check("sum", [&] { return sum(a); }, {a}, s));
    out.push_back(check("mean", [&] { return mean(a); }, {a}, s));
    out.push_back(check("sum_axis", [&] { return sum(a, 0); }, {a}, s));
  }
  {
    Tensor a = s.signed_away({6}, 0.2, 1.5);
    out.push_back(check("abs", [&] { return abs(a); }, {a}, s));
    out.push_back(check("leaky_relu", [&] { return leaky_relu(a, 0.1); }, {a}, s));
    Tensor p = s.uniform({6}, 0.3, 2.0);
    out.push_back(check("log", [&] { return log(p); }, {p}, s));
    out.push_back(check("clamp_min", [&] { return clamp_min(a, 0.05); }, {a}, s));
  }
  {
    Tensor a = s.normal({7});
    out.push_back(check("sin", [&] { return sin(a); }, {a}, s));
    out.push_back(check("tanh", [&] { return tanh(a); }, {a}, s));
    Tensor b = s.signed_away({7}, 0.2, 1.0);
    out.push_back(check("hypot", [&] { return hypot(a, b); }, {a, b}, s));
  }
  {
    Tensor a = s.normal({3, 5});
    out.push_back(check("softmax_last", [&] { return softmax(a, -1); }, {a}, s));
    out.push_back(check("softmax_first", [&] { return softmax(a, 0); }, {a}, s));
  }
  {
    Tensor x = s.normal({2, 4, 11}), w = s.normal({6, 2, 3}), b = s.normal({6});
    out.push_back(check("conv1d",
                        [&] {
                          return conv1d(x, w, b,
                                        {.stride = 2, .padding = 2, .dilation = 2, .groups = 2});
                        },
                        {x, w, b}, s));
    Tensor w1 = s.normal({3, 4, 1});
    out.push_back(check("conv1d_pointwise", [&] { return conv1d(x, w1, Tensor()); }, {x, w1}, s));
  }
  {
    Tensor x = s.normal({2, 3, 6}), w = s.normal({3, 4, 4}), b = s.normal({4});
    out.push_back(check("conv_transpose1d",
                        [&] {
                          return conv_transpose1d(x, w, b,
                                                  {.stride = 2, .padding = 1, .output_padding = 1});
                        },
                        {x, w, b}, s));
  }
  {
    Tensor x = s.normal({2, 1, 13});
    out.push_back(check("avg_pool1d", [&] { return avg_pool1d(x, 4, 2, 2); }, {x}, s));
  }
  {
    Tensor a = s.normal({2, 3, 4});
    out.push_back(check("reshape", [&] { return reshape(a, {4, -1}); }, {a}, s));
    out.push_back(check("permute", [&] { return permute(a, {2, 0, 1}); }, {a}, s));
    out.push_back(check("transpose", [&] { return transpose(a, 0, 2); }, {a}, s));
    out.push_back(check("slice", [&] { return slice(a, 2, 1, 3); }, {a}, s));
    out.push_back(check("pad_zero", [&] { return pad(a, 2, 1); }, {a}, s));
    out.push_back(check("pad_reflect", [&] { return pad(a, 3, 2, PadMode::kReflect); }, {a}, s));
    Tensor b = s.normal({2, 2, 4});
    out.push_back(check("concat", [&] { return concat({a, b}, 1); }, {a, b}, s));
  }
  {
    Tensor x = s.normal({3, 9});
    out.push_back(check("unfold1d", [&] { return unfold1d(x, 3, 2); }, {x}, s));
    Tensor a = s.normal({9, 5, 3});
    out.push_back(check("fold1d", [&] { return fold1d(a, 5, 1); }, {a}, s));
  }
  {
    Tensor w = s.normal({7, 3, 3}), b = s.normal({7, 3}), y = s.normal({7, 3, 4});
    out.push_back(check("apply_dynamic_kernel", [&] { return apply_dynamic_kernel(w, b, y); },
                        {w, b, y}, s));
  }
}

void wolo_suite(Sampler& s, std::vector<GradSuiteEntry>& out) {
  for (auto mode : {KernelActivation::kSine, KernelActivation::kTanh, KernelActivation::kSoftmax}) {
    const int64_t C = 4, T = 9, K = 3, d = 2;
    WoloParams p = WoloParams::init(C, K, d, mode, s.engine());
    p.U = s.normal({K * K + K, C}, 0.5);
    p.V = s.normal({K * K + K}, 0.5);
    p.post_w = s.normal({C, C}, 0.5);
    p.post_b = s.normal({C}, 0.5);
    Tensor x = s.signed_away({C, T}, 0.1, 1.5);
    const std::string prefix = "wolo_block[" + std::string(activation_name(mode)) + "].";
    auto block = [&] { return wolo_block(x, p); };
    out.push_back(check(prefix + "X", block, {x}, s));
    out.push_back(check(prefix + "U", block, {p.U}, s));
    out.push_back(check(prefix + "V", block, {p.V}, s));
    out.push_back(check(prefix + "post_w", block, {p.post_w}, s));
    out.push_back(check(prefix + "post_b", block, {p.post_b}, s));
  }
}

MelConfig small_mel() {
  MelConfig m;
  m.sample_rate = 8000;
  m.n_fft = 64;
  m.hop = 16;
  m.win_length = 64;
  m.n_mels = 8;
  m.fmin = 0.0;
  m.fmax = 4000.0;
  return m;
}

void losses_suite(Sampler& s, std::vector<GradSuiteEntry>& out) {
  std::vector<Tensor> real{s.normal({2, 1, 5}), s.normal({3, 4})};
  std::vector<Tensor> fake{s.normal({2, 1, 5}), s.normal({3, 4})};
  std::vector<Tensor> all = real;
  all.insert(all.end(), fake.begin(), fake.end());
  out.push_back(check("adv_d_loss", [&] { return adv_d_loss(real, fake); }, all, s));
  out.push_back(check("adv_g_loss", [&] { return adv_g_loss(fake); }, fake, s));

  std::vector<std::vector<Tensor>> rf{{s.normal({2, 3}), s.normal({4})}, {s.normal({5})}};
  std::vector<std::vector<Tensor>> ff{{s.normal({2, 3}), s.normal({4})}, {s.normal({5})}};
  std::vector<Tensor> fm_params;
  for (auto* group : {&rf, &ff})
    for (auto& v : *group) fm_params.insert(fm_params.end(), v.begin(), v.end());
  out.push_back(check("feature_matching_loss", [&] { return feature_matching_loss(rf, ff); },
                      fm_params, s));

  const MelExtractor mel(small_mel());
  Tensor x = s.normal({96}, 0.3, false);
  Tensor x_hat = s.normal({96}, 0.3);
  out.push_back(check("mel_loss", [&] { return mel_loss(x, x_hat, mel); }, {x_hat}, s));

  Tensor a = s.normal({1}), f = s.normal({1}), m = s.normal({1});
  out.push_back(check("total_g_loss", [&] { return total_g_loss(a, f, m, LossWeights{}); },
                      {a, f, m}, s));
}

void dsp_suite(Sampler& s, std::vector<GradSuiteEntry>& out) {
  {
    const MelExtractor mel(small_mel());
    Tensor x = s.normal({80}, 0.3);
    out.push_back(check("log_mel[small]", [&] { return mel(x); }, {x}, s));
  }
  {
    const MelExtractor mel(MelConfig{});
    Tensor x = s.normal({1024}, 0.3);
    GradCheckOptions opt;
    opt.max_entries_per_param = 48;
    out.push_back(check("log_mel[default]", [&] { return mel(x); }, {x}, s, opt));
  }
}

}  // namespace

std::vector<std::string> gradient_suite_modules() { return {"ops", "wolo", "losses", "dsp"}; }

std::vector<GradSuiteEntry> gradient_suite(const std::string& module, uint64_t seed) {
  std::vector<GradSuiteEntry> out;
  Sampler s(seed);
  const bool all = module == "all";
  const auto modules = gradient_suite_modules();
  if (!all && std::find(modules.begin(), modules.end(), module) == modules.end())
    throw ValueError("unknown gradient suite \"" + module + "\"");
  if (all || module == "ops") ops_suite(s, out);
  if (all || module == "wolo") wolo_suite(s, out);
  if (all || module == "losses") losses_suite(s, out);
  if (all || module == "dsp") dsp_suite(s, out);
  return out;
}

OracleReport oracle_check(int trials, uint64_t seed, double tolerance) {
  if (trials < 1) throw ValueError("oracle_check: trials must be >= 1");
  Sampler s(seed);
  OracleReport rep;
  rep.trials = trials;
  for (int i = 0; i < trials; ++i) {
    const int64_t C = s.integer(1, 8), T = s.integer(1, 32);
    const int64_t K = 2 * s.integer(0, 2) + 1, d = s.integer(1, 3);
    const int64_t N = s.integer(1, 2);
    Tensor x = N == 1 ? s.normal({C, T}, 1.0, false) : s.normal({N, C, T}, 1.0, false);
    Tensor U = s.normal({K * K + K, C}, 0.7, false), V = s.normal({K * K + K}, 0.7, false);
    for (auto mode : {KernelActivation::kSine, KernelActivation::kTanh, KernelActivation::kSoftmax}) {
      WoloParams p = WoloParams::init(C, K, d, mode, s.engine());
      p.U = U;
      p.V = V;
      NoGradGuard no_grad;
      Tensor fast = wolo_attention(x, p);
      Tensor ref = wolo_attention_reference(x, p);
      double worst = 0.0;
      auto a = fast.data(), b = ref.data();
      for (size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::fabs(a[j] - b[j]));
      if (!(worst <= tolerance)) ++rep.breaches;
      if (worst > rep.max_abs_error || !std::isfinite(worst)) {
        rep.max_abs_error = worst;
        std::ostringstream os;
        os << "trial " << i << " N=" << N << " C=" << C << " T=" << T << " K=" << K << " d=" << d
           << " " << activation_name(mode);
        rep.worst = os.str();
      }
    }
  }
  return rep;
}

AdjointReport adjoint_check(int trials, uint64_t seed) {
  if (trials < 1) throw ValueError("adjoint_check: trials must be >= 1");
  Sampler s(seed);
  AdjointReport rep;
  rep.trials = trials;
  NoGradGuard no_grad;
  for (int i = 0; i < trials; ++i) {
    const int64_t C = s.integer(1, 8), T = s.integer(1, 40);
    const int64_t K = 2 * s.integer(0, 3) + 1, d = s.integer(1, 4);
    Tensor a = s.normal({T, K, C}, 1.0, false);
    Tensor x = s.normal({C, T}, 1.0, false);
    const double lhs = sum(mul(fold1d(a, K, d), x)).item();
    const double rhs = sum(mul(a, unfold1d(x, K, d))).item();
    const double denom = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
    rep.max_rel_error = std::max(rep.max_rel_error, std::fabs(lhs - rhs) / denom);
  }
  return rep;
}

}  // namespace wolonet
