// Copyright 2026 The wavc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Central finite-difference gradient check in double precision.

#ifndef WAVC_TESTS_GRADCHECK_H_
#define WAVC_TESTS_GRADCHECK_H_

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <torch/torch.h>

namespace wavc::testing {

struct GradCheckResult {
  double max_error = 0.0;  // max over elements of |a - n| / (atol/rtol + |n|)*rtol scale, see below
  double max_abs_diff = 0.0;
  std::string worst;       // name of the worst input
  bool ok = true;
};

/// Compares autograd gradients of the scalar `loss()` with respect to each
/// named input against central differences with step h. An element passes
/// when |analytic - numeric| <= atol + rtol * |numeric|; max_error reports
/// the largest |analytic - numeric| / (atol / rtol + |numeric|), which is at
/// most rtol for a passing check.
inline GradCheckResult GradCheck(const std::function<torch::Tensor()> &loss,
                                 std::vector<std::pair<std::string, torch::Tensor>> inputs, double h = 1e-6,
                                 double rtol = 1e-4, double atol = 1e-8) {
  GradCheckResult r;
  for (auto &[name, t] : inputs) {
    if (t.grad().defined()) t.mutable_grad().zero_();
  }
  auto l = loss();
  auto grads = torch::autograd::grad({l}, [&] {
    std::vector<torch::Tensor> v;
    for (auto &p : inputs) v.push_back(p.second);
    return v;
  }(), /*grad_outputs=*/{}, /*retain_graph=*/false, /*create_graph=*/false, /*allow_unused=*/true);

  torch::NoGradGuard no_grad;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    auto &[name, t] = inputs[k];
    auto analytic = grads[k].defined() ? grads[k] : torch::zeros_like(t);
    auto flat = t.view({-1});
    auto aflat = analytic.reshape({-1});
    for (int64_t i = 0; i < flat.numel(); ++i) {
      const double orig = flat[i].item<double>();
      flat[i] = orig + h;
      const double up = loss().item<double>();
      flat[i] = orig - h;
      const double down = loss().item<double>();
      flat[i] = orig;
      const double numeric = (up - down) / (2 * h);
      const double a = aflat[i].item<double>();
      const double diff = std::fabs(a - numeric);
      const double err = diff / (atol / rtol + std::fabs(numeric)) * 1.0;
      if (diff > atol + rtol * std::fabs(numeric)) r.ok = false;
      if (err > r.max_error) {
        r.max_error = err;
        r.worst = name;
      }
      r.max_abs_diff = std::max(r.max_abs_diff, diff);
    }
  }
  return r;
}

}  // namespace wavc::testing

#endif  // WAVC_TESTS_GRADCHECK_H_
