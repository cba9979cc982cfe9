#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "wildgan/layers.hpp"

namespace wildgan::testutil {

struct GradCheckResult {
  int checked = 0;
  int failed = 0;
  int64_t param_count = 0;
  std::string first_failure;
};

// Central-difference check of d(loss)/d(param) for every parameter element.
// loss() must re-run the forward pass; backward() must populate grads after
// zeroing. Retries with smaller steps so isolated piecewise-linear kinks
// crossed by [theta-h, theta+h] do not count as failures (a backward bug
// persists as h shrinks).
inline GradCheckResult check_param_grads_impl(
    std::vector<nn::ParamRef<double>> params, const std::function<double()>& loss,
    const std::function<void()>& backward, double rtol = 1e-3, double atol = 1e-8) {
  GradCheckResult res;
  for (auto& p : params) {
    p.param->zero_grad();
    res.param_count += p.param->value.numel();
  }
  loss();
  backward();
  for (auto& p : params) {
    for (size_t i = 0; i < p.param->value.data.size(); ++i) {
      double& theta = p.param->value.data[i];
      const double orig = theta;
      const double analytic = p.param->grad.data[i];
      bool ok = false;
      double numeric = 0;
      for (double h : {std::max(1e-5, 1e-4 * std::abs(orig)), 1e-6, 1e-7}) {
        theta = orig + h;
        const double lp = loss();
        theta = orig - h;
        const double lm = loss();
        theta = orig;
        numeric = (lp - lm) / (2 * h);
        const double err = std::abs(numeric - analytic);
        if (err <= rtol * std::max(std::abs(numeric), std::abs(analytic)) + atol) {
          ok = true;
          break;
        }
      }
      ++res.checked;
      if (!ok) {
        ++res.failed;
        if (res.first_failure.empty())
          res.first_failure = p.name + "[" + std::to_string(i) + "]: analytic=" +
                              std::to_string(analytic) + " numeric=" +
                              std::to_string(numeric);
      }
    }
  }
  return res;
}

}  // namespace wildgan::testutil
