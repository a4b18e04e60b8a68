#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "sanid/rng.hpp"
#include "sanid/tensor.hpp"

namespace sanid {

// One parameter array under test: the live value (perturbed in place and
// restored bit-exactly) and the analytic gradient to compare against.
struct GradSlot {
  std::string name;
  Tensor* value = nullptr;
  const Tensor* analytic = nullptr;
};

struct GradCheckOptions {
  double step = 1e-5;
  // Arrays up to this size are checked on every coordinate; larger ones on
  // a random subsample of `sample_size` coordinates.
  std::size_t full_check_limit = 256;
  std::size_t sample_size = 64;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
  std::string worst_slot;
  std::size_t worst_index = 0;
};

// Central finite differences against the analytic gradient. The error for a
// coordinate is |g_a - g_fd| / max(1, |g_a|, |g_fd|).
GradCheckResult grad_check(const std::function<double()>& objective,
                           std::span<const GradSlot> slots, Rng& rng,
                           const GradCheckOptions& options = {});

}  // namespace sanid
