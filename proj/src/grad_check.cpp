#include "sanid/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sanid/error.hpp"

namespace sanid {
namespace {

std::vector<std::size_t> coordinates(std::size_t size, Rng& rng,
                                     const GradCheckOptions& options) {
  std::vector<std::size_t> all(size);
  std::iota(all.begin(), all.end(), 0);
  if (size <= options.full_check_limit) return all;
  rng.shuffle(all);
  all.resize(std::max<std::size_t>(options.sample_size, 50));
  std::sort(all.begin(), all.end());
  return all;
}

double evaluate(const std::function<double()>& objective, const std::string& slot,
                std::size_t index) {
  const double value = objective();
  if (!std::isfinite(value)) {
    fail(ErrorKind::kNumeric, "objective is not finite when perturbing " + slot +
                                  "[" + std::to_string(index) + "]");
  }
  return value;
}

}  // namespace

GradCheckResult grad_check(const std::function<double()>& objective,
                           std::span<const GradSlot> slots, Rng& rng,
                           const GradCheckOptions& options) {
  GradCheckResult result;
  for (const GradSlot& slot : slots) {
    if (slot.value == nullptr || slot.analytic == nullptr ||
        !slot.value->same_shape(*slot.analytic)) {
      fail(ErrorKind::kDimension, "grad_check slot " + slot.name +
                                      " has no gradient of matching shape");
    }
    Tensor& value = *slot.value;
    for (std::size_t i : coordinates(value.size(), rng, options)) {
      const double saved = value[i];
      double plus = 0.0, minus = 0.0;
      try {
        value[i] = saved + options.step;
        plus = evaluate(objective, slot.name, i);
        value[i] = saved - options.step;
        minus = evaluate(objective, slot.name, i);
      } catch (...) {
        value[i] = saved;
        throw;
      }
      value[i] = saved;

      const double numeric = (plus - minus) / (2.0 * options.step);
      const double analytic = (*slot.analytic)[i];
      const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
      const double error = std::abs(analytic - numeric) / scale;
      ++result.coords_checked;
      if (error > result.max_rel_error || !std::isfinite(error)) {
        result.max_rel_error = error;
        result.worst_slot = slot.name;
        result.worst_index = i;
      }
    }
  }
  return result;
}

}  // namespace sanid
