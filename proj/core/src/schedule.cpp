#include "posegait/engine/schedule.hpp"

#include <cmath>
#include <string>

#include "posegait/error.hpp"

namespace posegait::engine {

double onecycle_lr(std::int64_t step, std::int64_t total_steps, double max_lr,
                   double pct_start, double div, double final_div) {
  if (total_steps < 1) throw Error(errc::config, "total_steps must be >= 1");
  if (step < 0 || step >= total_steps)
    throw Error(errc::config, "step " + std::to_string(step) + " outside [0, " +
                                  std::to_string(total_steps) + ")");
  if (!(max_lr > 0.0)) throw Error(errc::config, "max_lr must be > 0");
  if (pct_start < 0.0 || pct_start > 1.0)
    throw Error(errc::config, "pct_start must be in [0, 1]");
  if (!(div > 0.0) || !(final_div > 0.0))
    throw Error(errc::config, "div and final_div must be > 0");

  constexpr double kPi = 3.14159265358979323846;
  const double initial_lr = max_lr / div;
  const double final_lr = max_lr / final_div;
  const std::int64_t last = total_steps - 1;
  const std::int64_t boundary =
      static_cast<std::int64_t>(std::floor(pct_start * static_cast<double>(last)));

  if (step <= boundary) {
    if (boundary == 0) return max_lr;
    const double frac = static_cast<double>(step) / static_cast<double>(boundary);
    return initial_lr + (max_lr - initial_lr) * 0.5 * (1.0 - std::cos(kPi * frac));
  }
  const double frac = static_cast<double>(step - boundary) /
                      static_cast<double>(last - boundary);
  return final_lr + (max_lr - final_lr) * 0.5 * (1.0 + std::cos(kPi * frac));
}

}  // namespace posegait::engine
