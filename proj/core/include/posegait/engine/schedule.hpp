#pragma once

#include <cstdint>

namespace posegait::engine {

/// One-cycle learning-rate schedule: cosine warmup from max_lr/div to
/// exactly max_lr at the phase boundary floor(pct_start * (total_steps-1)),
/// then cosine annealing to max_lr/final_div at the last step. Continuous
/// and unimodal across [0, total_steps).
///
/// Throws Error("config") for step outside [0, total_steps).
double onecycle_lr(std::int64_t step, std::int64_t total_steps, double max_lr,
                   double pct_start = 0.3, double div = 25.0,
                   double final_div = 1e4);

}  // namespace posegait::engine
