#pragma once

#include <cmath>
#include <cstdint>

#include "ttr/error.hpp"

namespace ttr {

namespace detail {

inline std::int64_t round_steps(double x) {
  return static_cast<std::int64_t>(std::llround(x));
}

}  // namespace detail

// Linear warmup to base_lr, then a half-cosine decay to zero at num_steps.
struct WarmupCosineSpec {
  double base_lr = 0.0;
  std::int64_t num_steps = 0;
  std::int64_t warmup_steps = 0;

  WarmupCosineSpec(double base_lr_, std::int64_t num_steps_, std::int64_t warmup_steps_)
      : base_lr(base_lr_), num_steps(num_steps_), warmup_steps(warmup_steps_) {
    if (!(base_lr > 0.0)) throw Error("InvalidSchedule", "base_lr must be > 0");
    if (!(warmup_steps > 0 && warmup_steps < num_steps)) {
      throw Error("InvalidSchedule", "need 0 < warmup_steps < num_steps");
    }
  }

  // warmup given as a fraction of num_steps, rounded to the nearest step.
  static WarmupCosineSpec from_relative(double base_lr, std::int64_t num_steps,
                                        double warmup_pct) {
    return WarmupCosineSpec(base_lr, num_steps,
                            detail::round_steps(warmup_pct * static_cast<double>(num_steps)));
  }
};

// Linear warmup to base_lr, linear decay to base_lr * decay_factor at
// decay_steps, constant afterward. decay_steps counts from step 0 and
// includes the warmup phase.
struct WarmupLinearConstantSpec {
  double base_lr = 0.0;
  std::int64_t num_steps = 0;
  std::int64_t warmup_steps = 0;
  double decay_factor = 1.0;
  std::int64_t decay_steps = 0;

  WarmupLinearConstantSpec(double base_lr_, std::int64_t num_steps_, std::int64_t warmup_steps_,
                           double decay_factor_, std::int64_t decay_steps_)
      : base_lr(base_lr_),
        num_steps(num_steps_),
        warmup_steps(warmup_steps_),
        decay_factor(decay_factor_),
        decay_steps(decay_steps_) {
    if (!(base_lr > 0.0)) throw Error("InvalidSchedule", "base_lr must be > 0");
    if (!(decay_factor > 0.0 && decay_factor <= 1.0)) {
      throw Error("InvalidSchedule", "decay_factor must be in (0, 1]");
    }
    if (!(warmup_steps > 0 && warmup_steps <= decay_steps && decay_steps <= num_steps)) {
      throw Error("InvalidSchedule", "need 0 < warmup_steps <= decay_steps <= num_steps");
    }
  }

  double reduced_lr() const { return base_lr * decay_factor; }

  // warmup as a fraction of num_steps; the decay length as a fraction of the
  // steps remaining after warmup.
  static WarmupLinearConstantSpec from_relative(double base_lr, std::int64_t num_steps,
                                                double warmup_pct, double decay_factor,
                                                double decay_steps_frac) {
    const std::int64_t warmup =
        detail::round_steps(warmup_pct * static_cast<double>(num_steps));
    const std::int64_t decay =
        warmup + detail::round_steps(decay_steps_frac * static_cast<double>(num_steps - warmup));
    return WarmupLinearConstantSpec(base_lr, num_steps, warmup, decay_factor, decay);
  }
};

inline double warmup_cosine(std::int64_t t, const WarmupCosineSpec& spec) {
  if (t < 0 || t > spec.num_steps) {
    throw Error("OutOfRangeStep", "step " + std::to_string(t) + " outside [0, num_steps]");
  }
  if (t <= spec.warmup_steps) {
    return spec.base_lr * static_cast<double>(t) / static_cast<double>(spec.warmup_steps);
  }
  const double progress = static_cast<double>(t - spec.warmup_steps) /
                          static_cast<double>(spec.num_steps - spec.warmup_steps);
  return 0.5 * spec.base_lr * (1.0 + std::cos(3.14159265358979323846 * progress));
}

inline double warmup_linear_constant(std::int64_t t, const WarmupLinearConstantSpec& spec) {
  if (t < 0 || t > spec.num_steps) {
    throw Error("OutOfRangeStep", "step " + std::to_string(t) + " outside [0, num_steps]");
  }
  if (t <= spec.warmup_steps) {
    return spec.base_lr * static_cast<double>(t) / static_cast<double>(spec.warmup_steps);
  }
  if (t <= spec.decay_steps) {
    // base_lr is factored out so that scaling it scales the output exactly.
    const double span = static_cast<double>(spec.decay_steps - spec.warmup_steps);
    const double blend = static_cast<double>(spec.decay_steps - t) / span +
                         spec.decay_factor * static_cast<double>(t - spec.warmup_steps) / span;
    return spec.base_lr * blend;
  }
  return spec.reduced_lr();
}

}  // namespace ttr
