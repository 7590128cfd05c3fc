#pragma once

#include <cstdint>

#include "core/ettr_analytic.hpp"

namespace relsim {

enum class QueueModel {
  Constant,   // every wait is exactly the mean
  Lognormal,  // lognormal with the given log-space sigma, mean preserved
};

struct MonteCarloOptions {
  int trials{1000};
  uint64_t seed{0};
  QueueModel queue_model{QueueModel::Constant};
  double queue_sigma_log{1.0};
  int threads{1};
};

struct MonteCarloEstimate {
  double mean{0.0};
  double stderr_of_mean{0.0};
  int trials{0};
};

// Direct stochastic re-model of one checkpointed job: Poisson failures over
// the allocation, restart overhead and queue wait per interruption, rollback
// to the last completed checkpoint. Shares no code with the closed forms;
// each trial is driven by its own derived seed, so the result is independent
// of thread count.
MonteCarloEstimate monte_carlo_expected_ettr(const EttrParams& p,
                                             const MonteCarloOptions& opt);

}  // namespace relsim
