#include "core/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

namespace relsim {

namespace {

// One attempt either reaches the finish line or dies at the first failure.
// Progress within an attempt survives only up to the last checkpoint whose
// write completed; a cycle is dt of productive work followed by w of write.
double run_trial(const EttrParams& p, QueueModel qm, double sigma_log,
                 Rng& rng) {
  double lam = p.lambda_per_second();
  double r_req = p.required_productive.s;
  double u0 = p.restart_overhead.s;
  double w = p.checkpoint_write.s;
  double dt = p.checkpoint_interval.s > 0.0
                  ? p.checkpoint_interval.s
                  : std::numeric_limits<double>::infinity();
  double q_mean = p.queue_wait.s;
  double mu_log = q_mean > 0.0 ? std::log(q_mean) - 0.5 * sigma_log * sigma_log
                               : 0.0;

  double progress = 0.0;   // checkpoint-durable productive seconds
  double scheduled = 0.0;  // occupied wall clock across attempts
  double queued = 0.0;

  auto queue_draw = [&]() {
    if (q_mean <= 0.0) return 0.0;
    return qm == QueueModel::Constant ? q_mean
                                      : rng.lognormal(mu_log, sigma_log);
  };

  queued += queue_draw();
  while (progress < r_req) {
    double remaining = r_req - progress;
    double writes = std::isinf(dt) ? 0.0 : std::floor(remaining / dt);
    // A run ending exactly on a checkpoint boundary still writes that final
    // checkpoint before exiting.
    double t_done = u0 + remaining + writes * w;
    double t_fail = rng.exponential(lam);
    if (t_fail >= t_done) {
      scheduled += t_done;
      progress = r_req;
      break;
    }
    scheduled += t_fail;
    double productive_window = t_fail - u0;
    if (productive_window > 0.0 && !std::isinf(dt)) {
      double completed_cycles = std::floor(productive_window / (dt + w));
      progress = std::min(r_req, progress + completed_cycles * dt);
    }
    queued += queue_draw();
  }
  return r_req / (scheduled + queued);
}

}  // namespace

MonteCarloEstimate monte_carlo_expected_ettr(const EttrParams& p,
                                             const MonteCarloOptions& opt) {
  require(opt.trials >= 100, Errc::invalid_argument,
          "need at least 100 trials for a meaningful standard error");
  require(p.n_nodes >= 1, Errc::invalid_argument, "n_nodes must be >= 1");
  require(p.required_productive.s > 0.0, Errc::invalid_argument,
          "required productive time must be positive");
  require(p.failure_rate.per_node_day >= 0.0, Errc::invalid_argument,
          "failure rate must be non-negative");
  require(opt.queue_sigma_log > 0.0 || opt.queue_model == QueueModel::Constant,
          Errc::invalid_argument, "queue sigma must be positive");

  int threads = std::max(1, opt.threads);
  std::vector<double> results(opt.trials);
  auto worker = [&](int begin, int end) {
    for (int t = begin; t < end; ++t) {
      Rng rng(derive_seed(opt.seed, 0x4d43ULL, static_cast<uint64_t>(t)));
      results[t] = run_trial(p, opt.queue_model, opt.queue_sigma_log, rng);
    }
  };
  if (threads == 1) {
    worker(0, opt.trials);
  } else {
    std::vector<std::thread> pool;
    int chunk = (opt.trials + threads - 1) / threads;
    for (int i = 0; i < threads; ++i) {
      int b = i * chunk;
      int e = std::min(opt.trials, b + chunk);
      if (b >= e) break;
      pool.emplace_back(worker, b, e);
    }
    for (auto& th : pool) th.join();
  }

  RunningStats stats;
  for (double v : results) stats.add(v);
  return {stats.mean, stats.stderr_of_mean(), opt.trials};
}

}  // namespace relsim
