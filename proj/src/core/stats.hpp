#pragma once

#include <cstdint>

namespace relsim {

// Quantile of the chi-squared distribution with dof degrees of freedom.
double chi_squared_quantile(double p, double dof);

// Two-sided exact Poisson-rate confidence interval (Garwood construction).
// Units of the bounds are failures per unit of `exposure`.
struct RateInterval {
  double lower{0.0};
  double upper{0.0};
};

RateInterval garwood_interval(long long failures, double exposure,
                              double confidence = 0.90);

// Running mean/variance accumulator (Welford).
struct RunningStats {
  long long n{0};
  double mean{0.0};
  double m2{0.0};

  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
  double stderr_of_mean() const;
};

}  // namespace relsim
