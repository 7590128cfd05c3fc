#include "core/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "core/error.hpp"

namespace relsim {

double chi_squared_quantile(double p, double dof) {
  require(p > 0.0 && p < 1.0, Errc::invalid_argument,
          "chi-squared quantile needs p in (0,1)");
  require(dof > 0.0, Errc::invalid_argument,
          "chi-squared quantile needs dof > 0");
  boost::math::chi_squared_distribution<double> dist(dof);
  return boost::math::quantile(dist, p);
}

RateInterval garwood_interval(long long failures, double exposure,
                              double confidence) {
  require(failures >= 0, Errc::invalid_argument,
          "failure count must be non-negative");
  require(exposure > 0.0, Errc::invalid_argument, "exposure must be positive");
  require(confidence > 0.0 && confidence < 1.0, Errc::invalid_argument,
          "confidence must lie in (0,1)");
  double alpha = 1.0 - confidence;
  double k = static_cast<double>(failures);
  RateInterval r;
  r.lower = failures == 0
                ? 0.0
                : chi_squared_quantile(alpha / 2.0, 2.0 * k) / (2.0 * exposure);
  r.upper = chi_squared_quantile(1.0 - alpha / 2.0, 2.0 * k + 2.0) /
            (2.0 * exposure);
  return r;
}

double RunningStats::stderr_of_mean() const {
  return n > 1 ? std::sqrt(variance() / n) : 0.0;
}

}  // namespace relsim
