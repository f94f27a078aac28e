#include "softarm/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace softarm {

namespace {

void check_series(const std::vector<double>& times,
                  const std::vector<double>& values) {
  if (times.empty() || values.empty()) {
    throw std::domain_error("metrics: empty series");
  }
  if (times.size() != values.size()) {
    throw std::domain_error("metrics: time/value size mismatch");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::domain_error("metrics: timestamps must increase");
    }
  }
}

template <class F>
double trapezoid(const std::vector<double>& times,
                 const std::vector<double>& values, F&& integrand) {
  check_series(times, values);
  double acc = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double h = times[i] - times[i - 1];
    acc += 0.5 * h * (integrand(times[i - 1], values[i - 1]) +
                      integrand(times[i], values[i]));
  }
  return acc;
}

}  // namespace

double metric_iae(const std::vector<double>& times,
                  const std::vector<double>& values) {
  return trapezoid(times, values,
                   [](double, double e) { return std::abs(e); });
}

double metric_itae(const std::vector<double>& times,
                   const std::vector<double>& values) {
  return trapezoid(times, values,
                   [](double t, double e) { return t * std::abs(e); });
}

double metric_ise(const std::vector<double>& times,
                  const std::vector<double>& values) {
  return trapezoid(times, values, [](double, double e) { return e * e; });
}

double metric_rmse(const std::vector<double>& times,
                   const std::vector<double>& values, double t0, double t1) {
  if (!(t1 > t0)) {
    throw std::domain_error("metric_rmse: need t1 > t0");
  }
  return std::sqrt(metric_ise(times, values) / (t1 - t0));
}

}  // namespace softarm
