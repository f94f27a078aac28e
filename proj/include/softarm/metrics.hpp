#pragma once

#include <array>
#include <string>
#include <vector>

namespace softarm {

/// Trapezoidal quadrature metrics over a sampled error signal. Timestamps
/// must be strictly increasing; empty series are rejected.
double metric_iae(const std::vector<double>& times,
                  const std::vector<double>& values);
double metric_itae(const std::vector<double>& times,
                   const std::vector<double>& values);
double metric_ise(const std::vector<double>& times,
                  const std::vector<double>& values);
/// Root of the mean squared error over [t0, t1].
double metric_rmse(const std::vector<double>& times,
                   const std::vector<double>& values, double t0, double t1);

struct MetricsSummary {
  std::string controller;
  std::string scenario_id;
  std::array<double, 4> rmse = {0, 0, 0, 0};  // per configuration coordinate
  double iae = 0.0;   // on the curvature error magnitude
  double itae = 0.0;
  double ise = 0.0;
};

}  // namespace softarm
