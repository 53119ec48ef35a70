#include "opl/dataset.hpp"

#include <cmath>
#include <sstream>

#include "opl/errors.hpp"

namespace opl {

ObservationalDataset validate_dataset(ObservationalDataset raw,
                                      double eta_warning,
                                      ValidationReport* report) {
  const std::size_t n = raw.features.rows();
  const std::size_t p = raw.features.cols();
  const int d = raw.num_actions;

  if (n < 1 || p < 1) {
    throw DimensionMismatch("dataset needs at least one row and one feature");
  }
  if (d < 2) {
    throw DimensionMismatch("need at least two actions, got " + std::to_string(d));
  }
  if (raw.actions.size() != n || raw.rewards.size() != n) {
    throw DimensionMismatch("features, actions and rewards must have equal length");
  }

  for (double v : raw.features.data()) {
    if (!std::isfinite(v)) throw NonFiniteValue("non-finite feature value");
  }
  for (double y : raw.rewards) {
    if (!std::isfinite(y)) throw NonFiniteValue("non-finite reward value");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int a = raw.actions[i];
    if (a < 0 || a >= d) {
      throw ActionOutOfRange("action " + std::to_string(a) + " at row " +
                             std::to_string(i) + " outside [0, " + std::to_string(d) + ")");
    }
  }

  if (raw.known_propensities) {
    const Matrix& e = *raw.known_propensities;
    if (e.rows() != n || e.cols() != static_cast<std::size_t>(d)) {
      throw DimensionMismatch("known_propensities must be n x num_actions");
    }
    double min_seen = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row_sum = 0.0;
      for (int j = 0; j < d; ++j) {
        const double v = e.at(i, j);
        if (!std::isfinite(v) || v < 0.0) {
          throw InvalidPropensityRow("propensity at (" + std::to_string(i) + ", " +
                                     std::to_string(j) + ") is negative or non-finite");
        }
        row_sum += v;
        min_seen = std::min(min_seen, v);
      }
      if (std::abs(row_sum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "propensity row " << i << " sums to " << row_sum;
        throw InvalidPropensityRow(msg.str());
      }
      if (e.at(i, raw.actions[i]) <= 0.0) {
        throw InvalidPropensityRow("zero propensity on logged action at row " +
                                   std::to_string(i));
      }
    }
    if (report && min_seen < eta_warning) {
      std::ostringstream msg;
      msg << "minimum known propensity " << min_seen << " is below the overlap floor "
          << eta_warning;
      report->warnings.push_back(msg.str());
    }
  }

  return raw;
}

}  // namespace opl
