#include "pspin/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "pspin/error.hpp"

namespace pspin::cli {

Agreement compare_to_reference(const std::vector<Vec3>& reference, const ObservableSeries& sde,
                               double sigma, double abs_floor) {
  if (reference.size() != sde.mean.size()) {
    throw InvalidArgument("reference", "length differs from the SDE series");
  }
  Agreement a;
  a.sigma = sigma;
  a.abs_floor = abs_floor;
  for (std::size_t t = 0; t < reference.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const double dev = std::abs(sde.mean[t][k] - reference[t][k]);
      const double scale = sde.mean_se[t][k] + abs_floor / sigma;
      a.max_abs[k] = std::max(a.max_abs[k], dev);
      a.max_z[k] = std::max(a.max_z[k], scale > 0.0 ? dev / scale : 0.0);
      if (dev > sigma * sde.mean_se[t][k] + abs_floor) {
        ++a.violations[k];
      }
    }
  }
  return a;
}

int count_sign_changes(std::span<const double> values, std::span<const double> threshold) {
  if (values.size() != threshold.size()) {
    throw InvalidArgument("threshold", "length differs from the series");
  }
  int changes = 0, last = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(std::abs(values[i]) > threshold[i])) {
      continue;
    }
    const int sign = values[i] > 0.0 ? 1 : -1;
    if (last != 0 && sign != last) {
      ++changes;
    }
    last = sign;
  }
  return changes;
}

}  // namespace pspin::cli
