#pragma once

#include <array>
#include <span>
#include <vector>

#include "pspin/sde.hpp"

namespace pspin::cli {

/// Pointwise agreement of an SDE estimate with a reference curve. A point
/// agrees when |sde - ref| <= sigma * SE + abs_floor; the floor only absorbs
/// round-off where the ensemble is degenerate (SE = 0).
struct Agreement {
  Vec3 max_z = Vec3::Zero();  ///< max |sde - ref| / (SE + abs_floor / sigma)
  Vec3 max_abs = Vec3::Zero();
  std::array<int, 3> violations{0, 0, 0};
  double sigma = 3.0;
  double abs_floor = 0.0;

  bool ok(int k) const { return violations[k] == 0; }
};

Agreement compare_to_reference(const std::vector<Vec3>& reference, const ObservableSeries& sde,
                               double sigma, double abs_floor);

/// Sign changes of a series, counting only points with |v| > threshold[i].
int count_sign_changes(std::span<const double> values, std::span<const double> threshold);

}  // namespace pspin::cli
