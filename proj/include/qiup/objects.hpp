#pragma once

#include <string>
#include <vector>

#include "qiup/imaging.hpp"

namespace qiup::objects {

/// Names accepted by make_object.
const std::vector<std::string>& shape_names();

/// Synthetic test objects on a rows x cols grid:
///   empty       T = 1
///   opaque      T = 0
///   knife-edge  T = 1 for x >= 0, 0 otherwise
///   cat         transmitting cat silhouette on an opaque background
///   dot         absorbing disc of radius 3 px centred at (cols/6, rows/8) px
///   phase-bump  |T| = 1 with a smooth Gaussian phase bump of 1.5 rad
///   patch       T = 1 with a centred |T| = 0.3 square of half the extent
imaging::ObjectMap make_object(const std::string& shape, std::size_t rows, std::size_t cols,
                               double pitch_m);

}  // namespace qiup::objects
