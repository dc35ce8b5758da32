#pragma once

#include <cstddef>

namespace entrofunc {

// Volume of the unit Euclidean ball in R^d: 2 pi^(d/2) / (d Gamma(d/2)).
double unit_ball_volume(std::size_t d);

// Volume of the closed epsilon-ball: eps^d * unit_ball_volume(d).
// Throws std::invalid_argument for d = 0 or eps <= 0.
double ball_volume(std::size_t d, double epsilon);

}  // namespace entrofunc
