#include "entrofunc/ball.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace entrofunc {

double unit_ball_volume(std::size_t d) {
  if (d == 0) {
    throw std::invalid_argument("ball dimension must be >= 1");
  }
  const double half_d = 0.5 * static_cast<double>(d);
  return 2.0 * std::pow(std::numbers::pi, half_d) /
         (static_cast<double>(d) * std::tgamma(half_d));
}

double ball_volume(std::size_t d, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("ball radius must be > 0");
  }
  return std::pow(epsilon, static_cast<double>(d)) * unit_ball_volume(d);
}

}  // namespace entrofunc
