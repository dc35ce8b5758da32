#include "entrofunc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace entrofunc {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix64::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar: draw (u, v) uniform on (-1,1)^2 until inside the unit
  // disc, then scale by sqrt(-2 log s / s).
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

double SplitMix64::exponential(double rate) {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("exponential rate must be > 0");
  }
  // Inverse CDF; 1 - U stays in (0, 1] so the log is finite.
  return -std::log(1.0 - uniform01()) / rate;
}

int SplitMix64::bernoulli(double p) {
  return uniform01() < p ? 1 : 0;
}

}  // namespace entrofunc
