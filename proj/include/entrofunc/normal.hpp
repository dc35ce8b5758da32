#pragma once

namespace entrofunc {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile for p in (0, 1). Acklam's rational
// approximation refined with one Halley step against the CDF; absolute
// error well below 1e-9.
double normal_quantile(double p);

}  // namespace entrofunc
