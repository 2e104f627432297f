#pragma once

#include <span>
#include <vector>

#include "hlab/multi_index.hpp"

namespace hlab {

inline constexpr int kMaxHermiteOrder = 1'000'000;

/// The L²-normalized Hermite function φ_k(x) = H_k(x) e^{-x²/2} / sqrt(2^k k! sqrt(π)).
///
/// Evaluated with the three-term recurrence
///   φ_{k+1} = sqrt(2/(k+1)) x φ_k - sqrt(k/(k+1)) φ_{k-1}
/// on rescaled values, so that the Gaussian factor never underflows before the
/// polynomial growth is applied. Values far outside the oscillatory region
/// decay smoothly to zero.
double hermite_function(int k, double x);

/// φ_0(x), ..., φ_{max_order}(x) written to `out` (size max_order + 1).
void hermite_functions(int max_order, double x, std::span<double> out);
std::vector<double> hermite_functions(int max_order, double x);

/// Φ_α(x) = Π_j φ_{α_j}(x_j).
double hermite_product(const MultiIndex& alpha, std::span<const double> x);

}  // namespace hlab
