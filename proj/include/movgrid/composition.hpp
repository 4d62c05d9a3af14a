#pragma once

#include <string>
#include <vector>

namespace movgrid {

/// Palindromic sequence of substep fractions gamma_k applied to a Strang step.
struct CompositionScheme {
  std::string name;
  int order = 2;
  std::vector<double> coefficients{1.0};

  std::size_t stages() const noexcept { return coefficients.size(); }
};

/// Builds a scheme by name:
///   "strang"              order 2 only, [1.0]
///   "suzuki"              Suzuki fractal, any even order (5x stages per level)
///   "yoshida"             triple jump, any even order (3x stages per level)
///   "kahan_li"            orders 6 (s9odr6a) and 8 (s15odr8)
///   "sofroniou_spaletta"  order 10 (s35odr10)
///   "optimal"             2 -> strang, 4 -> suzuki, 6/8 -> kahan_li, 10 -> sofroniou_spaletta
/// Throws UnsupportedScheme listing the available names.
CompositionScheme compose_scheme(const std::string& name, int order);

/// Names accepted by compose_scheme.
std::vector<std::string> available_schemes();

}  // namespace movgrid
