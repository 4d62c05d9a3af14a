#include "movgrid/composition.hpp"

#include <array>
#include <cmath>
#include <span>

#include "movgrid/errors.hpp"

namespace movgrid {
namespace {

// Half tables of symmetric methods; the last entry is the middle coefficient.
// Kahan & Li, Math. Comp. 66 (1997) 1089, methods s9odr6a and s15odr8.
constexpr std::array kKahanLi6{
    0.39216144400731413927925056, 0.33259913678935943859974864, -0.70624617255763935980996482,
    0.08221359629355080023149045, 0.79854399093482996339895035,
};
constexpr std::array kKahanLi8{
    0.74167036435061295344822780,  -0.40910082580003159399730010, 0.19075471029623837995387626,
    -0.57386247111608226665638773, 0.29906418130365592384446354,  0.33462491824529818378495798,
    0.31529309239676659663205666,  -0.79688793935291635401978884,
};
// Sofroniou & Spaletta, Optim. Methods Softw. 20 (2005) 597, method s35odr10.
constexpr std::array kSofroniouSpaletta10{
    0.07879572252168641926390768,  0.31309610341510852776481247,  0.02791838323507806610952027,
    -0.22959284159390709415121340, 0.13096206107716486317465686,  -0.26973340565451071434460973,
    0.07497334315589143566613711,  0.11199342399981020488957508,  0.36613344954622675119314812,
    -0.39910563013603589787862981, 0.10308739852747107731580277,  0.41143087395589023782070412,
    -0.00486636058313526176219566, -0.39203335370863990644808194, 0.05194250296244964703718290,
    0.05066509075992449633587434,  0.04967437063972987905456880,  0.04931773575959453791768001,
};

std::vector<double> mirror(std::span<const double> half) {
  std::vector<double> full(half.begin(), half.end());
  for (std::size_t i = half.size() - 1; i-- > 0;) full.push_back(half[i]);
  return full;
}

// Recursive composition: each level replaces a scheme S of order 2k by
// S(g1) ... S(gm) with the outer weights given by `outer(k)`.
template <class Outer>
std::vector<double> recursive(int order, Outer outer) {
  std::vector<double> gammas{1.0};
  for (int k = 1; 2 * k < order; ++k) {
    const std::vector<double> weights = outer(k);
    std::vector<double> next;
    next.reserve(weights.size() * gammas.size());
    for (double w : weights)
      for (double g : gammas) next.push_back(w * g);
    gammas = std::move(next);
  }
  return gammas;
}

std::vector<double> suzuki_weights(int k) {
  const double p = 1.0 / (4.0 - std::pow(4.0, 1.0 / (2.0 * k + 1.0)));
  return {p, p, 1.0 - 4.0 * p, p, p};
}

std::vector<double> yoshida_weights(int k) {
  const double c = std::pow(2.0, 1.0 / (2.0 * k + 1.0));
  const double w1 = 1.0 / (2.0 - c);
  return {w1, -c * w1, w1};
}

[[noreturn]] void unsupported(const std::string& name, int order) {
  std::string list;
  for (const auto& s : available_schemes()) list += (list.empty() ? "" : ", ") + s;
  throw UnsupportedScheme("unsupported composition scheme '" + name + "' of order " + std::to_string(order) +
                          " (available: " + list + ")");
}

}  // namespace

std::vector<std::string> available_schemes() {
  return {"strang", "suzuki", "yoshida", "kahan_li", "sofroniou_spaletta", "optimal"};
}

CompositionScheme compose_scheme(const std::string& name, int order) {
  if (order < 2 || order % 2 != 0) unsupported(name, order);
  CompositionScheme s;
  s.name = name;
  s.order = order;
  if (name == "strang") {
    if (order != 2) unsupported(name, order);
    s.coefficients = {1.0};
  } else if (name == "suzuki") {
    s.coefficients = recursive(order, suzuki_weights);
  } else if (name == "yoshida") {
    s.coefficients = recursive(order, yoshida_weights);
  } else if (name == "kahan_li") {
    if (order == 6)
      s.coefficients = mirror(kKahanLi6);
    else if (order == 8)
      s.coefficients = mirror(kKahanLi8);
    else
      unsupported(name, order);
  } else if (name == "sofroniou_spaletta") {
    if (order != 10) unsupported(name, order);
    s.coefficients = mirror(kSofroniouSpaletta10);
  } else if (name == "optimal") {
    switch (order) {
      case 2: return compose_scheme("strang", 2);
      case 4: return compose_scheme("suzuki", 4);
      case 6: return compose_scheme("kahan_li", 6);
      case 8: return compose_scheme("kahan_li", 8);
      case 10: return compose_scheme("sofroniou_spaletta", 10);
      default: unsupported(name, order);
    }
  } else {
    unsupported(name, order);
  }
  return s;
}

}  // namespace movgrid
