#include "knds/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace knds {

namespace {

constexpr double kG = 7.0;
constexpr std::array<double, 9> kCoef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

cplx lgamma_right(cplx z) {
  z -= 1.0;
  cplx x = kCoef[0];
  for (int i = 1; i < 9; ++i) x += kCoef[i] / (z + static_cast<double>(i));
  const cplx t = z + kG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// log(sin(pi z)) without overflow for large |Im z|.
cplx log_sin_pi(cplx z) {
  const cplx i(0.0, 1.0);
  const double pi = std::numbers::pi;
  if (std::abs(z.imag()) < 20.0) return std::log(std::sin(pi * z));
  if (z.imag() > 0.0) return -i * pi * z + std::log(1.0 - std::exp(2.0 * i * pi * z)) - std::log(2.0 * i);
  return i * pi * z + std::log(1.0 - std::exp(-2.0 * i * pi * z)) - std::log(-2.0 * i);
}

}  // namespace

cplx lgamma(cplx z) {
  if (z.real() < 0.5) return std::log(std::numbers::pi) - log_sin_pi(z) - lgamma_right(1.0 - z);
  return lgamma_right(z);
}

LogRGamma log_rgamma(cplx z) {
  const double n = std::round(z.real());
  if (n <= 0.0 && std::abs(z - cplx(n, 0.0)) < 1e-14 * std::max(1.0, std::abs(n))) return {cplx(0.0), true};
  return {-lgamma(z), false};
}

}  // namespace knds
