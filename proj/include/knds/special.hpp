#pragma once

#include <complex>

namespace knds {

using cplx = std::complex<double>;

// Principal-branch-free log Gamma: exp(lgamma(z)) == Gamma(z). Lanczos approximation with reflection.
cplx lgamma(cplx z);

// log of 1/Gamma(z); is_zero is set at the poles z = 0, -1, -2, ...
struct LogRGamma {
  cplx log_value;
  bool is_zero = false;
};
LogRGamma log_rgamma(cplx z);

}  // namespace knds
