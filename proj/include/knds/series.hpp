#pragma once

#include <vector>

// Truncated real power series. All results carry n coefficients (orders 0..n-1).
namespace knds::series {

using Series = std::vector<double>;

Series mul(const Series& a, const Series& b, int n);
Series scale(const Series& a, double s);
Series add(const Series& a, const Series& b, int n);
Series recip(const Series& a, int n);     // requires a[0] != 0
Series log(const Series& a, int n);       // requires a[0] > 0
Series exp(const Series& a, int n);
Series pow(const Series& a, double p, int n);  // requires a[0] > 0
Series derivative(const Series& a);
Series compose(const Series& f, const Series& g, int n);  // f(g), requires g[0] == 0
Series revert(const Series& g, int n);                    // inverse of g, requires g[0] == 0, g[1] != 0
Series rescale(const Series& a, double t);                // coefficient j times t^j
double evaluate(const Series& a, double x);

}  // namespace knds::series
