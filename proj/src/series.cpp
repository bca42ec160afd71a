#include "knds/series.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace knds::series {

namespace {
double at(const Series& a, int i) { return i < static_cast<int>(a.size()) ? a[i] : 0.0; }
}  // namespace

Series mul(const Series& a, const Series& b, int n) {
  Series c(n, 0.0);
  const int na = std::min<int>(a.size(), n);
  const int nb = std::min<int>(b.size(), n);
  for (int i = 0; i < na; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; j < nb && i + j < n; ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

Series scale(const Series& a, double s) {
  Series c(a);
  for (double& v : c) v *= s;
  return c;
}

Series add(const Series& a, const Series& b, int n) {
  Series c(n, 0.0);
  for (int i = 0; i < n; ++i) c[i] = at(a, i) + at(b, i);
  return c;
}

Series recip(const Series& a, int n) {
  if (at(a, 0) == 0.0) throw std::domain_error("series reciprocal of zero constant term");
  Series c(n, 0.0);
  c[0] = 1.0 / a[0];
  for (int k = 1; k < n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += at(a, j) * c[k - j];
    c[k] = -s / a[0];
  }
  return c;
}

Series log(const Series& a, int n) {
  if (!(at(a, 0) > 0.0)) throw std::domain_error("series log needs a positive constant term");
  Series f(n, 0.0);
  f[0] = std::log(a[0]);
  for (int k = 1; k < n; ++k) {
    double s = k * at(a, k);
    for (int j = 1; j < k; ++j) s -= j * f[j] * at(a, k - j);
    f[k] = s / (k * a[0]);
  }
  return f;
}

Series exp(const Series& a, int n) {
  Series g(n, 0.0);
  g[0] = std::exp(at(a, 0));
  for (int k = 1; k < n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * at(a, j) * g[k - j];
    g[k] = s / k;
  }
  return g;
}

Series pow(const Series& a, double p, int n) { return exp(scale(log(a, n), p), n); }

Series derivative(const Series& a) {
  if (a.size() <= 1) return Series(1, 0.0);
  Series d(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) d[i - 1] = static_cast<double>(i) * a[i];
  return d;
}

Series compose(const Series& f, const Series& g, int n) {
  if (at(g, 0) != 0.0) throw std::domain_error("series composition needs g(0) == 0");
  Series r(n, 0.0);
  const int nf = std::min<int>(f.size(), n);
  for (int i = nf - 1; i >= 0; --i) {
    r = mul(r, g, n);
    r[0] += f[i];
  }
  return r;
}

Series revert(const Series& g, int n) {
  if (at(g, 0) != 0.0 || at(g, 1) == 0.0) throw std::domain_error("series reversion needs g(0)=0, g'(0)!=0");
  // Newton: s <- s - (g(s) - y) / g'(s), doubling the number of correct orders each pass.
  Series s(n, 0.0);
  if (n > 1) s[1] = 1.0 / g[1];
  const Series dg = derivative(g);
  for (int have = 2; have < n;) {
    const int nn = std::min(2 * have, n);
    Series gs = compose(g, s, nn);
    gs[1] -= 1.0;
    const Series corr = mul(gs, recip(compose(dg, s, nn), nn), nn);
    for (int i = 0; i < nn; ++i) s[i] -= corr[i];
    have = nn;
  }
  return s;
}

Series rescale(const Series& a, double t) {
  Series c(a);
  double f = 1.0;
  for (double& v : c) {
    v *= f;
    f *= t;
  }
  return c;
}

double evaluate(const Series& a, double x) {
  double r = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) r = r * x + *it;
  return r;
}

}  // namespace knds::series
