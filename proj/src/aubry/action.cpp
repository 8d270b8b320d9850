#include <algorithm>
#include <cmath>
#include <limits>

#include "twistlab/aubry.hpp"
#include "twistlab/error.hpp"

namespace twistlab {

double Configuration::theta(long i) const {
  const long q = static_cast<long>(thetas.size());
  long m = i / q;
  long j = i % q;
  if (j < 0) {
    j += q;
    --m;
  }
  return thetas[j] + static_cast<double>(m * rho.p);
}

namespace {
void check_shape(const Configuration& c) {
  if (c.rho.q < 1 || static_cast<long>(c.thetas.size()) != c.rho.q) {
    throw ConfigError("configuration must hold exactly q angles");
  }
}
}  // namespace

double action(const TwistMap& map, const Configuration& c) {
  check_shape(c);
  const long q = c.rho.q;
  double w = 0.0;
  for (long i = 0; i < q; ++i) w += map.generating(c.theta(i), c.theta(i + 1)).h;
  return w;
}

std::vector<double> action_gradient(const TwistMap& map, const Configuration& c) {
  check_shape(c);
  const long q = c.rho.q;
  std::vector<double> g(q);
  for (long i = 0; i < q; ++i) {
    g[i] = map.generating(c.theta(i - 1), c.theta(i)).d2h +
           map.generating(c.theta(i), c.theta(i + 1)).d1h;
  }
  return g;
}

CyclicTridiagonal action_hessian(const TwistMap& map, const Configuration& c) {
  check_shape(c);
  const long q = c.rho.q;
  CyclicTridiagonal H;
  H.diag.resize(q);
  H.off.resize(q);
  for (long i = 0; i < q; ++i) {
    const GeneratingEval e = map.generating(c.theta(i), c.theta(i + 1));
    H.diag[i] += e.d11h;
    H.diag[(i + 1) % q] += e.d22h;
    H.off[i] = e.d12h;
  }
  return H;
}

double CyclicTridiagonal::entry(int i, int j) const {
  const int q = size();
  if (i == j) {
    // q = 1: the single edge couples theta_0 with its own translate
    return q == 1 ? diag[0] + 2.0 * off[0] : diag[i];
  }
  double v = 0.0;
  for (int k : {i, j}) {
    const int other = (k + 1) % q;
    if ((k == i && other == j) || (k == j && other == i)) v += off[k];
  }
  return v;
}

int CyclicTridiagonal::count_below(double sigma) const {
  const int q = size();
  if (q == 1) return entry(0, 0) - sigma < 0.0 ? 1 : 0;

  // Eliminate rows 0..q-2 in order; the only fill is the last column.
  const double tiny = std::numeric_limits<double>::min() * 1e8;
  auto guard = [tiny](double x) { return std::abs(x) < tiny ? -tiny : x; };
  const int L = q - 1;
  int neg = 0;
  double last = entry(L, L) - sigma;
  double piv = guard(entry(0, 0) - sigma);
  double col = entry(0, L);
  for (int i = 1; i < L; ++i) {
    if (piv < 0.0) ++neg;
    const double l = entry(i, i - 1) / piv;
    last -= col * col / piv;
    const double col_next = entry(i, L) - l * col;
    piv = guard(entry(i, i) - sigma - l * entry(i - 1, i));
    col = col_next;
  }
  if (piv < 0.0) ++neg;
  last -= col * col / piv;
  if (last < 0.0) ++neg;
  return neg;
}

double CyclicTridiagonal::min_eigenvalue(double tol) const {
  const int q = size();
  if (q == 1) return entry(0, 0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < q; ++i) {
    const int left = (i + q - 1) % q;
    const int right = (i + 1) % q;
    double radius = std::abs(entry(i, right));
    if (left != right) radius += std::abs(entry(i, left));
    lo = std::min(lo, entry(i, i) - radius);
    hi = std::max(hi, entry(i, i) + radius);
  }
  lo -= 1.0;
  hi += 1.0;
  for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace twistlab
