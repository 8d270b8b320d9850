#include <cmath>
#include <numeric>
#include <string>

#include "twistlab/aubry.hpp"
#include "twistlab/error.hpp"

namespace twistlab {

ConvergentList convergents(double value, int depth) {
  if (!(value > 0.0 && value < 1.0)) throw ConfigError("convergents: value must lie in (0, 1)");
  if (depth < 1) throw ConfigError("convergents: depth must be >= 1");

  ConvergentList out;
  long h_prev = 1, h = 0;  // h_{-1}, h_0 for a_0 = 0
  long k_prev = 0, k = 1;
  double v = 1.0 / value;
  while (static_cast<int>(out.convergents.size()) < depth) {
    const double a_d = std::floor(v);
    if (a_d > 1e9) break;
    const long a = static_cast<long>(a_d);
    const long h_next = a * h + h_prev;
    const long k_next = a * k + k_prev;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
    if (k > 1) out.convergents.push_back({h, k});

    const Rational last{h, k};
    const double frac = v - a_d;
    if (std::abs(value - last.value()) <= 1e-15 || frac <= 1e-12 * v) {
      out.rational = true;
      if (k == 1) out.convergents.push_back(last);
      break;
    }
    v = 1.0 / frac;
  }
  return out;
}

double named_irrational(const std::string& name) {
  if (name == "golden") return (std::sqrt(5.0) - 1.0) / 2.0;
  if (name == "silver") return std::sqrt(2.0) - 1.0;
  throw ConfigError("unknown irrational '" + name + "' (available: golden, silver)");
}

RotationNumber RotationNumber::from_rational(Rational r) {
  if (r.q < 1) throw ConfigError("rotation number: q must be >= 1");
  if (std::gcd(r.p, r.q) != 1) throw ConfigError("rotation number: p/q must be in lowest terms");
  RotationNumber rn;
  rn.rational = true;
  rn.pq = r;
  rn.value = r.value();
  return rn;
}

RotationNumber RotationNumber::from_irrational(double value, int depth, std::string name) {
  const ConvergentList cl = twistlab::convergents(value, depth);
  if (cl.rational) {
    throw ConfigError("rotation number " + std::to_string(value) + " is rational to double precision");
  }
  RotationNumber rn;
  rn.rational = false;
  rn.value = value;
  rn.depth = depth;
  rn.name = std::move(name);
  rn.convergents = cl.convergents;
  rn.pq = cl.convergents.back();
  return rn;
}

}  // namespace twistlab
