#include "twistlab/track.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "twistlab/error.hpp"

namespace twistlab {

Track Track::periodic(std::vector<double> thetas, std::vector<double> rs, long p) {
  if (thetas.empty() || thetas.size() != rs.size()) {
    throw ConfigError("periodic track needs matching non-empty theta/r lists");
  }
  Track t;
  t.periodic_ = true;
  t.thetas_ = std::move(thetas);
  t.rs_ = std::move(rs);
  t.p_ = p;
  return t;
}

Track Track::iterate(const TwistMap& map, Point x, int before, int after) {
  if (before < 0 || after < 0) throw ConfigError("iterated track: negative window");
  const std::size_t n = static_cast<std::size_t>(before) + static_cast<std::size_t>(after) + 1;
  Track t;
  t.thetas_.resize(n);
  t.rs_.resize(n);
  t.origin_ = before;

  LiftedPoint z = lift(x);
  t.thetas_[before] = z.theta;
  t.rs_[before] = z.r;
  for (int k = 1; k <= after; ++k) {
    z = map.apply_lift(z);
    t.thetas_[before + k] = z.theta;
    t.rs_[before + k] = z.r;
  }
  z = lift(x);
  for (int k = 1; k <= before; ++k) {
    z = map.inverse_lift(z);
    t.thetas_[before - k] = z.theta;
    t.rs_[before - k] = z.r;
  }
  return t;
}

LiftedPoint Track::at(long k) const {
  if (periodic_) {
    const long q = static_cast<long>(thetas_.size());
    const long j = k + offset_;
    long m = j / q;
    long i = j % q;
    if (i < 0) {
      i += q;
      --m;
    }
    return {thetas_[i] + static_cast<double>(m * p_), rs_[i]};
  }
  const long idx = k + origin_;
  if (idx < 0 || idx >= static_cast<long>(thetas_.size())) {
    throw ComputationError("track index " + std::to_string(k) + " outside the iterated window [" +
                           std::to_string(first()) + ", " + std::to_string(last()) + "]");
  }
  return {thetas_[idx], rs_[idx]};
}

long Track::first() const noexcept {
  return periodic_ ? std::numeric_limits<long>::min() / 4 : -origin_;
}

long Track::last() const noexcept {
  return periodic_ ? std::numeric_limits<long>::max() / 4
                   : static_cast<long>(thetas_.size()) - 1 - origin_;
}

Track Track::shifted(long k) const {
  Track t = *this;
  if (periodic_) {
    t.offset_ += k;
  } else {
    t.origin_ += k;
  }
  return t;
}

}  // namespace twistlab
