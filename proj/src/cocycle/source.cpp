#include <cmath>
#include <string>

#include "twistlab/cocycle.hpp"
#include "twistlab/error.hpp"

namespace twistlab {

namespace {
void require_symplectic(const Jacobian& A, const std::string& what) {
  if (!(std::abs(A.det() - 1.0) <= 1e-12)) {
    throw ConfigError(what + ": matrix determinant differs from 1 by " + std::to_string(A.det() - 1.0));
  }
}
}  // namespace

CocycleSource CocycleSource::from_map(std::shared_ptr<const TwistMap> map, Track track) {
  if (!map) throw ConfigError("cocycle source: null map");
  CocycleSource s;
  s.kind_ = "map:" + map->family();
  if (track.is_periodic()) s.period_ = track.period();
  s.fn_ = [map = std::move(map), track = std::move(track)](long k) { return map->jacobian(track.point(k)); };
  return s;
}

CocycleSource CocycleSource::constant(Jacobian A, std::string name) {
  require_symplectic(A, name);
  CocycleSource s;
  s.kind_ = std::move(name);
  s.period_ = 1;
  s.fn_ = [A](long) { return A; };
  return s;
}

CocycleSource CocycleSource::constant_hyperbolic(double lambda) {
  return constant({std::exp(lambda), 0.0, 0.0, std::exp(-lambda)}, "constant-hyperbolic");
}

CocycleSource CocycleSource::shear() { return constant({1.0, 1.0, 0.0, 1.0}, "shear"); }

CocycleSource CocycleSource::rotation(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return constant({c, -s, s, c}, "rotation");
}

CocycleSource CocycleSource::sequence(std::vector<Jacobian> list, std::string name) {
  if (list.empty()) throw ConfigError("cocycle sequence: empty list");
  for (const Jacobian& A : list) require_symplectic(A, name);
  CocycleSource s;
  s.kind_ = std::move(name);
  s.period_ = static_cast<long>(list.size());
  s.fn_ = [list = std::move(list)](long k) {
    const long q = static_cast<long>(list.size());
    long i = k % q;
    if (i < 0) i += q;
    return list[static_cast<std::size_t>(i)];
  };
  return s;
}

CocycleSource CocycleSource::shifted(long k) const {
  CocycleSource s = *this;
  s.fn_ = [fn = fn_, k](long j) { return fn(j + k); };
  return s;
}

}  // namespace twistlab
