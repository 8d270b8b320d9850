#pragma once

#include <vector>

#include "twistlab/twistmap.hpp"

namespace twistlab {

// An indexed orbit x_k in the lift. A periodic track repeats a cycle of q points
// shifted by p in the angle each turn; an iterated track stores a finite window
// obtained by applying the map forward and backward from a start point.
class Track {
 public:
  static Track periodic(std::vector<double> thetas, std::vector<double> rs, long p);
  static Track iterate(const TwistMap& map, Point x, int before, int after);

  LiftedPoint at(long k) const;
  Point point(long k) const { return project(at(k)); }

  bool is_periodic() const noexcept { return periodic_; }
  long period() const noexcept { return periodic_ ? static_cast<long>(thetas_.size()) : 0; }
  long winding() const noexcept { return p_; }

  // Valid index range, inclusive. Unbounded for periodic tracks.
  long first() const noexcept;
  long last() const noexcept;

  // Re-based copy: index 0 of the result is index k of this track.
  Track shifted(long k) const;

 private:
  Track() = default;

  bool periodic_ = false;
  std::vector<double> thetas_;
  std::vector<double> rs_;
  long p_ = 0;
  long origin_ = 0;  // iterated: storage index of k = 0
  long offset_ = 0;  // periodic: index shift applied by shifted()
};

}  // namespace twistlab
