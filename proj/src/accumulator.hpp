#pragma once

#include <cstdint>

#include "platoon/dynamics.hpp"
#include "platoon/montecarlo.hpp"

namespace platoon::detail {

// Running sums in a fixed order; shared by the parallel kernel and the serial
// reference so both perform the same floating-point operations.
class MetricsAccumulator {
 public:
  void add(const IterationOutcome& o) {
    const int cs = o.collisions();
    if (cs > 0) ++colliding_;
    collisions_ += cs;
    rv_ += o.rv_sum();
    severity_ += o.severity();
    ++n_;
  }

  SafetyMetrics finish(double leader_decel, std::uint64_t seed) const {
    SafetyMetrics m;
    m.leader_decel = leader_decel;
    m.n = n_;
    m.seed = seed;
    if (n_ == 0) return m;
    const double n = static_cast<double>(n_);
    m.P = static_cast<double>(colliding_) / n;
    m.n_expected = static_cast<double>(collisions_) / n;
    m.s_sum = rv_ / n;
    m.s_per_collision = severity_ / n;
    return m;
  }

 private:
  long n_ = 0;
  long colliding_ = 0;
  long collisions_ = 0;
  double rv_ = 0.0;
  double severity_ = 0.0;
};

}  // namespace platoon::detail
