#pragma once

#include <omp.h>

namespace platoon::detail {

// 0 selects the OpenMP default team size.
inline int team_size(int requested) {
  return requested > 0 ? requested : omp_get_max_threads();
}

}  // namespace platoon::detail
