#include "casbox/exec.hpp"

#include <omp.h>

#include <stdexcept>

namespace casbox {

int worker_count() { return omp_get_max_threads(); }

void set_worker_count(int workers) {
  if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
  omp_set_num_threads(workers);
}

}  // namespace casbox
