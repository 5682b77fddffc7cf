#pragma once

namespace casbox {

// Every data-parallel kernel takes an execution policy. The serial path runs
// the identical algorithm on one thread and is the reference the parallel
// path is tested and benchmarked against.
enum class Exec { serial, parallel };

// Number of OpenMP workers used by Exec::parallel kernels.
int worker_count();
void set_worker_count(int workers);

}  // namespace casbox
