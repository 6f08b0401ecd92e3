#include "mixedsys/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mixedsys {

namespace {
int default_workers() {
#ifdef _OPENMP
    return omp_get_num_procs();
#else
    return 1;
#endif
}
} // namespace

void set_worker_count(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n > 0 ? n : default_workers());
#else
    (void)n;
#endif
}

int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace mixedsys
