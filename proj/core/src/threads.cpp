#include "latomo/threads.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace latomo {

void set_num_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int num_threads() { return omp_get_max_threads(); }

int apply_thread_env() {
  if (const char* env = std::getenv("LATOMO_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) set_num_threads(n);
    } catch (const std::exception&) {
      // ignored: invalid values leave the default in place
    }
  }
  return num_threads();
}

}  // namespace latomo
