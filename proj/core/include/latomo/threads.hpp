#pragma once

namespace latomo {

/// Caps the worker count used by parallel loops. Results do not depend on it.
void set_num_threads(int n);
int num_threads();

/// Applies LATOMO_THREADS if it holds a positive integer; returns the cap in
/// effect afterwards.
int apply_thread_env();

}  // namespace latomo
