#include <benchmark/benchmark.h>

// The distro's static benchmark_main is LTO bytecode tied to one compiler
// release, so the entry point is compiled here against the shared library.
BENCHMARK_MAIN();
