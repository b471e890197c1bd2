// Timing harness: serial reference loop vs the OpenMP trial loop.
//
// Usage: eprb_bench [trials]
//
// Prints one row per engine with both timings and verifies the two paths
// produce bit-identical estimates (they share the per-trial stream layout,
// so any difference is a bug, not noise). Exits nonzero on mismatch.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eprb/experiment.hpp"

using namespace eprb;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

} // namespace

int main(int argc, char** argv) {
    std::uint64_t trials = 2000000;
    if (argc > 1) {
        trials = std::stoull(argv[1]);
    }

#ifdef _OPENMP
    std::printf("openmp: yes, max threads %d\n", omp_get_max_threads());
#else
    std::printf("openmp: no (parallel path runs serially)\n");
#endif
    std::printf("%-12s %12s %12s %12s %9s %6s\n", "model", "trials", "serial_ms",
                "parallel_ms", "speedup", "match");

    bool all_match = true;
    for (const ModelKind model : {ModelKind::BellNaive, ModelKind::MatzkinConditioned,
                                  ModelKind::QuantumReference}) {
        const ExperimentConfig config{model, UnitVector::z_axis(),
                                      axis_in_xz_plane(std::numbers::pi / 3.0), trials, 42};

        auto t0 = std::chrono::steady_clock::now();
        const CorrelationEstimate serial = estimate_correlation_serial(config);
        const double serial_ms = ms_since(t0);

        t0 = std::chrono::steady_clock::now();
        const CorrelationEstimate parallel = estimate_correlation(config);
        const double parallel_ms = ms_since(t0);

        const bool match = same_bits(serial.mean, parallel.mean) &&
                           same_bits(serial.std_error, parallel.std_error);
        all_match = all_match && match;
        std::printf("%-12s %12llu %12.1f %12.1f %8.2fx %6s\n",
                    std::string(to_string(model)).c_str(),
                    static_cast<unsigned long long>(trials), serial_ms, parallel_ms,
                    parallel_ms > 0.0 ? serial_ms / parallel_ms : 0.0,
                    match ? "yes" : "NO");
    }

    if (!all_match) {
        std::fprintf(stderr, "mismatch between serial and parallel estimates\n");
        return 1;
    }
    return 0;
}
