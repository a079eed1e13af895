// Timing comparison of the OpenMP kernels against their serial references.
// Usage: skyrm_bench [grid_n] [repeats]

#include "skyrm/beam.hpp"
#include "skyrm/experiment.hpp"
#include "skyrm/polarimetry.hpp"
#include "skyrm/topology.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
    using clock = std::chrono::steady_clock;
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = clock::now();
        fn();
        const auto t1 = clock::now();
        best = std::min(best,
                        std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-22s serial %8.2f ms   omp %8.2f ms   speedup %5.2fx\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms);
}

} // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 512;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;

#ifdef _OPENMP
    std::printf("grid %dx%d, %d repeats, %d OpenMP threads\n", n, n, repeats,
                omp_get_max_threads());
#else
    std::printf("grid %dx%d, %d repeats, OpenMP disabled\n", n, n, repeats);
#endif

    const skyrm::BeamOptics optics;
    const auto grid = skyrm::default_grid(n, 4, optics);
    const auto beam = skyrm::build_beam(0, 4, 0.0, grid, optics);
    const auto ms = skyrm::project_intensities(beam);
    const auto pf = skyrm::reconstruct(ms, 1e-6);
    skyrm::LGModeSpec mode;
    mode.l = 4;

    report("lg_mode",
           time_ms([&] { skyrm::serial::lg_mode(mode, grid); }, repeats),
           time_ms([&] { skyrm::lg_mode(mode, grid); }, repeats));
    report("project_intensities",
           time_ms([&] { skyrm::serial::project_intensities(beam); }, repeats),
           time_ms([&] { skyrm::project_intensities(beam); }, repeats));
    report("reconstruct",
           time_ms([&] { skyrm::serial::reconstruct(ms, 1e-6); }, repeats),
           time_ms([&] { skyrm::reconstruct(ms, 1e-6); }, repeats));
    report("skyrmion_density",
           time_ms([&] { skyrm::serial::skyrmion_density(pf); }, repeats),
           time_ms([&] { skyrm::skyrmion_density(pf); }, repeats));
    return 0;
}
