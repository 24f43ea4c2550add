#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sci/cube.hpp"
#include "sci/operators.hpp"

namespace sci {

// Seeded synthetic scenes standing in for external benchmark footage.
//   moving-square:  bright square translating across the frames
//   moving-blob:    Gaussian blob on a smooth drifting path
//   smooth-field:   random low-frequency field, static per frame mixture
DataCube make_scene(const std::string& kind, int nx, int ny, int nt, uint64_t seed);

struct SceneSpec {
    std::string id;    // generator kind (see make_scene)
    int nx = 64, ny = 64, nt = 8;
    uint64_t seed = 0;
};

struct BenchRow {
    std::string dataset;
    std::string solver;
    double psnr_db = 0.0;
    double ssim = 0.0;
    double seconds = 0.0;
    int iters = 0;
    std::string config_digest;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::string to_csv() const;
    std::string to_table() const;
};

// (truth, operator, measurement) -> (estimate, iterations)
using SolverFn = std::function<std::pair<DataCube, int>(const DataCube&, const SensingOperator&,
                                                        const Measurement&)>;

struct SolverSpec {
    std::string id;
    SolverFn run;
};

// Registered default solvers: oracle, lsq, gap-tv, admm-tv, desci.
std::vector<SolverSpec> default_bench_solvers();

// Throws ArgumentError listing the registered ids when absent.
const SolverSpec& find_solver(const std::vector<SolverSpec>& solvers, const std::string& id);

// Simulate each scene (bernoulli p=0.5 masks, sigma = 0), run each solver,
// record PSNR/SSIM/wall time. Rows in spec order; metrics deterministic
// given the seeds.
BenchReport run_benchmark(const std::vector<SceneSpec>& scenes, const std::vector<SolverSpec>& solvers,
                          uint64_t mask_seed, const std::string& config_digest = "");

}  // namespace sci
