#include "sci/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "sci/mask.hpp"
#include "sci/metrics.hpp"
#include "sci/rng.hpp"
#include "sci/solvers.hpp"
#include "sci/wnnm.hpp"

namespace sci {

DataCube make_scene(const std::string& kind, int nx, int ny, int nt, uint64_t seed) {
    if (nx < 1 || ny < 1 || nt < 1) throw ArgumentError("make_scene: dimensions must be >= 1");
    auto rng = make_rng(seed);
    DataCube cube(nx, ny, nt);

    if (kind == "moving-square") {
        const int side = std::max(2, std::min(nx, ny) / 4);
        std::uniform_int_distribution<int> start_i(0, std::max(0, nx - side - nt)),
            start_j(0, std::max(0, ny - side - nt));
        const int i0 = start_i(rng), j0 = start_j(rng);
        for (int k = 0; k < nt; ++k) {
            const int oi = std::min(i0 + k, nx - side), oj = std::min(j0 + k, ny - side);
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i)
                    cube(i, j, k) = 0.15;
            for (int j = oj; j < oj + side; ++j)
                for (int i = oi; i < oi + side; ++i)
                    cube(i, j, k) = 0.9;
        }
        return cube;
    }
    if (kind == "moving-blob") {
        std::uniform_real_distribution<double> u(0.25, 0.75);
        const double ci = u(rng) * nx, cj = u(rng) * ny;
        std::uniform_real_distribution<double> vd(-1.5, 1.5);
        const double vi = vd(rng), vj = vd(rng);
        const double s = std::min(nx, ny) / 6.0;
        for (int k = 0; k < nt; ++k) {
            const double bi = ci + vi * k, bj = cj + vj * k;
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    const double d2 = (i - bi) * (i - bi) + (j - bj) * (j - bj);
                    cube(i, j, k) = 0.1 + 0.8 * std::exp(-d2 / (2.0 * s * s));
                }
        }
        return cube;
    }
    if (kind == "smooth-field") {
        // sum of a few random low-frequency cosines, drifting in time
        std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI), fr(0.5, 2.5), am(0.1, 0.3);
        struct Term {
            double fi, fj, phase, amp, drift;
        };
        std::vector<Term> terms;
        for (int t = 0; t < 4; ++t)
            terms.push_back({fr(rng), fr(rng), ph(rng), am(rng), ph(rng) / 16.0});
        for (int k = 0; k < nt; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    double v = 0.5;
                    for (const auto& t : terms)
                        v += t.amp * std::cos(2.0 * M_PI * (t.fi * i / nx + t.fj * j / ny) + t.phase +
                                              t.drift * k);
                    cube(i, j, k) = std::clamp(v, 0.0, 1.0);
                }
        return cube;
    }
    throw ArgumentError("make_scene: unknown scene kind '" + kind + "'");
}

std::string BenchReport::to_csv() const {
    std::ostringstream os;
    os << "dataset,solver,psnr_db,ssim,seconds,iters,config\n";
    for (const auto& r : rows)
        os << r.dataset << ',' << r.solver << ',' << r.psnr_db << ',' << r.ssim << ',' << r.seconds
           << ',' << r.iters << ',' << r.config_digest << '\n';
    return os.str();
}

std::string BenchReport::to_table() const {
    std::ostringstream os;
    os << std::left << std::setw(20) << "dataset" << std::setw(12) << "solver" << std::right
       << std::setw(10) << "psnr_db" << std::setw(9) << "ssim" << std::setw(10) << "seconds"
       << std::setw(7) << "iters" << '\n';
    for (const auto& r : rows)
        os << std::left << std::setw(20) << r.dataset << std::setw(12) << r.solver << std::right
           << std::fixed << std::setprecision(2) << std::setw(10) << r.psnr_db << std::setprecision(4)
           << std::setw(9) << r.ssim << std::setprecision(2) << std::setw(10) << r.seconds
           << std::setw(7) << r.iters << '\n';
    return os.str();
}

std::vector<SolverSpec> default_bench_solvers() {
    std::vector<SolverSpec> out;
    out.push_back({"oracle", [](const DataCube& truth, const SensingOperator&, const Measurement&) {
                       return std::make_pair(truth, 0);
                   }});
    out.push_back({"lsq", [](const DataCube&, const SensingOperator& op, const Measurement& y) {
                       return std::make_pair(op.least_squares_init(y), 1);
                   }});
    out.push_back({"gap-tv", [](const DataCube&, const SensingOperator& op, const Measurement& y) {
                       SolverConfig cfg;
                       auto res = gap_solve(op, y, cfg);
                       return std::make_pair(res.estimate, static_cast<int>(res.trace.records.size()));
                   }});
    out.push_back({"admm-tv", [](const DataCube&, const SensingOperator& op, const Measurement& y) {
                       SolverConfig cfg;
                       auto res = admm_solve(op, y, cfg);
                       return std::make_pair(res.estimate, static_cast<int>(res.trace.records.size()));
                   }});
    out.push_back({"desci", [](const DataCube&, const SensingOperator& op, const Measurement& y) {
                       // warm start from a TV run, then anneal the group
                       // denoiser from 12/255 down to 2/255
                       SolverConfig warm_cfg;
                       const DataCube warm = gap_solve(op, y, warm_cfg).estimate;
                       GroupMatchConfig gcfg;
                       SolverConfig cfg;
                       cfg.max_iters = 30;
                       cfg.tol = 0.0;
                       for (int i = 0; i < cfg.max_iters; ++i)
                           gcfg.sigma_schedule.push_back(
                               (12.0 / 255.0) *
                               std::pow(2.0 / 12.0, static_cast<double>(i) / (cfg.max_iters - 1)));
                       auto res = desci_solve(op, y, gcfg, cfg, nullptr, &warm);
                       return std::make_pair(res.estimate, static_cast<int>(res.trace.records.size()));
                   }});
    return out;
}

const SolverSpec& find_solver(const std::vector<SolverSpec>& solvers, const std::string& id) {
    for (const auto& s : solvers)
        if (s.id == id) return s;
    std::string known;
    for (const auto& s : solvers) {
        if (!known.empty()) known += ", ";
        known += s.id;
    }
    throw ArgumentError("unknown solver id '" + id + "' (registered: " + known + ")");
}

BenchReport run_benchmark(const std::vector<SceneSpec>& scenes, const std::vector<SolverSpec>& solvers,
                          uint64_t mask_seed, const std::string& config_digest) {
    BenchReport report;
    for (const auto& scene : scenes) {
        const DataCube truth = make_scene(scene.id, scene.nx, scene.ny, scene.nt, scene.seed);
        MaskStack masks = make_masks(MaskKind::Bernoulli, scene.nx, scene.ny, scene.nt, 0.5,
                                     mix_seed(mask_seed, scene.seed));
        // open the first shutter wherever a pixel drew all zeros, so every
        // measurement pixel carries signal
        for (int j = 0; j < scene.ny; ++j)
            for (int i = 0; i < scene.nx; ++i) {
                double s = 0.0;
                for (int k = 0; k < scene.nt; ++k) s += masks(i, j, k);
                if (s == 0.0) masks.values(i, j, 0) = 1.0;
            }
        const SensingOperator op(masks, Mode::Cacti);
        const Measurement y = op.forward(truth);
        for (const auto& solver : solvers) {
            const auto t0 = std::chrono::steady_clock::now();
            auto [estimate, iters] = solver.run(truth, op, y);
            const auto t1 = std::chrono::steady_clock::now();
            BenchRow row;
            row.dataset = scene.id + "-" + std::to_string(scene.nx) + "x" + std::to_string(scene.ny) +
                          "x" + std::to_string(scene.nt) + "-s" + std::to_string(scene.seed);
            row.solver = solver.id;
            row.psnr_db = psnr(truth, estimate);
            row.ssim = ssim(truth, estimate);
            row.seconds = std::chrono::duration<double>(t1 - t0).count();
            row.iters = iters;
            row.config_digest = config_digest;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

}  // namespace sci
