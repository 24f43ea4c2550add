#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sci/cube.hpp"
#include "sci/operators.hpp"

namespace sci {

enum class DenoiserKind { Tv, Identity };

struct SolverConfig {
    int max_iters = 100;
    double rho = 1.0;           // ADMM penalty
    double tv_weight = 0.07;    // lambda, [0,1] intensity units
    int tv_inner_iters = 10;
    double tol = 1e-4;          // relative-change stopping threshold
    DenoiserKind denoiser = DenoiserKind::Tv;

    void validate() const {
        if (max_iters < 1) throw ArgumentError("SolverConfig: max_iters must be >= 1");
        if (!(rho > 0.0)) throw ArgumentError("SolverConfig: rho must be > 0");
        if (tv_weight < 0.0) throw ArgumentError("SolverConfig: tv_weight must be >= 0");
        if (tv_inner_iters < 1) throw ArgumentError("SolverConfig: tv_inner_iters must be >= 1");
        if (tol < 0.0) throw ArgumentError("SolverConfig: tol must be >= 0");
    }
};

struct TraceRecord {
    int iter = 0;
    double residual = 0.0;  // ||y - Phi x||_2
    double change = 0.0;    // ||x_new - x_old|| / ||x_old||
    double psnr = 0.0;      // vs reference, NaN if none supplied
};

struct SolveTrace {
    std::vector<TraceRecord> records;
    // final splitting state, kept for inspection
    std::vector<double> final_v;
    std::vector<double> final_u;

    std::string to_csv() const;
};

// Frame-wise anisotropic 2D TV proximal operator,
// argmin_z 0.5||z - cube||^2 + weight * TV(z), by dual gradient projection.
DataCube tv_denoise(const DataCube& cube, double weight, int inner_iters);

// One-shot closed-form solution of the ADMM x-subproblem
// [Phi^T Phi + rho I] x = Phi^T y + rho (v - u/rho), using the diagonal
// of Phi Phi^T (psi from phi_phit_diag).
DataCube x_update_closed_form(const DataCube& v, const DataCube& u, double rho,
                              const SensingOperator& op, const Measurement& y,
                              const std::vector<double>& psi);

struct SolveResult {
    DataCube estimate;
    SolveTrace trace;
};

// ADMM loop: closed-form x-update, denoise(x + u/rho), dual ascent on u.
SolveResult admm_solve(const SensingOperator& op, const Measurement& y, const SolverConfig& config,
                       const DataCube* reference = nullptr, const DataCube* init = nullptr);

// GAP loop: Euclidean projection onto {x : Phi x = y}, then denoise.
SolveResult gap_solve(const SensingOperator& op, const Measurement& y, const SolverConfig& config,
                      const DataCube* reference = nullptr, const DataCube* init = nullptr);

}  // namespace sci
