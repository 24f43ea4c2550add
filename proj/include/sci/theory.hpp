#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sci/cube.hpp"
#include "sci/operators.hpp"

namespace sci {

// Finite rate-r compression code over R^{nx*ny*nt}. A uniform-quantizer
// codebook stores its grid parameters and only materializes the codeword
// list when the enumeration fits the guard; the cacti measurement separates
// per pixel, so CSP over the implicit grid stays exact without enumeration.
struct Codebook {
    int nx = 0, ny = 0, nt = 0;
    double rate = 0.0;       // bits per sample
    double amplitude = 1.0;  // rho; codewords live in [-rho/2, rho/2]^n

    // uniform-quantizer provenance (levels >= 2), or explicit list
    std::optional<int> levels;
    std::vector<std::vector<double>> codewords;  // explicit list (may be empty for implicit grids)

    size_t dim() const { return static_cast<size_t>(nx) * ny * nt; }
    bool is_uniform() const { return levels.has_value(); }
    // cell centers of [-rho/2, rho/2] split into `levels` cells
    double level_value(int level) const {
        const double cell = amplitude / *levels;
        return -amplitude / 2.0 + cell * (level + 0.5);
    }
};

// Cartesian grid of cell centers over [-rho/2, rho/2]^n; rate = log2(levels).
// The codeword list is materialized only when levels^n <= 2^20; larger grids
// keep the implicit description.
Codebook build_uniform_codebook(int nx, int ny, int nt, int levels, double amplitude);

Codebook explicit_codebook(int nx, int ny, int nt, std::vector<std::vector<double>> codewords,
                           double rate, double amplitude);

// argmin_c ||x - c||^2, ties to lowest index. Uniform codebooks quantize per
// sample (the objective separates).
std::pair<std::vector<double>, size_t> nearest_codeword(const std::vector<double>& x,
                                                        const Codebook& codebook);

// delta = max over samples of mean squared error per sample.
double distortion_rate(const Codebook& codebook, const std::vector<std::vector<double>>& samples);

struct CspResult {
    std::vector<double> codeword;
    double objective = 0.0;  // ||y - Phi c||^2
};

// Compressible signal pursuit: argmin_{c in C} ||y - Phi c||^2, ties to
// lowest index. Explicit codebooks are searched exhaustively (guard 2^20);
// uniform codebooks with a cacti operator use the exact per-pixel separable
// search over the same grid.
CspResult csp_solve(const Measurement& y, const SensingOperator& op, const Codebook& codebook);

struct TheoremCheckReport {
    int trials = 0;
    double epsilon = 0.0;
    double eta = 0.0;
    double rate = 0.0;
    double distortion = 0.0;          // delta of the code
    double success_frequency = 0.0;   // fraction of trials meeting the error bound
    double violation_frequency = 0.0;
    double theoretical_floor = 0.0;   // 1 - 2^{n r + 1} exp(-NxNy (3 eps/32)^2)
    bool vacuous = false;             // floor <= 0
    bool pass = false;

    std::string to_text() const;
    std::string to_csv() const;
};

// Monte Carlo check of the CSP recovery bound: per trial, fresh N(0,1)
// masks, a signal drawn as codeword + in-cell perturbation, CSP recovery,
// and the test (1/(NxNy)) ||x - x^||^2 <= Nt (delta + rho^2 eps).
// perturb = false draws signals exactly on the codebook (delta-free check).
TheoremCheckReport theorem_check(int nx, int ny, int nt, int levels, int trials, double epsilon,
                                 uint64_t seed, bool perturb = true, double amplitude = 1.0);

}  // namespace sci
