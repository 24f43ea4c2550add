#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sci/cube.hpp"
#include "sci/operators.hpp"
#include "sci/solvers.hpp"

namespace sci {

struct GroupMatchConfig {
    int patch_size = 8;       // spatial P of the 2D patches
    int stride = 4;           // reference-patch grid stride
    int window = 20;          // C, spatial search window
    int window_t = 0;         // T, temporal window; 0 means all frames
    int group_size = 30;      // M
    double wnnm_c = 2.8;
    double eps = 1e-8;
    std::vector<double> sigma_schedule;  // per outer iteration; empty = geometric 50/255 -> 5/255

    void validate() const {
        if (group_size < 2) throw ArgumentError("GroupMatchConfig: group_size must be >= 2");
        if (window < patch_size) throw ArgumentError("GroupMatchConfig: window must be >= patch size");
        if (stride < 1) throw ArgumentError("GroupMatchConfig: stride must be >= 1");
    }
};

// Reference index of a 2D patch inside frame k.
struct GroupPatchIndex {
    int i = 0, j = 0, k = 0;
    size_t linear(int nx, int ny) const {
        return static_cast<size_t>(i) + static_cast<size_t>(nx) * (static_cast<size_t>(j) + static_cast<size_t>(ny) * k);
    }
};

// The group_size nearest patches (Euclidean distance on vectorized P x P
// patches) inside the C x C x T window around the reference; ties broken by
// lowest linear index. Fewer candidates than M -> all of them.
std::vector<GroupPatchIndex> patch_match(const DataCube& cube, const GroupPatchIndex& ref,
                                         const GroupMatchConfig& config);

// Weighted singular-value soft-thresholding of a patch-group matrix
// (columns = patches): sigma_i <- max(sigma_i - w_i, 0) with
// w_i = wnnm_c * sqrt(M) / (sigma_i / sigma + eps).
Eigen::MatrixXd wnnm_group(const Eigen::MatrixXd& group, double sigma, double wnnm_c,
                           double eps = 1e-8);

// DeSCI-lite: GAP projection alternated with a full patch-match + WNNM +
// overlap-average pass, sigma following sigma_schedule.
SolveResult desci_solve(const SensingOperator& op, const Measurement& y,
                        const GroupMatchConfig& group_config, const SolverConfig& solver_config,
                        const DataCube* reference = nullptr, const DataCube* init = nullptr);

}  // namespace sci
