#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sci/cube.hpp"

namespace sci {

struct PatchConfig {
    int patch_size = 8;   // spatial P
    int patch_depth = 0;  // 0 means full depth (= nt)
    int stride = 4;

    void validate(int nx, int ny, int nt) const {
        if (patch_size < 1 || patch_size > std::min(nx, ny))
            throw ArgumentError("PatchConfig: patch_size out of range for cube");
        if (stride < 1 || stride > patch_size)
            throw ArgumentError("PatchConfig: stride must be in [1, patch_size]");
        const int d = depth(nt);
        if (d < 1 || d > nt)
            throw ArgumentError("PatchConfig: patch_depth out of range");
    }
    int depth(int nt) const { return patch_depth == 0 ? nt : patch_depth; }
};

struct PatchIndex {
    int i = 0, j = 0, k = 0;  // top-left-front corner
};

// Grid of patch origins covering the cube: stride steps plus a final
// position flush with the far edge, so every pixel is covered.
std::vector<int> patch_grid(int extent, int patch, int stride);

// Vectorized P x P x depth patches in the cube's own layout order
// (column-major spatially, depth last).
std::vector<std::pair<PatchIndex, Eigen::VectorXd>> extract_patches(const DataCube& cube,
                                                                    const PatchConfig& config);

// Overlap-average aggregation; inverse of extract on fully covered pixels.
DataCube aggregate_patches(const std::vector<std::pair<PatchIndex, Eigen::VectorXd>>& patches,
                           int nx, int ny, int nt, const PatchConfig& config);

}  // namespace sci
