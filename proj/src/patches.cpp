#include "sci/patches.hpp"

namespace sci {

std::vector<int> patch_grid(int extent, int patch, int stride) {
    std::vector<int> grid;
    for (int p = 0; p + patch <= extent; p += stride) grid.push_back(p);
    if (grid.empty() || grid.back() + patch < extent) grid.push_back(extent - patch);
    return grid;
}

std::vector<std::pair<PatchIndex, Eigen::VectorXd>> extract_patches(const DataCube& cube,
                                                                    const PatchConfig& config) {
    config.validate(cube.nx(), cube.ny(), cube.nt());
    const int P = config.patch_size;
    const int D = config.depth(cube.nt());
    const auto gi = patch_grid(cube.nx(), P, config.stride);
    const auto gj = patch_grid(cube.ny(), P, config.stride);
    const auto gk = patch_grid(cube.nt(), D, D);  // depth tiles, non-overlapping

    std::vector<std::pair<PatchIndex, Eigen::VectorXd>> out;
    out.reserve(gi.size() * gj.size() * gk.size());
    for (int k0 : gk)
        for (int j0 : gj)
            for (int i0 : gi) {
                Eigen::VectorXd p(P * P * D);
                int n = 0;
                for (int k = 0; k < D; ++k)
                    for (int j = 0; j < P; ++j)
                        for (int i = 0; i < P; ++i)
                            p(n++) = cube(i0 + i, j0 + j, k0 + k);
                out.emplace_back(PatchIndex{i0, j0, k0}, std::move(p));
            }
    return out;
}

DataCube aggregate_patches(const std::vector<std::pair<PatchIndex, Eigen::VectorXd>>& patches,
                           int nx, int ny, int nt, const PatchConfig& config) {
    const int P = config.patch_size;
    const int D = config.depth(nt);
    DataCube acc(nx, ny, nt);
    DataCube weight(nx, ny, nt);
    for (const auto& [pi, vec] : patches) {
        int n = 0;
        for (int k = 0; k < D; ++k)
            for (int j = 0; j < P; ++j)
                for (int i = 0; i < P; ++i) {
                    acc(pi.i + i, pi.j + j, pi.k + k) += vec(n++);
                    weight(pi.i + i, pi.j + j, pi.k + k) += 1.0;
                }
    }
    for (size_t i = 0; i < acc.size(); ++i)
        if (weight.data()[i] > 0.0) acc.data()[i] /= weight.data()[i];
    return acc;
}

}  // namespace sci
