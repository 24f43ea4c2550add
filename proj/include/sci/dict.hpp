#pragma once

#include <Eigen/Dense>

#include "sci/cube.hpp"
#include "sci/operators.hpp"
#include "sci/patches.hpp"

namespace sci {

// Fixed analytic sparsifying basis: orthonormal 3D-DCT over P x P x depth
// patches. Columns are atoms.
struct DictionaryModel {
    Eigen::MatrixXd atoms;
    double lambda = 0.01;
    int ista_iters = 200;
};

Eigen::MatrixXd dct3_basis(int patch_size, int depth);

DictionaryModel make_dct_dictionary(int patch_size, int depth, double lambda = 0.01,
                                    int ista_iters = 200);

// min_c 0.5||y - Phi Psi c||^2 + lambda ||c||_1 by ISTA; the step size is
// 1/L with L from power iteration on (Phi Psi)^T (Phi Psi).
Eigen::VectorXd sparse_code_patch(const Eigen::VectorXd& y, const Eigen::MatrixXd& phi,
                                  const DictionaryModel& dict, double lambda, int iters = 0);

// Patch-wise dictionary reconstruction of a cacti measurement.
DataCube sparse_reconstruct(const Measurement& y, const SensingOperator& op,
                            const DictionaryModel& dict, const PatchConfig& config);

}  // namespace sci
