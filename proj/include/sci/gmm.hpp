#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sci/cube.hpp"
#include "sci/operators.hpp"
#include "sci/patches.hpp"

namespace sci {

struct GmmComponent {
    double weight = 1.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

struct GmmModel {
    std::vector<GmmComponent> components;
    int dim() const { return components.empty() ? 0 : static_cast<int>(components[0].mean.size()); }
};

// EM fit over vectorized patches; seeded k-means++-style initialization,
// covariances floored at cov_floor. Empty components are re-seeded from the
// farthest patch.
GmmModel gmm_train(const std::vector<Eigen::VectorXd>& patches, int K, int em_iters,
                   uint64_t seed, double cov_floor = 1e-6);

struct GmmPosterior {
    Eigen::VectorXd weights;              // xi~, sums to 1
    std::vector<Eigen::VectorXd> means;   // mu~ per component
    std::vector<Eigen::MatrixXd> covs;    // Sigma~ per component
    Eigen::VectorXd mean;                 // sum_k xi~_k mu~_k
};

// Closed-form GMM posterior for y = Phi x + e, e ~ N(0, Q):
//   Sigma~_k = (Phi^T Q^{-1} Phi + Sigma_k^{-1})^{-1}
//   mu~_k    = Sigma~_k (Phi^T Q^{-1} y + Sigma_k^{-1} mu_k)
//   xi~_k  propto  xi_k N(y | Phi mu_k, Q + Phi Sigma_k Phi^T)
// Marginal densities are evaluated in the log domain.
GmmPosterior gmm_posterior_patch(const Eigen::VectorXd& y, const Eigen::MatrixXd& phi,
                                 const GmmModel& model, const Eigen::MatrixXd& Q);

// Patch-wise GMM inversion of a cacti measurement; overlaps averaged.
DataCube gmm_reconstruct(const Measurement& y, const SensingOperator& op, const GmmModel& model,
                         double q_sigma, const PatchConfig& config);

// Patch-local sensing block for a cacti operator: P^2 x (P^2 * nt) matrix of
// mask values for the patch window at (i0, j0).
Eigen::MatrixXd patch_sensing_block(const SensingOperator& op, int i0, int j0, int patch_size);

}  // namespace sci
