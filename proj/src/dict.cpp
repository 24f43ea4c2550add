#include "sci/dict.hpp"

#include <cmath>

#include "sci/gmm.hpp"

namespace sci {

namespace {

Eigen::MatrixXd dct_matrix(int n) {
    Eigen::MatrixXd m(n, n);
    for (int f = 0; f < n; ++f) {
        const double scale = f == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        for (int x = 0; x < n; ++x)
            m(x, f) = scale * std::cos(M_PI * (2 * x + 1) * f / (2.0 * n));
    }
    return m;
}

}  // namespace

Eigen::MatrixXd dct3_basis(int patch_size, int depth) {
    const int P = patch_size;
    const Eigen::MatrixXd ds = dct_matrix(P);
    const Eigen::MatrixXd dt = dct_matrix(depth);
    const int dim = P * P * depth;
    Eigen::MatrixXd psi(dim, dim);
    // separable atoms: atom (fi, fj, fk) at voxel (i, j, k)
    for (int fk = 0; fk < depth; ++fk)
        for (int fj = 0; fj < P; ++fj)
            for (int fi = 0; fi < P; ++fi) {
                const int col = fi + P * (fj + P * fk);
                for (int k = 0; k < depth; ++k)
                    for (int j = 0; j < P; ++j)
                        for (int i = 0; i < P; ++i)
                            psi(i + P * (j + P * k), col) = ds(i, fi) * ds(j, fj) * dt(k, fk);
            }
    return psi;
}

DictionaryModel make_dct_dictionary(int patch_size, int depth, double lambda, int ista_iters) {
    DictionaryModel d;
    d.atoms = dct3_basis(patch_size, depth);
    d.lambda = lambda;
    d.ista_iters = ista_iters;
    return d;
}

Eigen::VectorXd sparse_code_patch(const Eigen::VectorXd& y, const Eigen::MatrixXd& phi,
                                  const DictionaryModel& dict, double lambda, int iters) {
    if (lambda < 0.0) throw ArgumentError("sparse_code_patch: lambda must be >= 0");
    if (iters <= 0) iters = dict.ista_iters;
    const Eigen::MatrixXd A = phi * dict.atoms;
    const Eigen::MatrixXd AtA = A.transpose() * A;
    const Eigen::VectorXd Aty = A.transpose() * y;

    // power iteration for the Lipschitz constant of the gradient
    Eigen::VectorXd v = Eigen::VectorXd::Ones(AtA.cols());
    v.normalize();
    double L = 1.0;
    for (int i = 0; i < 50; ++i) {
        v = AtA * v;
        L = v.norm();
        if (L == 0.0) break;
        v /= L;
    }
    L = std::max(L * 1.01, 1e-12);  // small headroom over the estimate
    const double step = 1.0 / L;

    Eigen::VectorXd c = Eigen::VectorXd::Zero(AtA.cols());
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd g = c - step * (AtA * c - Aty);
        const double thr = lambda * step;
        for (int i = 0; i < g.size(); ++i)
            c(i) = g(i) > thr ? g(i) - thr : (g(i) < -thr ? g(i) + thr : 0.0);
    }
    return c;
}

DataCube sparse_reconstruct(const Measurement& y, const SensingOperator& op,
                            const DictionaryModel& dict, const PatchConfig& config) {
    if (op.mode() != Mode::Cacti)
        throw ArgumentError("sparse_reconstruct: cassi mode is not supported");
    config.validate(op.nx(), op.ny(), op.nt());
    const int P = config.patch_size, nt = op.nt();
    if (config.depth(nt) != nt)
        throw ArgumentError("sparse_reconstruct: patch_depth must equal nt");
    if (dict.atoms.rows() != P * P * nt)
        throw ArgumentError("sparse_reconstruct: dictionary dimension does not match patch size");

    const auto gi = patch_grid(op.nx(), P, config.stride);
    const auto gj = patch_grid(op.ny(), P, config.stride);
    std::vector<std::pair<PatchIndex, Eigen::VectorXd>> patches;
    patches.reserve(gi.size() * gj.size());
    Eigen::VectorXd yp(P * P);
    for (int j0 : gj)
        for (int i0 : gi) {
            for (int j = 0; j < P; ++j)
                for (int i = 0; i < P; ++i) yp(i + P * j) = y(i0 + i, j0 + j);
            const Eigen::MatrixXd phi = patch_sensing_block(op, i0, j0, P);
            const Eigen::VectorXd c = sparse_code_patch(yp, phi, dict, dict.lambda);
            patches.emplace_back(PatchIndex{i0, j0, 0}, dict.atoms * c);
        }
    return aggregate_patches(patches, op.nx(), op.ny(), op.nt(), config);
}

}  // namespace sci
