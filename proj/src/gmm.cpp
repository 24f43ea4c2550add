#include "sci/gmm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "sci/rng.hpp"

namespace sci {

namespace {

void floor_cov(Eigen::MatrixXd& cov, double cov_floor) {
    cov = 0.5 * (cov + cov.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(cov_floor);
    cov = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// log N(x | mu, Sigma) via LLT
double log_gauss(const Eigen::VectorXd& x, const Eigen::VectorXd& mu, const Eigen::LLT<Eigen::MatrixXd>& llt) {
    const int d = static_cast<int>(x.size());
    const Eigen::VectorXd r = x - mu;
    const Eigen::VectorXd z = llt.matrixL().solve(r);
    double logdet = 0.0;
    for (int i = 0; i < d; ++i) logdet += std::log(llt.matrixL()(i, i));
    return -0.5 * z.squaredNorm() - logdet - 0.5 * d * std::log(2.0 * M_PI);
}

}  // namespace

GmmModel gmm_train(const std::vector<Eigen::VectorXd>& patches, int K, int em_iters,
                   uint64_t seed, double cov_floor) {
    if (K < 1) throw ArgumentError("gmm_train: K must be >= 1");
    const size_t n = patches.size();
    if (n < static_cast<size_t>(10 * K))
        throw ArgumentError("gmm_train: need at least 10*K patches");
    const int d = static_cast<int>(patches[0].size());

    auto rng = make_rng(seed);

    // k-means++-style seeding of the means
    std::vector<Eigen::VectorXd> means;
    std::uniform_int_distribution<size_t> pick(0, n - 1);
    means.push_back(patches[pick(rng)]);
    std::vector<double> d2(n, std::numeric_limits<double>::max());
    while (static_cast<int>(means.size()) < K) {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], (patches[i] - means.back()).squaredNorm());
            total += d2[i];
        }
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng), acc = 0.0;
        size_t chosen = n - 1;
        for (size_t i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= target) {
                chosen = i;
                break;
            }
        }
        means.push_back(patches[chosen]);
    }

    GmmModel model;
    model.components.resize(K);
    // global covariance as the starting spread
    Eigen::VectorXd gmean = Eigen::VectorXd::Zero(d);
    for (const auto& p : patches) gmean += p;
    gmean /= static_cast<double>(n);
    Eigen::MatrixXd gcov = Eigen::MatrixXd::Zero(d, d);
    for (const auto& p : patches) gcov += (p - gmean) * (p - gmean).transpose();
    gcov /= static_cast<double>(n);
    floor_cov(gcov, cov_floor);
    for (int k = 0; k < K; ++k) {
        model.components[k].weight = 1.0 / K;
        model.components[k].mean = means[k];
        model.components[k].cov = gcov;
    }

    Eigen::MatrixXd resp(n, K);
    for (int it = 0; it < em_iters; ++it) {
        // E step, log domain
        std::vector<Eigen::LLT<Eigen::MatrixXd>> llts;
        llts.reserve(K);
        for (int k = 0; k < K; ++k) llts.emplace_back(model.components[k].cov);
        for (size_t i = 0; i < n; ++i) {
            Eigen::VectorXd lp(K);
            for (int k = 0; k < K; ++k)
                lp(k) = std::log(model.components[k].weight) +
                        log_gauss(patches[i], model.components[k].mean, llts[k]);
            const double m = lp.maxCoeff();
            lp = (lp.array() - m).exp();
            resp.row(i) = lp.transpose() / lp.sum();
        }
        // M step
        for (int k = 0; k < K; ++k) {
            const double nk = resp.col(k).sum();
            if (nk < 1e-12) {
                // re-seed an empty component from the farthest patch
                size_t far = 0;
                double best = -1.0;
                for (size_t i = 0; i < n; ++i) {
                    double dist = (patches[i] - model.components[k].mean).squaredNorm();
                    if (dist > best) {
                        best = dist;
                        far = i;
                    }
                }
                model.components[k].mean = patches[far];
                model.components[k].cov = gcov;
                model.components[k].weight = 1.0 / n;
                continue;
            }
            Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
            for (size_t i = 0; i < n; ++i) mu += resp(i, k) * patches[i];
            mu /= nk;
            Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
            for (size_t i = 0; i < n; ++i) {
                const Eigen::VectorXd r = patches[i] - mu;
                cov += resp(i, k) * (r * r.transpose());
            }
            cov /= nk;
            floor_cov(cov, cov_floor);
            model.components[k].weight = nk / static_cast<double>(n);
            model.components[k].mean = mu;
            model.components[k].cov = cov;
        }
        // renormalize (re-seeding can perturb the sum)
        double wsum = 0.0;
        for (const auto& c : model.components) wsum += c.weight;
        for (auto& c : model.components) c.weight /= wsum;
    }
    return model;
}

GmmPosterior gmm_posterior_patch(const Eigen::VectorXd& y, const Eigen::MatrixXd& phi,
                                 const GmmModel& model, const Eigen::MatrixXd& Q) {
    const int K = static_cast<int>(model.components.size());
    if (K == 0) throw ArgumentError("gmm_posterior_patch: empty model");
    const int d = model.dim();
    if (phi.rows() != y.size() || phi.cols() != d)
        throw ArgumentError("gmm_posterior_patch: phi dimensions inconsistent with y/model");

    Eigen::LLT<Eigen::MatrixXd> lltQ(Q);
    if (lltQ.info() != Eigen::Success)
        throw NumericError("gmm_posterior_patch: Q is not positive definite");
    const Eigen::MatrixXd Qinv = lltQ.solve(Eigen::MatrixXd::Identity(Q.rows(), Q.cols()));
    const Eigen::MatrixXd phiT_Qinv = phi.transpose() * Qinv;
    const Eigen::MatrixXd gram = phiT_Qinv * phi;
    const Eigen::VectorXd phiT_Qinv_y = phiT_Qinv * y;

    GmmPosterior post;
    post.weights.resize(K);
    post.means.resize(K);
    post.covs.resize(K);
    Eigen::VectorXd logw(K);
    for (int k = 0; k < K; ++k) {
        const auto& c = model.components[k];
        Eigen::LLT<Eigen::MatrixXd> lltS(c.cov);
        if (lltS.info() != Eigen::Success)
            throw NumericError("gmm_posterior_patch: covariance of component " + std::to_string(k) +
                               " is not positive definite");
        const Eigen::MatrixXd Sinv = lltS.solve(Eigen::MatrixXd::Identity(d, d));
        Eigen::MatrixXd post_prec = gram + Sinv;
        Eigen::LLT<Eigen::MatrixXd> lltP(post_prec);
        post.covs[k] = lltP.solve(Eigen::MatrixXd::Identity(d, d));
        post.means[k] = lltP.solve(phiT_Qinv_y + Sinv * c.mean);
        // marginal: y ~ N(Phi mu_k, Q + Phi Sigma_k Phi^T)
        Eigen::MatrixXd marg_cov = Q + phi * c.cov * phi.transpose();
        Eigen::LLT<Eigen::MatrixXd> lltM(marg_cov);
        if (lltM.info() != Eigen::Success)
            throw NumericError("gmm_posterior_patch: marginal covariance of component " +
                               std::to_string(k) + " is not positive definite");
        logw(k) = std::log(c.weight) + log_gauss(y, phi * c.mean, lltM);
    }
    const double m = logw.maxCoeff();
    post.weights = (logw.array() - m).exp();
    post.weights /= post.weights.sum();
    post.mean = Eigen::VectorXd::Zero(d);
    for (int k = 0; k < K; ++k) post.mean += post.weights(k) * post.means[k];
    return post;
}

Eigen::MatrixXd patch_sensing_block(const SensingOperator& op, int i0, int j0, int patch_size) {
    if (op.mode() != Mode::Cacti)
        throw ArgumentError("patch_sensing_block: only cacti mode decouples spatially");
    const int P = patch_size, nt = op.nt();
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(P * P, P * P * nt);
    for (int k = 0; k < nt; ++k)
        for (int j = 0; j < P; ++j)
            for (int i = 0; i < P; ++i) {
                const int pix = i + P * j;
                phi(pix, pix + P * P * k) = op.masks()(i0 + i, j0 + j, k);
            }
    return phi;
}

DataCube gmm_reconstruct(const Measurement& y, const SensingOperator& op, const GmmModel& model,
                         double q_sigma, const PatchConfig& config) {
    if (op.mode() != Mode::Cacti)
        throw ArgumentError("gmm_reconstruct: cassi mode is not supported");
    if (y.rows != op.meas_rows() || y.cols != op.meas_cols())
        throw ArgumentError("gmm_reconstruct: measurement dimensions do not match operator");
    config.validate(op.nx(), op.ny(), op.nt());
    const int P = config.patch_size, nt = op.nt();
    if (config.depth(nt) != nt)
        throw ArgumentError("gmm_reconstruct: patch_depth must equal nt");
    if (model.dim() != P * P * nt)
        throw ArgumentError("gmm_reconstruct: model dimension does not match patch size");

    const Eigen::MatrixXd Q = q_sigma * q_sigma * Eigen::MatrixXd::Identity(P * P, P * P);
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
            patches.emplace_back(PatchIndex{i0, j0, 0},
                                 gmm_posterior_patch(yp, phi, model, Q).mean);
        }
    return aggregate_patches(patches, op.nx(), op.ny(), op.nt(), config);
}

}  // namespace sci
