#include "sci/wnnm.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "sci/metrics.hpp"
#include "sci/patches.hpp"

namespace sci {

std::vector<GroupPatchIndex> patch_match(const DataCube& cube, const GroupPatchIndex& ref,
                                         const GroupMatchConfig& config) {
    config.validate();
    const int P = config.patch_size;
    const int nx = cube.nx(), ny = cube.ny(), nt = cube.nt();
    if (ref.i < 0 || ref.j < 0 || ref.i + P > nx || ref.j + P > ny || ref.k < 0 || ref.k >= nt)
        throw ArgumentError("patch_match: reference patch out of bounds");

    const int half = config.window / 2;
    const int i_lo = std::max(0, ref.i - half), i_hi = std::min(nx - P, ref.i + half);
    const int j_lo = std::max(0, ref.j - half), j_hi = std::min(ny - P, ref.j + half);
    int k_lo = 0, k_hi = nt - 1;
    if (config.window_t > 0) {
        const int ht = config.window_t / 2;
        k_lo = std::max(0, ref.k - ht);
        k_hi = std::min(nt - 1, ref.k + ht);
    }

    struct Cand {
        double dist;
        size_t linear;
        GroupPatchIndex idx;
    };
    std::vector<Cand> cands;
    for (int k = k_lo; k <= k_hi; ++k)
        for (int j = j_lo; j <= j_hi; ++j)
            for (int i = i_lo; i <= i_hi; ++i) {
                double d = 0.0;
                for (int jj = 0; jj < P; ++jj)
                    for (int ii = 0; ii < P; ++ii) {
                        const double diff = cube(i + ii, j + jj, k) - cube(ref.i + ii, ref.j + jj, ref.k);
                        d += diff * diff;
                    }
                GroupPatchIndex gi{i, j, k};
                cands.push_back({d, gi.linear(nx, ny), gi});
            }
    const size_t m = std::min<size_t>(config.group_size, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + m, cands.end(), [](const Cand& a, const Cand& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        return a.linear < b.linear;
    });
    std::vector<GroupPatchIndex> out;
    out.reserve(m);
    for (size_t i = 0; i < m; ++i) out.push_back(cands[i].idx);
    return out;
}

Eigen::MatrixXd wnnm_group(const Eigen::MatrixXd& group, double sigma, double wnnm_c, double eps) {
    if (!(sigma > 0.0)) throw ArgumentError("wnnm_group: sigma must be > 0");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(group, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd sv = svd.singularValues();
    const double m = std::sqrt(static_cast<double>(group.cols()));
    for (int i = 0; i < sv.size(); ++i) {
        const double w = wnnm_c * m / (sv(i) / sigma + eps);
        sv(i) = std::max(sv(i) - w, 0.0);
    }
    return svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
}

namespace {

// one patch-match + WNNM + overlap-average pass over the whole cube
DataCube wnnm_pass(const DataCube& cube, double sigma, const GroupMatchConfig& config) {
    const int P = config.patch_size;
    const int nx = cube.nx(), ny = cube.ny(), nt = cube.nt();
    const auto gi = patch_grid(nx, P, config.stride);
    const auto gj = patch_grid(ny, P, config.stride);

    DataCube acc(nx, ny, nt), weight(nx, ny, nt);
    Eigen::MatrixXd group;
    for (int k = 0; k < nt; ++k)
        for (int j0 : gj)
            for (int i0 : gi) {
                const auto matched = patch_match(cube, {i0, j0, k}, config);
                group.resize(P * P, static_cast<Eigen::Index>(matched.size()));
                for (size_t c = 0; c < matched.size(); ++c) {
                    const auto& m = matched[c];
                    for (int jj = 0; jj < P; ++jj)
                        for (int ii = 0; ii < P; ++ii)
                            group(ii + P * jj, static_cast<Eigen::Index>(c)) = cube(m.i + ii, m.j + jj, m.k);
                }
                const Eigen::MatrixXd den = wnnm_group(group, sigma, config.wnnm_c, config.eps);
                for (size_t c = 0; c < matched.size(); ++c) {
                    const auto& m = matched[c];
                    for (int jj = 0; jj < P; ++jj)
                        for (int ii = 0; ii < P; ++ii) {
                            acc(m.i + ii, m.j + jj, m.k) += den(ii + P * jj, static_cast<Eigen::Index>(c));
                            weight(m.i + ii, m.j + jj, m.k) += 1.0;
                        }
                }
            }
    DataCube out = cube;
    for (size_t i = 0; i < out.size(); ++i)
        if (weight.data()[i] > 0.0) out.data()[i] = acc.data()[i] / weight.data()[i];
    return out;
}

}  // namespace

SolveResult desci_solve(const SensingOperator& op, const Measurement& y,
                        const GroupMatchConfig& group_config, const SolverConfig& solver_config,
                        const DataCube* reference, const DataCube* init) {
    if (op.mode() != Mode::Cacti)
        throw ArgumentError("desci_solve: cassi mode is not supported");
    solver_config.validate();
    group_config.validate();
    if (y.rows != op.meas_rows() || y.cols != op.meas_cols())
        throw ArgumentError("desci_solve: measurement dimensions do not match operator");

    std::vector<double> psi = op.phi_phit_diag();
    for (double p : psi)
        if (p == 0.0) throw NumericError("desci_solve: singular operator, psi = 0 somewhere");

    std::vector<double> schedule = group_config.sigma_schedule;
    if (schedule.empty()) {
        // geometric 50/255 -> 5/255 over the outer iterations
        const int n = solver_config.max_iters;
        const double hi = 50.0 / 255.0, lo = 5.0 / 255.0;
        for (int i = 0; i < n; ++i)
            schedule.push_back(n == 1 ? lo : hi * std::pow(lo / hi, static_cast<double>(i) / (n - 1)));
    }

    DataCube v = init ? *init : op.least_squares_init(y);
    if (init && !init->same_shape(DataCube(op.nx(), op.ny(), op.nt())))
        throw ArgumentError("desci_solve: init shape does not match operator");
    DataCube x(op.nx(), op.ny(), op.nt());
    const size_t n = op.cube_size();

    SolveResult res;
    std::vector<double> r, corr, prev(n, 0.0);
    double prev_norm = 0.0;
    for (int j = 0; j < solver_config.max_iters; ++j) {
        op.forward_vec(v.data(), r);
        for (size_t i = 0; i < r.size(); ++i) r[i] = (y.data[i] - r[i]) / psi[i];
        op.adjoint_vec(r, corr);
        for (size_t i = 0; i < n; ++i) x.data()[i] = v.data()[i] + corr[i];

        const double sigma = schedule[std::min<size_t>(j, schedule.size() - 1)];
        v = sigma > 0.0 ? wnnm_pass(x, sigma, group_config) : x;

        op.forward_vec(x.data(), r);
        for (size_t i = 0; i < r.size(); ++i) r[i] -= y.data[i];
        double rn = 0.0;
        for (double t : r) rn += t * t;
        TraceRecord rec;
        rec.iter = j;
        rec.residual = std::sqrt(rn);
        double dn = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double d = x.data()[i] - prev[i];
            dn += d * d;
        }
        rec.change = prev_norm > 0.0 ? std::sqrt(dn) / prev_norm : std::numeric_limits<double>::infinity();
        rec.psnr = reference ? psnr(*reference, v) : std::numeric_limits<double>::quiet_NaN();
        res.trace.records.push_back(rec);

        prev = x.data();
        double pn = 0.0;
        for (double t : prev) pn += t * t;
        prev_norm = std::sqrt(pn);
        if (j > 0 && rec.change < solver_config.tol) break;
    }
    res.trace.final_v = v.data();
    res.estimate = v;
    return res;
}

}  // namespace sci
