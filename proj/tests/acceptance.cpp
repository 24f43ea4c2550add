// Acceptance gate: one line per criterion, nonzero exit if any fail.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sci/bench.hpp"
#include "sci/gmm.hpp"
#include "sci/io.hpp"
#include "sci/mask.hpp"
#include "sci/metrics.hpp"
#include "sci/rng.hpp"
#include "sci/solvers.hpp"
#include "sci/theory.hpp"
#include "sci/wnnm.hpp"

using namespace sci;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
    int number;
    const char* label;
    double budget_seconds;
    bool (*run)(std::string& detail);
};

DataCube random_cube(int nx, int ny, int nt, uint64_t seed, bool positive = false) {
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> u(positive ? 0.0 : -1.0, 1.0);
    DataCube c(nx, ny, nt);
    for (double& v : c.data()) v = u(rng);
    return c;
}

MaskStack alive_bernoulli(int nx, int ny, int nt, uint64_t seed) {
    MaskStack m = make_masks(MaskKind::Bernoulli, nx, ny, nt, 0.5, seed);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double s = 0.0;
            for (int k = 0; k < nt; ++k) s += m(i, j, k);
            if (s == 0.0) m.values(i, j, 0) = 1.0;
        }
    return m;
}

// ------------------------------------------------------------- criterion 1

bool c1_operators(std::string& detail) {
    for (int mode_idx = 0; mode_idx < 2; ++mode_idx) {
        const Mode mode = mode_idx == 0 ? Mode::Cacti : Mode::Cassi;
        for (uint64_t t = 0; t < 200; ++t) {
            const int nx = 4 + static_cast<int>(t % 5), ny = 5 + static_cast<int>(t % 4),
                      nt = 2 + static_cast<int>(t % 3);
            const MaskStack m = make_masks(t % 2 ? MaskKind::Gaussian : MaskKind::Bernoulli, nx, ny,
                                           nt, t % 2 ? 0.0 : 0.5, 1000 + t);
            const SensingOperator op(m, mode, mode == Mode::Cassi ? 1 : 0, 0);
            const DataCube x = random_cube(nx, ny, nt, 2000 + t);
            auto rng = make_rng(3000 + t);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            Measurement y;
            y.rows = op.meas_rows();
            y.cols = op.meas_cols();
            y.mode = mode;
            y.n_lambda = nt;
            y.dispersion_step = op.dispersion_step();
            y.data.resize(op.meas_size());
            for (double& v : y.data) v = u(rng);

            const Measurement ax = op.forward(x);
            const DataCube aty = op.adjoint(y);
            double lhs = 0.0, rhs = 0.0;
            for (size_t i = 0; i < ax.data.size(); ++i) lhs += ax.data[i] * y.data[i];
            for (size_t i = 0; i < x.size(); ++i) rhs += x.data()[i] * aty.data()[i];
            const double rel = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
            if (rel > 1e-10) {
                detail = "adjoint identity violated, rel err " + std::to_string(rel);
                return false;
            }

            const Eigen::MatrixXd phi = op.build_dense_phi();
            const Eigen::Map<const Eigen::VectorXd> xv(x.data().data(),
                                                       static_cast<Eigen::Index>(x.size()));
            const Eigen::VectorXd dense_y = phi * xv;
            for (size_t i = 0; i < ax.data.size(); ++i)
                if (std::abs(dense_y(static_cast<Eigen::Index>(i)) - ax.data[i]) > 1e-12) {
                    detail = "structured forward differs from dense oracle";
                    return false;
                }
            const Eigen::Map<const Eigen::VectorXd> yv(y.data.data(),
                                                       static_cast<Eigen::Index>(y.data.size()));
            const Eigen::VectorXd dense_at = phi.transpose() * yv;
            for (size_t i = 0; i < aty.size(); ++i)
                if (std::abs(dense_at(static_cast<Eigen::Index>(i)) - aty.data()[i]) > 1e-12) {
                    detail = "structured adjoint differs from dense oracle";
                    return false;
                }
        }
    }
    detail = "200 instances per mode";
    return true;
}

// ------------------------------------------------------------- criterion 2

bool c2_gram_and_x_update(std::string& detail) {
    for (uint64_t t = 0; t < 20; ++t) {
        const int nx = 4 + static_cast<int>(t % 4), ny = 4 + static_cast<int>(t % 3),
                  nt = 2 + static_cast<int>(t % 3);
        const MaskStack m = make_masks(MaskKind::Gaussian, nx, ny, nt, 0.0, 500 + t);
        const SensingOperator op(m, Mode::Cacti);
        const Eigen::MatrixXd phi = op.build_dense_phi();
        const Eigen::MatrixXd gram = phi * phi.transpose();
        const std::vector<double> psi = op.phi_phit_diag();
        for (Eigen::Index i = 0; i < gram.rows(); ++i)
            for (Eigen::Index j = 0; j < gram.cols(); ++j) {
                if (i != j && gram(i, j) != 0.0) {
                    detail = "Gram off-diagonal nonzero";
                    return false;
                }
                if (i == j && std::abs(gram(i, i) - psi[static_cast<size_t>(i)]) > 1e-12) {
                    detail = "Gram diagonal differs from the closed form";
                    return false;
                }
            }

        const DataCube v = random_cube(nx, ny, nt, 600 + t);
        const DataCube u = random_cube(nx, ny, nt, 700 + t);
        const DataCube truth = random_cube(nx, ny, nt, 800 + t, true);
        const Measurement y = op.forward(truth);
        const double rho = 0.5 + 0.1 * static_cast<double>(t % 7);
        const DataCube x = x_update_closed_form(v, u, rho, op, y, psi);

        const Eigen::Index n = static_cast<Eigen::Index>(op.cube_size());
        const Eigen::Map<const Eigen::VectorXd> vv(v.data().data(), n), uv(u.data().data(), n);
        const Eigen::Map<const Eigen::VectorXd> yv(y.data.data(),
                                                   static_cast<Eigen::Index>(y.data.size()));
        const Eigen::MatrixXd lhs =
            phi.transpose() * phi + rho * Eigen::MatrixXd::Identity(n, n);
        const Eigen::VectorXd rhs = phi.transpose() * yv + rho * (vv - uv / rho);
        const Eigen::VectorXd dense_x = lhs.ldlt().solve(rhs);
        for (size_t i = 0; i < x.size(); ++i) {
            const double rel = std::abs(x.data()[i] - dense_x(static_cast<Eigen::Index>(i))) /
                               std::max(1.0, std::abs(dense_x(static_cast<Eigen::Index>(i))));
            if (rel > 1e-8) {
                detail = "one-shot x-update differs from the dense solve";
                return false;
            }
        }
    }
    detail = "20 instances, diagonal Gram + one-shot update";
    return true;
}

// ------------------------------------------------------------- criterion 3

bool c3_gap_admm(std::string& detail) {
    const int nx = 32, ny = 32, nt = 4;
    const DataCube truth = make_scene("moving-square", nx, ny, nt, 5);
    const MaskStack m = alive_bernoulli(nx, ny, nt, 42);
    const SensingOperator op(m, Mode::Cacti);
    const Measurement y = op.forward(truth);

    // run both to convergence in the light-smoothing regime, where the GAP
    // projection fixed point and the ADMM penalized optimum coincide
    SolverConfig cfg;
    cfg.rho = 1.0;
    cfg.tv_weight = 0.01;
    cfg.max_iters = 300;
    cfg.tv_inner_iters = 20;
    cfg.tol = 0.0;
    const SolveResult gap = gap_solve(op, y, cfg);
    const SolveResult admm = admm_solve(op, y, cfg);

    for (const auto& rec : gap.trace.records)
        if (rec.residual > 1e-9) {
            detail = "GAP iterate left the data manifold, residual " +
                     std::to_string(rec.residual);
            return false;
        }
    const double p_gap = psnr(truth, gap.estimate);
    const double p_admm = psnr(truth, admm.estimate);
    const double diff = std::abs(p_gap - p_admm);
    std::ostringstream os;
    os << "gap " << p_gap << " dB vs admm " << p_admm << " dB, diff " << diff;
    detail = os.str();
    return diff <= 0.2;
}

// ------------------------------------------------------------- criterion 4

bool c4_gmm_posterior(std::string& detail) {
    for (uint64_t t = 0; t < 50; ++t) {
        auto rng = make_rng(4000 + t);
        std::normal_distribution<double> g(0.0, 1.0);
        const int d = 2 + static_cast<int>(t % 7);  // <= 8
        const int mrows = 1 + static_cast<int>(t % static_cast<uint64_t>(d));
        const int K = 1 + static_cast<int>(t % 3);
        GmmModel model;
        for (int k = 0; k < K; ++k) {
            GmmComponent c;
            c.weight = 1.0 / K;
            c.mean = Eigen::VectorXd::NullaryExpr(d, [&](int) { return g(rng); });
            Eigen::MatrixXd a(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) a(i, j) = g(rng);
            c.cov = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
            model.components.push_back(c);
        }
        Eigen::MatrixXd phi(mrows, d);
        for (int i = 0; i < mrows; ++i)
            for (int j = 0; j < d; ++j) phi(i, j) = g(rng);
        Eigen::MatrixXd q(mrows, mrows);
        for (int i = 0; i < mrows; ++i)
            for (int j = 0; j < mrows; ++j) q(i, j) = g(rng);
        const Eigen::MatrixXd Q = q * q.transpose() + 0.2 * Eigen::MatrixXd::Identity(mrows, mrows);
        const Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(mrows, [&](int) { return g(rng); });

        const GmmPosterior fast = gmm_posterior_patch(y, phi, model, Q);

        // brute-force dense evaluation, no shared factorizations
        Eigen::VectorXd dens(K);
        std::vector<Eigen::VectorXd> means(K);
        std::vector<Eigen::MatrixXd> covs(K);
        for (int k = 0; k < K; ++k) {
            const auto& c = model.components[k];
            const Eigen::MatrixXd Sinv = c.cov.inverse();
            const Eigen::MatrixXd Qinv = Q.inverse();
            covs[k] = (phi.transpose() * Qinv * phi + Sinv).inverse();
            means[k] = covs[k] * (phi.transpose() * Qinv * y + Sinv * c.mean);
            const Eigen::MatrixXd marg = Q + phi * c.cov * phi.transpose();
            const Eigen::VectorXd r = y - phi * c.mean;
            dens(k) = c.weight * std::exp(-0.5 * r.dot(marg.inverse() * r)) /
                      std::sqrt(std::pow(2.0 * M_PI, mrows) * marg.determinant());
        }
        const Eigen::VectorXd w = dens / dens.sum();
        for (int k = 0; k < K; ++k) {
            if (std::abs(fast.weights(k) - w(k)) > 1e-8 ||
                (fast.means[k] - means[k]).lpNorm<Eigen::Infinity>() > 1e-8 ||
                (fast.covs[k] - covs[k]).lpNorm<Eigen::Infinity>() > 1e-8) {
                detail = "posterior differs from the brute-force evaluation";
                return false;
            }
        }
    }

    // K = 1, identity sensing: conjugate shrinkage (y + s^2 mu)/(1 + s^2)
    const int d = 4;
    GmmModel model;
    GmmComponent c;
    c.weight = 1.0;
    c.mean = Eigen::VectorXd::LinSpaced(d, -1.0, 1.0);
    c.cov = Eigen::MatrixXd::Identity(d, d);
    model.components.push_back(c);
    const double s = 0.25;
    Eigen::VectorXd y(d);
    y << 0.3, -0.2, 0.9, 0.1;
    const GmmPosterior post = gmm_posterior_patch(y, Eigen::MatrixXd::Identity(d, d), model,
                                                  s * s * Eigen::MatrixXd::Identity(d, d));
    const Eigen::VectorXd expect = (y + s * s * c.mean) / (1.0 + s * s);
    if ((post.mean - expect).lpNorm<Eigen::Infinity>() > 1e-10) {
        detail = "K=1 conjugate case off by more than 1e-10";
        return false;
    }
    detail = "50 random instances + conjugate case";
    return true;
}

// ------------------------------------------------------------- criterion 5

bool c5_solver_ordering(std::string& detail) {
    double lsq_sum = 0.0, gap_sum = 0.0, desci_sum = 0.0;
    const int runs = 3;
    const auto solvers = default_bench_solvers();
    const auto& desci = find_solver(solvers, "desci");
    for (uint64_t seed = 1; seed <= runs; ++seed) {
        const DataCube truth = make_scene("moving-square", 64, 64, 8, seed);
        const MaskStack m = alive_bernoulli(64, 64, 8, mix_seed(77, seed));
        const SensingOperator op(m, Mode::Cacti);
        const Measurement y = op.forward(truth);
        lsq_sum += psnr(truth, op.least_squares_init(y));
        SolverConfig cfg;
        gap_sum += psnr(truth, gap_solve(op, y, cfg).estimate);
        desci_sum += psnr(truth, desci.run(truth, op, y).first);
    }
    const double lsq = lsq_sum / runs, gap = gap_sum / runs, des = desci_sum / runs;
    std::ostringstream os;
    os << "mean PSNR: lsq " << lsq << ", gap-tv " << gap << ", desci " << des;
    detail = os.str();
    return des >= gap + 0.5 && gap >= lsq + 3.0;
}

// ------------------------------------------------------------- criterion 6

bool c6_recovery_bound(std::string& detail) {
    const TheoremCheckReport rep = theorem_check(8, 8, 2, 2, 500, 1.0, 2024);
    const TheoremCheckReport exact = theorem_check(8, 8, 2, 2, 500, 1.0, 2024, false);
    std::ostringstream os;
    os << "success " << rep.success_frequency << " vs floor " << rep.theoretical_floor
       << (rep.vacuous ? " (vacuous)" : "") << "; on-codebook success " << exact.success_frequency;
    detail = os.str();
    return rep.pass && exact.success_frequency == 1.0;
}

// ------------------------------------------------------------- criterion 7

bool c7_metrics(std::string& detail) {
    const DataCube a(16, 16, 2, 0.3);
    if (psnr(a, a) != 100.0 || std::abs(ssim(a, a) - 1.0) > 1e-12) {
        detail = "identity metric values off";
        return false;
    }
    const DataCube zero(16, 16, 1, 0.0), tenth(16, 16, 1, 0.1);
    if (std::abs(psnr(zero, tenth) - 20.0) > 1e-9) {
        detail = "20 dB identity off";
        return false;
    }
    const DataCube half(16, 16, 1, 0.5), quarter(16, 16, 1, 0.25);
    const double s = ssim(half, quarter);
    std::ostringstream os;
    os << "constant-image ssim " << s;
    detail = os.str();
    return std::abs(s - 0.8003) <= 1e-3;
}

// ------------------------------------------------------------- criterion 8

bool c8_throughput(std::string& detail) {
    const DataCube truth = make_scene("moving-blob", 256, 256, 8, 1);
    const MaskStack m = alive_bernoulli(256, 256, 8, 9);
    const SensingOperator op(m, Mode::Cacti);
    const Measurement y = op.forward(truth);
    SolverConfig cfg;
    cfg.max_iters = 100;
    cfg.tol = 0.0;
    const auto t0 = Clock::now();
    const SolveResult res = gap_solve(op, y, cfg);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::ostringstream os;
    os << "100 iterations on 256x256x8 in " << secs << " s, psnr " << psnr(truth, res.estimate);
    detail = os.str();
    return secs <= 60.0 && res.trace.records.size() == 100;
}

// ------------------------------------------------------------- criterion 9

std::vector<char> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string strip_seconds_column(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        std::string kept;
        int field = 0;
        for (char c : line) {
            if (c == ',') ++field;
            if (field != 4 || c == ',') kept += c;
        }
        out += kept + "\n";
    }
    return out;
}

bool c9_reproducibility(std::string& detail) {
    const fs::path root =
        fs::temp_directory_path() / ("scisim-accept-" + std::to_string(std::random_device{}()));
    std::vector<std::vector<char>> meas_bytes, rec_bytes;
    std::vector<std::string> bench_text;
    for (int pass = 0; pass < 2; ++pass) {
        const fs::path dir = root / std::to_string(pass);
        fs::create_directories(dir);
        const DataCube truth = make_scene("moving-square", 32, 32, 4, 11);
        const MaskStack m = alive_bernoulli(32, 32, 4, 12);
        const SensingOperator op(m, Mode::Cacti);
        NoiseModel noise;
        noise.sigma = 0.01;
        noise.seed = 13;
        write_scit_measurement(dir / "measurement.scit", op.forward(truth, noise));
        meas_bytes.push_back(slurp(dir / "measurement.scit"));

        const Measurement y = read_scit_measurement(dir / "measurement.scit");
        SolverConfig cfg;
        cfg.max_iters = 30;
        write_scit(dir / "reconstruction.scit", gap_solve(op, y, cfg).estimate);
        rec_bytes.push_back(slurp(dir / "reconstruction.scit"));

        const auto all = default_bench_solvers();
        const std::vector<SolverSpec> chosen = {find_solver(all, "oracle"),
                                                find_solver(all, "lsq"),
                                                find_solver(all, "gap-tv")};
        const BenchReport rep = run_benchmark({{"moving-square", 16, 16, 2, 3}}, chosen, 14, "d");
        bench_text.push_back(strip_seconds_column(rep.to_csv()));
    }
    std::error_code ec;
    fs::remove_all(root, ec);
    if (meas_bytes[0] != meas_bytes[1]) {
        detail = "measurement files differ between runs";
        return false;
    }
    if (rec_bytes[0] != rec_bytes[1]) {
        detail = "reconstruction files differ between runs";
        return false;
    }
    if (bench_text[0] != bench_text[1]) {
        detail = "benchmark rows differ between runs";
        return false;
    }
    detail = "simulate, reconstruct and bench byte-identical across repeated runs";
    return true;
}

const Criterion kCriteria[] = {
    {1, "operator adjoint + dense-oracle agreement", 5.0, c1_operators},
    {2, "diagonal Gram + one-shot x-update", 5.0, c2_gram_and_x_update},
    {3, "GAP data consistency + GAP/ADMM agreement", 30.0, c3_gap_admm},
    {4, "mixture posterior vs brute force", 5.0, c4_gmm_posterior},
    {5, "solver ordering desci > gap-tv > lsq", 600.0, c5_solver_ordering},
    {6, "Monte Carlo recovery bound", 120.0, c6_recovery_bound},
    {7, "metric identities", 1.0, c7_metrics},
    {8, "GAP-TV throughput at 256x256x8", 60.0, c8_throughput},
    {9, "end-to-end reproducibility", 120.0, c9_reproducibility},
};

}  // namespace

int main() {
    int failures = 0;
    for (const Criterion& c : kCriteria) {
        std::string detail;
        const auto t0 = Clock::now();
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (secs > c.budget_seconds) {
            ok = false;
            detail += " [over budget " + std::to_string(c.budget_seconds) + " s]";
        }
        std::printf("%s criterion %d: %s (%.1f s) - %s\n", ok ? "PASS" : "FAIL", c.number, c.label,
                    secs, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
