#include "sci/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sci/metrics.hpp"

namespace sci {

std::string SolveTrace::to_csv() const {
    std::ostringstream os;
    os << "iter,residual,change,psnr\n";
    for (const auto& r : records) {
        os << r.iter << ',' << r.residual << ',' << r.change << ',';
        if (std::isnan(r.psnr))
            os << "";
        else
            os << r.psnr;
        os << '\n';
    }
    return os.str();
}

namespace {

// Anisotropic TV prox on one frame by projected gradient ascent on the dual:
//   max_{|p| <= w}  -0.5 ||D^T p||^2 + <D f, p>,   z = f - D^T p,
// forward differences D, step 1/8 (operator norm bound of D D^T in 2D).
void tv_prox_frame(const double* f, double* z, int nx, int ny, double weight, int iters,
                   std::vector<double>& px, std::vector<double>& py) {
    const size_t n = static_cast<size_t>(nx) * ny;
    px.assign(n, 0.0);
    py.assign(n, 0.0);
    std::copy(f, f + n, z);
    const double tau = 0.125;
    auto at = [nx](int i, int j) { return static_cast<size_t>(i) + static_cast<size_t>(nx) * j; };
    for (int it = 0; it < iters; ++it) {
        // p += tau * grad(z), clipped to [-w, w]
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const size_t id = at(i, j);
                if (i + 1 < nx)
                    px[id] = std::clamp(px[id] + tau * (z[at(i + 1, j)] - z[id]), -weight, weight);
                if (j + 1 < ny)
                    py[id] = std::clamp(py[id] + tau * (z[at(i, j + 1)] - z[id]), -weight, weight);
            }
        // z = f - D^T p
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const size_t id = at(i, j);
                double div = 0.0;
                if (i + 1 < nx) div -= px[id];
                if (i > 0) div += px[at(i - 1, j)];
                if (j + 1 < ny) div -= py[id];
                if (j > 0) div += py[at(i, j - 1)];
                z[id] = f[id] - div;
            }
    }
}

}  // namespace

DataCube tv_denoise(const DataCube& cube, double weight, int inner_iters) {
    if (weight < 0.0) throw ArgumentError("tv_denoise: weight must be >= 0");
    if (weight == 0.0) return cube;
    DataCube out(cube.nx(), cube.ny(), cube.nt());
    std::vector<double> px, py;
    const size_t frame = static_cast<size_t>(cube.nx()) * cube.ny();
    for (int k = 0; k < cube.nt(); ++k)
        tv_prox_frame(cube.data().data() + frame * k, out.data().data() + frame * k,
                      cube.nx(), cube.ny(), weight, inner_iters, px, py);
    return out;
}

DataCube x_update_closed_form(const DataCube& v, const DataCube& u, double rho,
                              const SensingOperator& op, const Measurement& y,
                              const std::vector<double>& psi) {
    if (!(rho > 0.0)) throw ArgumentError("x_update_closed_form: rho must be > 0");
    if (!v.same_shape(u)) throw ArgumentError("x_update_closed_form: v/u shape mismatch");

    const size_t n = op.cube_size();
    std::vector<double> b(n);
    for (size_t i = 0; i < n; ++i) b[i] = v.data()[i] - u.data()[i] / rho;

    std::vector<double> phib;
    op.forward_vec(b, phib);
    for (size_t i = 0; i < phib.size(); ++i)
        phib[i] = (y.data[i] - phib[i]) / (rho + psi[i]);

    std::vector<double> corr;
    op.adjoint_vec(phib, corr);
    DataCube out(op.nx(), op.ny(), op.nt());
    for (size_t i = 0; i < n; ++i) out.data()[i] = b[i] + corr[i];
    return out;
}

namespace {

double l2(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

DataCube apply_denoiser(const DataCube& x, const SolverConfig& cfg) {
    if (cfg.denoiser == DenoiserKind::Identity) return x;
    return tv_denoise(x, cfg.tv_weight, cfg.tv_inner_iters);
}

std::vector<double> check_psi(const SensingOperator& op) {
    std::vector<double> psi = op.phi_phit_diag();
    size_t dead = 0;
    for (double p : psi)
        if (p == 0.0) ++dead;
    if (dead > 0)
        throw NumericError("solver: singular operator, " + std::to_string(dead) +
                           " measurement pixel(s) have psi = 0");
    return psi;
}

}  // namespace

SolveResult admm_solve(const SensingOperator& op, const Measurement& y, const SolverConfig& config,
                       const DataCube* reference, const DataCube* init) {
    config.validate();
    if (y.rows != op.meas_rows() || y.cols != op.meas_cols())
        throw ArgumentError("admm_solve: measurement dimensions do not match operator");
    const std::vector<double> psi = check_psi(op);

    DataCube v = init ? *init : op.least_squares_init(y);
    DataCube u(op.nx(), op.ny(), op.nt());
    DataCube x = v;
    const size_t n = op.cube_size();

    SolveResult res;
    std::vector<double> r, prev(n, 0.0);
    double prev_norm = 0.0;
    for (int j = 0; j < config.max_iters; ++j) {
        x = x_update_closed_form(v, u, config.rho, op, y, psi);

        DataCube dn_in = x;
        for (size_t i = 0; i < n; ++i) dn_in.data()[i] += u.data()[i] / config.rho;
        v = apply_denoiser(dn_in, config);
        for (size_t i = 0; i < n; ++i)
            u.data()[i] += config.rho * (x.data()[i] - v.data()[i]);

        op.forward_vec(x.data(), r);
        for (size_t i = 0; i < r.size(); ++i) r[i] -= y.data[i];
        TraceRecord rec;
        rec.iter = j;
        rec.residual = l2(r);
        double dn = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double d = x.data()[i] - prev[i];
            dn += d * d;
        }
        rec.change = prev_norm > 0.0 ? std::sqrt(dn) / prev_norm : std::numeric_limits<double>::infinity();
        rec.psnr = reference ? psnr(*reference, v) : std::numeric_limits<double>::quiet_NaN();
        res.trace.records.push_back(rec);

        prev = x.data();
        prev_norm = l2(prev);
        if (j > 0 && rec.change < config.tol) break;
    }
    res.trace.final_v = v.data();
    res.trace.final_u = u.data();
    res.estimate = v;
    return res;
}

SolveResult gap_solve(const SensingOperator& op, const Measurement& y, const SolverConfig& config,
                      const DataCube* reference, const DataCube* init) {
    config.validate();
    if (y.rows != op.meas_rows() || y.cols != op.meas_cols())
        throw ArgumentError("gap_solve: measurement dimensions do not match operator");
    const std::vector<double> psi = check_psi(op);

    DataCube v = init ? *init : DataCube(op.nx(), op.ny(), op.nt());
    const size_t n = op.cube_size();

    SolveResult res;
    std::vector<double> r, corr, prev(n, 0.0);
    double prev_norm = 0.0;
    DataCube x(op.nx(), op.ny(), op.nt());
    for (int j = 0; j < config.max_iters; ++j) {
        // x = v + Phi^T (Phi Phi^T)^{-1} (y - Phi v)
        op.forward_vec(v.data(), r);
        for (size_t i = 0; i < r.size(); ++i) r[i] = (y.data[i] - r[i]) / psi[i];
        op.adjoint_vec(r, corr);
        for (size_t i = 0; i < n; ++i) x.data()[i] = v.data()[i] + corr[i];

        v = apply_denoiser(x, config);

        op.forward_vec(x.data(), r);
        for (size_t i = 0; i < r.size(); ++i) r[i] -= y.data[i];
        TraceRecord rec;
        rec.iter = j;
        rec.residual = l2(r);
        double dn = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double d = x.data()[i] - prev[i];
            dn += d * d;
        }
        rec.change = prev_norm > 0.0 ? std::sqrt(dn) / prev_norm : std::numeric_limits<double>::infinity();
        rec.psnr = reference ? psnr(*reference, v) : std::numeric_limits<double>::quiet_NaN();
        res.trace.records.push_back(rec);

        prev = x.data();
        prev_norm = l2(prev);
        if (j > 0 && rec.change < config.tol) break;
    }
    res.trace.final_v = v.data();
    res.estimate = v;
    return res;
}

}  // namespace sci
