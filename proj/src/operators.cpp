#include "sci/operators.hpp"

#include <cmath>

#include "sci/rng.hpp"

namespace sci {

DataCube shear_cube(const DataCube& cube, int dispersion_step, int reference_channel) {
    if (dispersion_step < 0)
        throw ArgumentError("shear_cube: dispersion_step must be >= 0");
    if (reference_channel < 0 || reference_channel >= cube.nt())
        throw ArgumentError("shear_cube: reference_channel out of range");

    const int nx = cube.nx(), ny = cube.ny(), nt = cube.nt();
    // offsets (k - ref)*d normalized so the minimum (k = 0) is 0
    const int ny_out = ny + (nt - 1) * dispersion_step;
    DataCube out(nx, ny_out, nt);
    for (int k = 0; k < nt; ++k) {
        const int off = k * dispersion_step;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                out(i, j + off, k) = cube(i, j, k);
    }
    return out;
}

DataCube unshear_cube(const DataCube& sheared, int ny_orig, int dispersion_step, int reference_channel) {
    if (dispersion_step < 0)
        throw ArgumentError("unshear_cube: dispersion_step must be >= 0");
    const int nx = sheared.nx(), nt = sheared.nt();
    if (sheared.ny() != ny_orig + (nt - 1) * dispersion_step)
        throw ArgumentError("unshear_cube: sheared width inconsistent with ny_orig and step");
    (void)reference_channel;
    DataCube out(nx, ny_orig, nt);
    for (int k = 0; k < nt; ++k) {
        const int off = k * dispersion_step;
        for (int j = 0; j < ny_orig; ++j)
            for (int i = 0; i < nx; ++i)
                out(i, j, k) = sheared(i, j + off, k);
    }
    return out;
}

SensingOperator::SensingOperator(MaskStack masks, Mode mode, int dispersion_step, int reference_channel)
    : masks_(std::move(masks)), mode_(mode),
      dispersion_step_(dispersion_step), reference_channel_(reference_channel) {
    if (mode_ == Mode::Cacti) {
        dispersion_step_ = 0;
        reference_channel_ = 0;
    } else {
        if (dispersion_step_ < 0)
            throw ArgumentError("SensingOperator: dispersion_step must be >= 0");
        if (reference_channel_ < 0 || reference_channel_ >= masks_.nt())
            throw ArgumentError("SensingOperator: reference_channel out of range");
    }
}

int SensingOperator::meas_cols() const {
    if (mode_ == Mode::Cacti) return ny();
    return ny() + (nt() - 1) * dispersion_step_;
}

void SensingOperator::forward_vec(const std::vector<double>& x, std::vector<double>& y) const {
    const int nx = this->nx(), ny = this->ny(), nt = this->nt();
    const int rows = meas_rows();
    y.assign(meas_size(), 0.0);
    for (int k = 0; k < nt; ++k) {
        const int off = k * dispersion_step_;
        const size_t base = static_cast<size_t>(nx) * ny * k;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                y[static_cast<size_t>(i) + static_cast<size_t>(rows) * (j + off)] +=
                    x[base + i + static_cast<size_t>(nx) * j] * masks_(i, j, k);
    }
}

void SensingOperator::adjoint_vec(const std::vector<double>& y, std::vector<double>& x) const {
    const int nx = this->nx(), ny = this->ny(), nt = this->nt();
    const int rows = meas_rows();
    x.assign(cube_size(), 0.0);
    for (int k = 0; k < nt; ++k) {
        const int off = k * dispersion_step_;
        const size_t base = static_cast<size_t>(nx) * ny * k;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                x[base + i + static_cast<size_t>(nx) * j] =
                    masks_(i, j, k) * y[static_cast<size_t>(i) + static_cast<size_t>(rows) * (j + off)];
    }
}

Measurement SensingOperator::forward(const DataCube& cube, const NoiseModel& noise) const {
    if (cube.nx() != nx() || cube.ny() != ny() || cube.nt() != nt())
        throw ArgumentError("forward: cube dimensions do not match operator");

    Measurement m;
    m.rows = meas_rows();
    m.cols = meas_cols();
    m.mode = mode_;
    m.noise_sigma = noise.sigma;
    if (mode_ == Mode::Cassi) {
        m.n_lambda = nt();
        m.dispersion_step = dispersion_step_;
        m.reference_channel = reference_channel_;
    }
    forward_vec(cube.data(), m.data);
    if (noise.sigma > 0.0) {
        auto rng = make_rng(noise.seed);
        std::normal_distribution<double> gauss(0.0, noise.sigma);
        for (double& v : m.data) v += gauss(rng);
    }
    return m;
}

DataCube SensingOperator::adjoint(const Measurement& y) const {
    if (y.rows != meas_rows() || y.cols != meas_cols())
        throw ArgumentError("adjoint: measurement dimensions do not match operator");
    DataCube out(nx(), ny(), nt());
    adjoint_vec(y.data, out.data());
    return out;
}

std::vector<double> SensingOperator::phi_phit_diag() const {
    const int nx = this->nx(), ny = this->ny(), nt = this->nt();
    const int rows = meas_rows();
    std::vector<double> psi(meas_size(), 0.0);
    for (int k = 0; k < nt; ++k) {
        const int off = k * dispersion_step_;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double v = masks_(i, j, k);
                psi[static_cast<size_t>(i) + static_cast<size_t>(rows) * (j + off)] += v * v;
            }
    }
    return psi;
}

Eigen::MatrixXd SensingOperator::build_dense_phi() const {
    if (cube_size() > 65536)
        throw CapacityError("build_dense_phi: cube size exceeds 65536");
    const int nx = this->nx(), ny = this->ny(), nt = this->nt();
    const int rows = meas_rows();
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(meas_size()),
                                                static_cast<Eigen::Index>(cube_size()));
    for (int k = 0; k < nt; ++k) {
        const int off = k * dispersion_step_;
        const size_t base = static_cast<size_t>(nx) * ny * k;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                phi(static_cast<Eigen::Index>(i + static_cast<size_t>(rows) * (j + off)),
                    static_cast<Eigen::Index>(base + i + static_cast<size_t>(nx) * j)) = masks_(i, j, k);
    }
    return phi;
}

DataCube SensingOperator::least_squares_init(const Measurement& y) const {
    if (y.rows != meas_rows() || y.cols != meas_cols())
        throw ArgumentError("least_squares_init: measurement dimensions do not match operator");
    const std::vector<double> psi = phi_phit_diag();
    size_t dead = 0;
    for (double p : psi)
        if (p == 0.0) ++dead;
    if (dead > 0)
        throw NumericError("least_squares_init: singular operator, " + std::to_string(dead) +
                           " measurement pixel(s) have psi = 0");
    std::vector<double> q(psi.size());
    for (size_t i = 0; i < psi.size(); ++i) q[i] = y.data[i] / psi[i];
    DataCube out(nx(), ny(), nt());
    adjoint_vec(q, out.data());
    return out;
}

}  // namespace sci
