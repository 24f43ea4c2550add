#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sci/cube.hpp"

namespace sci {

// Integer-pixel spectral shear: channel k of the output is channel k of the
// input copied with column offset (k - reference_channel)*step, offsets
// normalized so the minimum offset is 0. Vacated columns are zero.
DataCube shear_cube(const DataCube& cube, int dispersion_step, int reference_channel);

// Inverse of shear_cube on the original support.
DataCube unshear_cube(const DataCube& sheared, int ny_orig, int dispersion_step, int reference_channel);

// Structured sensing operator Phi = [D_1, ..., D_Nt]. In cassi mode the mask
// frames are sheared by the dispersion step before modulation, so channel k
// lands on detector columns offset by k*step.
class SensingOperator {
public:
    SensingOperator(MaskStack masks, Mode mode, int dispersion_step = 0, int reference_channel = 0);

    const MaskStack& masks() const { return masks_; }
    Mode mode() const { return mode_; }
    int dispersion_step() const { return dispersion_step_; }
    int reference_channel() const { return reference_channel_; }

    int nx() const { return masks_.nx(); }
    int ny() const { return masks_.ny(); }
    int nt() const { return masks_.nt(); }
    int meas_rows() const { return masks_.nx(); }
    int meas_cols() const;
    size_t cube_size() const { return static_cast<size_t>(nx()) * ny() * nt(); }
    size_t meas_size() const { return static_cast<size_t>(meas_rows()) * meas_cols(); }

    // Y = sum_k X_k .* M_k (+ noise); cassi shears X and M first.
    Measurement forward(const DataCube& cube, const NoiseModel& noise = {}) const;

    // Phi^T y: frame k = M_k .* Y (with the shear offsets undone in cassi mode).
    DataCube adjoint(const Measurement& y) const;

    // Flat forward/adjoint on raw vectors (no range checks, no noise);
    // used by the solvers on unconstrained iterates.
    void forward_vec(const std::vector<double>& x, std::vector<double>& y) const;
    void adjoint_vec(const std::vector<double>& y, std::vector<double>& x) const;

    // Diagonal of Phi Phi^T: psi_i = sum_k M_k(i)^2 per measurement pixel.
    std::vector<double> phi_phit_diag() const;

    // Dense realization of Phi; test oracle. Guard: cube_size() <= 65536.
    Eigen::MatrixXd build_dense_phi() const;

    // Phi^T (Phi Phi^T)^{-1} y, the minimum-norm consistent estimate.
    // Throws NumericError if any psi_i == 0.
    DataCube least_squares_init(const Measurement& y) const;

private:
    MaskStack masks_;
    Mode mode_;
    int dispersion_step_;
    int reference_channel_;
};

}  // namespace sci
