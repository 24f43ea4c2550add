#pragma once

#include <cstdint>
#include <vector>

#include "sci/errors.hpp"

namespace sci {

// 3D data-cube X in R^{nx x ny x nt}. Storage is column-major within a
// frame, frames concatenated, so data[i + nx*(j + ny*k)] = X(i,j,k).
// vec() of the whole cube under this layout matches the vectorization
// convention used by every dense oracle in the library.
class DataCube {
public:
    DataCube() = default;
    DataCube(int nx, int ny, int nt, double fill = 0.0)
        : nx_(nx), ny_(ny), nt_(nt) {
        if (nx < 1 || ny < 1 || nt < 1)
            throw ArgumentError("DataCube: all dimensions must be >= 1");
        data_.assign(static_cast<size_t>(nx) * ny * nt, fill);
    }
    DataCube(int nx, int ny, int nt, std::vector<double> data)
        : nx_(nx), ny_(ny), nt_(nt), data_(std::move(data)) {
        if (nx < 1 || ny < 1 || nt < 1)
            throw ArgumentError("DataCube: all dimensions must be >= 1");
        if (data_.size() != static_cast<size_t>(nx) * ny * nt)
            throw ArgumentError("DataCube: data length does not match dimensions");
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nt() const { return nt_; }
    size_t size() const { return data_.size(); }

    double operator()(int i, int j, int k) const {
        return data_[idx(i, j, k)];
    }
    double& operator()(int i, int j, int k) {
        return data_[idx(i, j, k)];
    }

    size_t idx(int i, int j, int k) const {
        return static_cast<size_t>(i) + static_cast<size_t>(nx_) * (static_cast<size_t>(j) + static_cast<size_t>(ny_) * k);
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    // Declared peak value; signal-role cubes live in [0, peak].
    double peak() const { return peak_; }
    void set_peak(double p) { peak_ = p; }

    bool same_shape(const DataCube& o) const {
        return nx_ == o.nx_ && ny_ == o.ny_ && nt_ == o.nt_;
    }

    // [0,1] range check for signal-role cubes (solver iterates are exempt).
    bool in_signal_range() const {
        for (double v : data_)
            if (v < 0.0 || v > peak_) return false;
        return true;
    }

private:
    int nx_ = 0, ny_ = 0, nt_ = 0;
    double peak_ = 1.0;
    std::vector<double> data_;
};

enum class MaskKind { Bernoulli, Gaussian, ShiftedBase };

// Per-frame modulation masks M_k; same layout as DataCube.
struct MaskStack {
    MaskKind kind = MaskKind::Bernoulli;
    uint64_t seed = 0;
    DataCube values;

    int nx() const { return values.nx(); }
    int ny() const { return values.ny(); }
    int nt() const { return values.nt(); }
    double operator()(int i, int j, int k) const { return values(i, j, k); }
};

enum class Mode { Cacti, Cassi };

// Coded 2D snapshot plus acquisition metadata.
struct Measurement {
    int rows = 0, cols = 0;
    std::vector<double> data;  // column-major, data[i + rows*j]
    double noise_sigma = 0.0;
    Mode mode = Mode::Cacti;
    // cassi only
    int n_lambda = 0;
    int dispersion_step = 0;
    int reference_channel = 0;

    double operator()(int i, int j) const { return data[static_cast<size_t>(i) + static_cast<size_t>(rows) * j]; }
    double& operator()(int i, int j) { return data[static_cast<size_t>(i) + static_cast<size_t>(rows) * j]; }
    size_t size() const { return data.size(); }
};

struct NoiseModel {
    double sigma = 0.0;
    uint64_t seed = 0;
};

}  // namespace sci
