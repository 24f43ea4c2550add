#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sci/bench.hpp"
#include "sci/io.hpp"
#include "sci/mask.hpp"
#include "sci/metrics.hpp"
#include "sci/operators.hpp"
#include "sci/rng.hpp"
#include "sci/solvers.hpp"
#include "sci/theory.hpp"
#include "sci/wnnm.hpp"

namespace py = pybind11;
using namespace sci;

namespace {

using FArray = py::array_t<double, py::array::f_style | py::array::forcecast>;

DataCube cube_from_array(const FArray& a) {
    if (a.ndim() != 3) throw ArgumentError("expected a 3D array (nx, ny, nt)");
    const int nx = static_cast<int>(a.shape(0)), ny = static_cast<int>(a.shape(1)),
              nt = static_cast<int>(a.shape(2));
    std::vector<double> data(a.data(), a.data() + a.size());
    return DataCube(nx, ny, nt, std::move(data));
}

py::array array_from_cube(const DataCube& c) {
    FArray a({c.nx(), c.ny(), c.nt()});
    std::copy(c.data().begin(), c.data().end(), a.mutable_data());
    return a;
}

Measurement meas_from_array(const FArray& a, Mode mode, int nt, int step) {
    if (a.ndim() != 2) throw ArgumentError("expected a 2D measurement array");
    Measurement y;
    y.rows = static_cast<int>(a.shape(0));
    y.cols = static_cast<int>(a.shape(1));
    y.data.assign(a.data(), a.data() + a.size());
    y.mode = mode;
    if (mode == Mode::Cassi) {
        y.n_lambda = nt;
        y.dispersion_step = step;
    }
    return y;
}

py::array array_from_meas(const Measurement& y) {
    FArray a({y.rows, y.cols});
    std::copy(y.data.begin(), y.data.end(), a.mutable_data());
    return a;
}

Mode parse_mode(const std::string& s) {
    if (s == "cacti") return Mode::Cacti;
    if (s == "cassi") return Mode::Cassi;
    throw ArgumentError("mode must be 'cacti' or 'cassi'");
}

MaskKind parse_kind(const std::string& s) {
    if (s == "bernoulli") return MaskKind::Bernoulli;
    if (s == "gaussian") return MaskKind::Gaussian;
    if (s == "shifted") return MaskKind::ShiftedBase;
    throw ArgumentError("mask kind must be bernoulli, gaussian or shifted");
}

SensingOperator make_op(const FArray& masks, const std::string& mode, int step) {
    MaskStack m;
    m.values = cube_from_array(masks);
    const Mode md = parse_mode(mode);
    return SensingOperator(std::move(m), md, md == Mode::Cassi ? step : 0, 0);
}

}  // namespace

PYBIND11_MODULE(_scisim, m) {
    m.doc() = "snapshot compressive imaging: forward models, solvers, metrics";

    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);

    m.def(
        "make_masks",
        [](const std::string& kind, int nx, int ny, int nt, double param, uint64_t seed) {
            return array_from_cube(make_masks(parse_kind(kind), nx, ny, nt, param, seed).values);
        },
        py::arg("kind"), py::arg("nx"), py::arg("ny"), py::arg("nt"), py::arg("param") = 0.5,
        py::arg("seed") = 0, "Draw a seeded mask stack as an (nx, ny, nt) array.");

    m.def(
        "make_scene",
        [](const std::string& kind, int nx, int ny, int nt, uint64_t seed) {
            return array_from_cube(make_scene(kind, nx, ny, nt, seed));
        },
        py::arg("kind"), py::arg("nx"), py::arg("ny"), py::arg("nt"), py::arg("seed") = 0,
        "Generate a synthetic test scene (moving-square, moving-blob, smooth-field).");

    m.def(
        "forward",
        [](const FArray& cube, const FArray& masks, const std::string& mode, int dispersion_step,
           double sigma, uint64_t seed) {
            const SensingOperator op = make_op(masks, mode, dispersion_step);
            NoiseModel noise;
            noise.sigma = sigma;
            noise.seed = seed;
            return array_from_meas(op.forward(cube_from_array(cube), noise));
        },
        py::arg("cube"), py::arg("masks"), py::arg("mode") = "cacti",
        py::arg("dispersion_step") = 1, py::arg("sigma") = 0.0, py::arg("seed") = 0,
        "Code a cube into a single 2D snapshot.");

    m.def(
        "adjoint",
        [](const FArray& y, const FArray& masks, const std::string& mode, int dispersion_step) {
            const SensingOperator op = make_op(masks, mode, dispersion_step);
            return array_from_cube(
                op.adjoint(meas_from_array(y, parse_mode(mode), op.nt(), dispersion_step)));
        },
        py::arg("y"), py::arg("masks"), py::arg("mode") = "cacti", py::arg("dispersion_step") = 1,
        "Apply the transpose of the sensing operator.");

    m.def(
        "least_squares_init",
        [](const FArray& y, const FArray& masks, const std::string& mode, int dispersion_step) {
            const SensingOperator op = make_op(masks, mode, dispersion_step);
            return array_from_cube(op.least_squares_init(
                meas_from_array(y, parse_mode(mode), op.nt(), dispersion_step)));
        },
        py::arg("y"), py::arg("masks"), py::arg("mode") = "cacti", py::arg("dispersion_step") = 1,
        "Minimum-norm consistent estimate via the diagonal Gram inverse.");

    m.def(
        "reconstruct",
        [](const FArray& y, const FArray& masks, const std::string& solver, int iters, double rho,
           double tv_weight, const std::string& mode, int dispersion_step) {
            const SensingOperator op = make_op(masks, mode, dispersion_step);
            const Measurement meas =
                meas_from_array(y, parse_mode(mode), op.nt(), dispersion_step);
            SolverConfig cfg;
            cfg.max_iters = iters;
            cfg.rho = rho;
            cfg.tv_weight = tv_weight;
            if (solver == "lsq") return array_from_cube(op.least_squares_init(meas));
            if (solver == "gap-tv") return array_from_cube(gap_solve(op, meas, cfg).estimate);
            if (solver == "admm-tv") return array_from_cube(admm_solve(op, meas, cfg).estimate);
            if (solver == "desci") {
                GroupMatchConfig gcfg;
                return array_from_cube(desci_solve(op, meas, gcfg, cfg).estimate);
            }
            throw ArgumentError("unknown solver id '" + solver +
                                "' (known: lsq, gap-tv, admm-tv, desci)");
        },
        py::arg("y"), py::arg("masks"), py::arg("solver") = "gap-tv", py::arg("iters") = 100,
        py::arg("rho") = 1.0, py::arg("tv_weight") = 0.07, py::arg("mode") = "cacti",
        py::arg("dispersion_step") = 1, "Invert a snapshot back to a cube.");

    m.def(
        "tv_denoise",
        [](const FArray& cube, double weight, int iters) {
            return array_from_cube(tv_denoise(cube_from_array(cube), weight, iters));
        },
        py::arg("cube"), py::arg("weight"), py::arg("iters") = 10,
        "Frame-wise anisotropic TV proximal operator.");

    m.def(
        "psnr",
        [](const FArray& a, const FArray& b, double peak) {
            return psnr(cube_from_array(a), cube_from_array(b), peak);
        },
        py::arg("reference"), py::arg("estimate"), py::arg("peak") = 1.0);

    m.def(
        "ssim",
        [](const FArray& a, const FArray& b) {
            return ssim(cube_from_array(a), cube_from_array(b));
        },
        py::arg("reference"), py::arg("estimate"));

    m.def(
        "theorem_check",
        [](int nx, int ny, int nt, int levels, int trials, double epsilon, uint64_t seed,
           bool perturb) {
            const TheoremCheckReport r =
                theorem_check(nx, ny, nt, levels, trials, epsilon, seed, perturb);
            py::dict d;
            d["trials"] = r.trials;
            d["epsilon"] = r.epsilon;
            d["rate"] = r.rate;
            d["distortion"] = r.distortion;
            d["success_frequency"] = r.success_frequency;
            d["violation_frequency"] = r.violation_frequency;
            d["theoretical_floor"] = r.theoretical_floor;
            d["vacuous"] = r.vacuous;
            d["pass"] = r.pass;
            return d;
        },
        py::arg("nx") = 8, py::arg("ny") = 8, py::arg("nt") = 2, py::arg("levels") = 2,
        py::arg("trials") = 500, py::arg("epsilon") = 1.0, py::arg("seed") = 0,
        py::arg("perturb") = true, "Monte Carlo check of the coded-snapshot recovery bound.");

    m.def(
        "write_scit",
        [](const std::string& path, const FArray& cube) { write_scit(path, cube_from_array(cube)); },
        py::arg("path"), py::arg("cube"));
    m.def(
        "read_scit",
        [](const std::string& path) { return array_from_cube(read_scit(path)); }, py::arg("path"));
}
