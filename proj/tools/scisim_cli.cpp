#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "sci/bench.hpp"
#include "sci/dict.hpp"
#include "sci/gmm.hpp"
#include "sci/io.hpp"
#include "sci/mask.hpp"
#include "sci/metrics.hpp"
#include "sci/operators.hpp"
#include "sci/rng.hpp"
#include "sci/solvers.hpp"
#include "sci/theory.hpp"
#include "sci/wnnm.hpp"

namespace fs = std::filesystem;
using namespace sci;

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

struct Common {
    std::string mode = "cacti";
    uint64_t seed = 0;
    double sigma = 0.0;
    std::string out = ".";

    Mode parsed_mode() const {
        if (mode == "cacti") return Mode::Cacti;
        if (mode == "cassi") return Mode::Cassi;
        throw ArgumentError("mode must be 'cacti' or 'cassi', got '" + mode + "'");
    }
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--mode", c.mode, "acquisition mode: cacti or cassi");
    sub->add_option("--seed", c.seed, "RNG seed");
    sub->add_option("--sigma", c.sigma, "measurement noise sigma");
    sub->add_option("--out", c.out, "output directory");
}

fs::path ensure_out(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

MaskKind parse_mask_kind(const std::string& s) {
    if (s == "bernoulli") return MaskKind::Bernoulli;
    if (s == "gaussian") return MaskKind::Gaussian;
    if (s == "shifted") return MaskKind::ShiftedBase;
    throw ArgumentError("mask kind must be bernoulli, gaussian or shifted, got '" + s + "'");
}

// guarantee psi > 0 for cacti bernoulli draws: open the first shutter wherever
// a pixel drew all zeros
void repair_dead_pixels(MaskStack& masks) {
    for (int j = 0; j < masks.ny(); ++j)
        for (int i = 0; i < masks.nx(); ++i) {
            double s = 0.0;
            for (int k = 0; k < masks.nt(); ++k) s += masks(i, j, k);
            if (s == 0.0) masks.values(i, j, 0) = 1.0;
        }
}

void require_file(const std::string& path, const std::string& what) {
    if (path.empty()) throw ArgumentError(what + " file is required");
    if (!fs::exists(path)) throw ArgumentError(what + " file not found: " + path);
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    Common common;
    std::string input;
    std::string scene = "moving-square";
    int nx = 64, ny = 64, nt = 8;
    std::string mask_kind = "bernoulli";
    double mask_param = 0.5;
    int dispersion_step = 1;
};

int cmd_simulate(const SimulateOpts& o) {
    const Mode mode = o.common.parsed_mode();
    const fs::path out = ensure_out(o.common.out);

    DataCube cube = o.input.empty()
                        ? make_scene(o.scene, o.nx, o.ny, o.nt, o.common.seed)
                        : read_scit(o.input);
    MaskStack masks = make_masks(parse_mask_kind(o.mask_kind), cube.nx(), cube.ny(), cube.nt(),
                                 o.mask_param, mix_seed(o.common.seed, 0x6d61736bULL));
    if (mode == Mode::Cacti && parse_mask_kind(o.mask_kind) == MaskKind::Bernoulli)
        repair_dead_pixels(masks);
    const SensingOperator op(masks, mode, mode == Mode::Cassi ? o.dispersion_step : 0, 0);

    NoiseModel noise;
    noise.sigma = o.common.sigma;
    noise.seed = mix_seed(o.common.seed, 0x6e6f697365ULL);
    const Measurement y = op.forward(cube, noise);

    std::ostringstream cfg;
    cfg << "cmd=simulate;mode=" << o.common.mode << ";seed=" << o.common.seed
        << ";sigma=" << o.common.sigma << ";input=" << o.input << ";scene=" << o.scene
        << ";nx=" << cube.nx() << ";ny=" << cube.ny() << ";nt=" << cube.nt()
        << ";mask=" << o.mask_kind << ";param=" << o.mask_param
        << ";step=" << (mode == Mode::Cassi ? o.dispersion_step : 0);
    const std::string digest = hex64(fnv1a(cfg.str()));

    write_scit_measurement(out / "measurement.scit", y);
    write_scit(out / "masks.scit", masks.values);
    if (o.input.empty()) write_scit(out / "truth.scit", cube);

    std::ostringstream meta;
    meta << "config " << digest << "\n"
         << "mode " << o.common.mode << "\n"
         << "sigma " << o.common.sigma << "\n"
         << "seed " << o.common.seed << "\n"
         << "dims " << cube.nx() << " " << cube.ny() << " " << cube.nt() << "\n"
         << "measurement " << y.rows << " " << y.cols << "\n";
    if (mode == Mode::Cassi) meta << "dispersion_step " << o.dispersion_step << "\n";
    atomic_write_text(out / "meta.txt", meta.str());
    std::cout << "wrote " << (out / "measurement.scit").string() << " (" << y.rows << "x" << y.cols
              << "), config " << digest << "\n";
    return 0;
}

// -------------------------------------------------------------- reconstruct

struct ReconstructOpts {
    Common common;
    std::string measurement;
    std::string masks;
    std::string reference;
    std::string solver = "gap-tv";
    std::string gmm_model;
    int dispersion_step = 1;
    int iters = 100;
    double rho = 1.0;
    double tv_weight = 0.07;
    int patch_size = 8;
    int patch_stride = 4;
    double lambda = 0.01;
    double q_sigma = 1e-3;
    bool png = false;
};

int cmd_reconstruct(const ReconstructOpts& o) {
    const Mode mode = o.common.parsed_mode();
    const fs::path out = ensure_out(o.common.out);
    require_file(o.measurement, "measurement");
    require_file(o.masks, "mask");

    const DataCube mask_cube = read_scit(o.masks);
    MaskStack masks;
    masks.values = mask_cube;
    const SensingOperator op(masks, mode, mode == Mode::Cassi ? o.dispersion_step : 0, 0);

    Measurement y = read_scit_measurement(o.measurement);
    y.mode = mode;
    if (mode == Mode::Cassi) {
        y.n_lambda = op.nt();
        y.dispersion_step = o.dispersion_step;
    }
    if (y.rows != op.meas_rows() || y.cols != op.meas_cols())
        throw ArgumentError("measurement dims " + std::to_string(y.rows) + "x" +
                            std::to_string(y.cols) + " do not match mask dims (expected " +
                            std::to_string(op.meas_rows()) + "x" + std::to_string(op.meas_cols()) +
                            ")");

    const bool known = o.solver == "lsq" || o.solver == "gap-tv" || o.solver == "admm-tv" ||
                       o.solver == "gmm" || o.solver == "sparse" || o.solver == "desci";
    if (!known)
        throw ArgumentError("unknown solver id '" + o.solver +
                            "' (known: lsq, gap-tv, admm-tv, gmm, sparse, desci)");
    if (mode == Mode::Cassi && (o.solver == "gmm" || o.solver == "desci" || o.solver == "sparse"))
        throw ArgumentError("unsupported combination: solver '" + o.solver +
                            "' works on cacti measurements only");

    std::optional<DataCube> reference;
    if (!o.reference.empty()) {
        require_file(o.reference, "reference");
        reference = read_scit(o.reference);
    }

    SolverConfig cfg;
    cfg.max_iters = o.iters;
    cfg.rho = o.rho;
    cfg.tv_weight = o.tv_weight;
    PatchConfig pcfg;
    pcfg.patch_size = o.patch_size;
    pcfg.stride = o.patch_stride;

    DataCube estimate;
    SolveTrace trace;
    if (o.solver == "lsq") {
        estimate = op.least_squares_init(y);
    } else if (o.solver == "gap-tv" || o.solver == "admm-tv") {
        const SolveResult res = o.solver == "gap-tv"
                                    ? gap_solve(op, y, cfg, reference ? &*reference : nullptr)
                                    : admm_solve(op, y, cfg, reference ? &*reference : nullptr);
        estimate = res.estimate;
        trace = res.trace;
    } else if (o.solver == "gmm") {
        require_file(o.gmm_model, "gmm model");
        const GmmModel model = read_gmm(o.gmm_model);
        estimate = gmm_reconstruct(y, op, model, o.q_sigma, pcfg);
    } else if (o.solver == "sparse") {
        const DictionaryModel dict =
            make_dct_dictionary(o.patch_size, op.nt(), o.lambda);
        estimate = sparse_reconstruct(y, op, dict, pcfg);
    } else {  // desci: warm start from a TV run, then anneal the group denoiser
        const DataCube warm = gap_solve(op, y, cfg).estimate;
        GroupMatchConfig gcfg;
        gcfg.patch_size = o.patch_size;
        gcfg.stride = o.patch_stride;
        SolverConfig dcfg = cfg;
        dcfg.max_iters = std::max(2, std::min(cfg.max_iters, 30));
        dcfg.tol = 0.0;
        for (int i = 0; i < dcfg.max_iters; ++i)
            gcfg.sigma_schedule.push_back(
                (12.0 / 255.0) *
                std::pow(2.0 / 12.0, static_cast<double>(i) / (dcfg.max_iters - 1)));
        const SolveResult res =
            desci_solve(op, y, gcfg, dcfg, reference ? &*reference : nullptr, &warm);
        estimate = res.estimate;
        trace = res.trace;
    }

    std::ostringstream cfgs;
    cfgs << "cmd=reconstruct;mode=" << o.common.mode << ";solver=" << o.solver
         << ";seed=" << o.common.seed << ";iters=" << o.iters << ";rho=" << o.rho
         << ";tv=" << o.tv_weight << ";patch=" << o.patch_size << ";stride=" << o.patch_stride
         << ";lambda=" << o.lambda << ";q=" << o.q_sigma
         << ";step=" << (mode == Mode::Cassi ? o.dispersion_step : 0);
    const std::string digest = hex64(fnv1a(cfgs.str()));

    write_scit(out / "reconstruction.scit", estimate);
    atomic_write_text(out / "trace.csv", "# config " + digest + "\n" + trace.to_csv());
    if (o.png)
        for (int k = 0; k < estimate.nt(); ++k)
            write_png_frame(out / ("frame_" + std::to_string(k) + ".png"), estimate, k);

    std::ostringstream meta;
    meta << "config " << digest << "\n"
         << "mode " << o.common.mode << "\n"
         << "solver " << o.solver << "\n"
         << "dims " << estimate.nx() << " " << estimate.ny() << " " << estimate.nt() << "\n";
    if (reference) {
        const double p = psnr(*reference, estimate);
        meta << "psnr_db " << p << "\n";
        if (estimate.nx() >= 11 && estimate.ny() >= 11)
            meta << "ssim " << ssim(*reference, estimate) << "\n";
        std::cout << "psnr_db " << p << "\n";
    }
    atomic_write_text(out / "meta.txt", meta.str());
    std::cout << "wrote " << (out / "reconstruction.scit").string() << ", config " << digest << "\n";
    return 0;
}

// -------------------------------------------------------------------- bench

struct BenchOpts {
    Common common;
    std::vector<std::string> scenes = {"moving-square"};
    std::vector<std::string> solvers;
    int nx = 64, ny = 64, nt = 8;
};

int cmd_bench(const BenchOpts& o) {
    const fs::path out = ensure_out(o.common.out);
    const auto all = default_bench_solvers();
    std::vector<SolverSpec> chosen;
    if (o.solvers.empty())
        chosen = all;
    else
        for (const auto& id : o.solvers) chosen.push_back(find_solver(all, id));

    std::vector<SceneSpec> specs;
    for (const auto& s : o.scenes) specs.push_back({s, o.nx, o.ny, o.nt, o.common.seed});

    std::ostringstream cfg;
    cfg << "cmd=bench;seed=" << o.common.seed << ";nx=" << o.nx << ";ny=" << o.ny
        << ";nt=" << o.nt << ";scenes=";
    for (const auto& s : o.scenes) cfg << s << "+";
    cfg << ";solvers=";
    for (const auto& s : chosen) cfg << s.id << "+";
    const std::string digest = hex64(fnv1a(cfg.str()));

    const BenchReport report =
        run_benchmark(specs, chosen, mix_seed(o.common.seed, 0x62656e6368ULL), digest);
    atomic_write_text(out / "bench.csv", "# config " + digest + "\n" + report.to_csv());
    std::cout << report.to_table();
    std::cout << "wrote " << (out / "bench.csv").string() << ", config " << digest << "\n";
    return 0;
}

// ------------------------------------------------------------------- theory

struct TheoryOpts {
    Common common;
    int nx = 8, ny = 8, nt = 2;
    int levels = 2;
    int trials = 500;
    double epsilon = 1.0;
    bool no_perturb = false;
};

int cmd_theory(const TheoryOpts& o) {
    const fs::path out = ensure_out(o.common.out);
    const TheoremCheckReport rep = theorem_check(o.nx, o.ny, o.nt, o.levels, o.trials, o.epsilon,
                                                 o.common.seed, !o.no_perturb);
    std::ostringstream cfg;
    cfg << "cmd=theory;seed=" << o.common.seed << ";nx=" << o.nx << ";ny=" << o.ny
        << ";nt=" << o.nt << ";levels=" << o.levels << ";trials=" << o.trials
        << ";epsilon=" << o.epsilon << ";perturb=" << (o.no_perturb ? 0 : 1);
    const std::string digest = hex64(fnv1a(cfg.str()));
    atomic_write_text(out / "theory.csv", "# config " + digest + "\n" + rep.to_csv());
    atomic_write_text(out / "theory.txt", "config " + digest + "\n" + rep.to_text());
    std::cout << rep.to_text();
    return rep.pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"snapshot compressive imaging simulation and reconstruction"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "key=value config file with a [subcommand] section; flags override");

    SimulateOpts sim;
    auto* s1 = app.add_subcommand("simulate", "code a data-cube into a 2D snapshot");
    add_common(s1, sim.common);
    s1->add_option("--input", sim.input, "input cube (.scit); omit to generate a scene");
    s1->add_option("--scene", sim.scene, "generated scene kind");
    s1->add_option("--nx", sim.nx, "generated scene rows");
    s1->add_option("--ny", sim.ny, "generated scene cols");
    s1->add_option("--nt", sim.nt, "generated scene frames");
    s1->add_option("--mask-kind", sim.mask_kind, "bernoulli, gaussian or shifted");
    s1->add_option("--mask-param", sim.mask_param, "bernoulli p / gaussian sigma / shift step");
    s1->add_option("--dispersion-step", sim.dispersion_step, "cassi shear step (pixels/channel)");

    ReconstructOpts rec;
    auto* s2 = app.add_subcommand("reconstruct", "invert a coded snapshot back to a cube");
    add_common(s2, rec.common);
    s2->add_option("--measurement", rec.measurement, "measurement file (.scit)")->required();
    s2->add_option("--masks", rec.masks, "mask stack file (.scit)")->required();
    s2->add_option("--reference", rec.reference, "ground-truth cube for metrics");
    s2->add_option("--solver", rec.solver, "lsq, gap-tv, admm-tv, gmm, sparse or desci");
    s2->add_option("--gmm-model", rec.gmm_model, "trained mixture file (gmm solver)");
    s2->add_option("--dispersion-step", rec.dispersion_step, "cassi shear step");
    s2->add_option("--iters", rec.iters, "iteration budget");
    s2->add_option("--rho", rec.rho, "ADMM penalty");
    s2->add_option("--tv-weight", rec.tv_weight, "TV smoothing weight");
    s2->add_option("--patch-size", rec.patch_size, "patch edge length");
    s2->add_option("--patch-stride", rec.patch_stride, "patch grid stride");
    s2->add_option("--lambda", rec.lambda, "sparse coding penalty");
    s2->add_option("--q-sigma", rec.q_sigma, "gmm observation noise level");
    s2->add_flag("--png", rec.png, "also export 8-bit PNG frames");

    BenchOpts ben;
    auto* s3 = app.add_subcommand("bench", "run the seeded solver benchmark");
    add_common(s3, ben.common);
    s3->add_option("--scenes", ben.scenes, "scene kinds")->delimiter(',');
    s3->add_option("--solvers", ben.solvers, "solver ids (default: all)")->delimiter(',');
    s3->add_option("--nx", ben.nx, "scene rows");
    s3->add_option("--ny", ben.ny, "scene cols");
    s3->add_option("--nt", ben.nt, "scene frames");

    TheoryOpts th;
    auto* s4 = app.add_subcommand("theory", "Monte Carlo check of the recovery bound");
    add_common(s4, th.common);
    s4->add_option("--nx", th.nx, "signal rows");
    s4->add_option("--ny", th.ny, "signal cols");
    s4->add_option("--nt", th.nt, "signal frames");
    s4->add_option("--levels", th.levels, "quantizer levels per sample");
    s4->add_option("--trials", th.trials, "Monte Carlo trials");
    s4->add_option("--epsilon", th.epsilon, "bound slack parameter");
    s4->add_flag("--no-perturb", th.no_perturb, "draw signals exactly on the codebook");

    try {
        app.parse(argc, argv);
        if (s1->parsed()) return cmd_simulate(sim);
        if (s2->parsed()) return cmd_reconstruct(rec);
        if (s3->parsed()) return cmd_bench(ben);
        return cmd_theory(th);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
