#include "sci/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sci/mask.hpp"
#include "sci/rng.hpp"

namespace sci {

namespace {

constexpr double kEnumGuard = 1048576.0;  // 2^20

double pow_count(int levels, size_t n) {
    return std::pow(static_cast<double>(levels), static_cast<double>(n));
}

}  // namespace

Codebook build_uniform_codebook(int nx, int ny, int nt, int levels, double amplitude) {
    if (nx < 1 || ny < 1 || nt < 1)
        throw ArgumentError("build_uniform_codebook: dimensions must be >= 1");
    if (levels < 2) throw ArgumentError("build_uniform_codebook: levels must be >= 2");
    if (!(amplitude > 0.0)) throw ArgumentError("build_uniform_codebook: amplitude must be > 0");

    Codebook cb;
    cb.nx = nx;
    cb.ny = ny;
    cb.nt = nt;
    cb.levels = levels;
    cb.amplitude = amplitude;
    cb.rate = std::log2(static_cast<double>(levels));

    const size_t n = cb.dim();
    const double count = pow_count(levels, n);
    if (count <= kEnumGuard) {
        const size_t total = static_cast<size_t>(count);
        cb.codewords.reserve(total);
        for (size_t c = 0; c < total; ++c) {
            std::vector<double> w(n);
            size_t rem = c;
            for (size_t s = 0; s < n; ++s) {
                w[s] = cb.level_value(static_cast<int>(rem % levels));
                rem /= levels;
            }
            cb.codewords.push_back(std::move(w));
        }
    }
    return cb;
}

Codebook explicit_codebook(int nx, int ny, int nt, std::vector<std::vector<double>> codewords,
                           double rate, double amplitude) {
    if (codewords.empty()) throw ArgumentError("explicit_codebook: codebook must be non-empty");
    Codebook cb;
    cb.nx = nx;
    cb.ny = ny;
    cb.nt = nt;
    cb.rate = rate;
    cb.amplitude = amplitude;
    const size_t n = cb.dim();
    for (const auto& w : codewords)
        if (w.size() != n) throw ArgumentError("explicit_codebook: codeword length mismatch");
    cb.codewords = std::move(codewords);
    return cb;
}

std::pair<std::vector<double>, size_t> nearest_codeword(const std::vector<double>& x,
                                                        const Codebook& codebook) {
    if (x.size() != codebook.dim())
        throw ArgumentError("nearest_codeword: vector length mismatch");
    if (codebook.is_uniform()) {
        // per-sample quantization; ties to the lower level, which matches the
        // lowest mixed-radix index
        const int levels = *codebook.levels;
        const double cell = codebook.amplitude / levels;
        std::vector<double> w(x.size());
        size_t index = 0;
        double radix = 1.0;
        for (size_t s = 0; s < x.size(); ++s) {
            int lv = static_cast<int>(std::floor((x[s] + codebook.amplitude / 2.0) / cell));
            lv = std::clamp(lv, 0, levels - 1);
            // exact cell boundary: lower level is nearer-index tie winner
            if (lv > 0 && std::abs(x[s] - codebook.level_value(lv - 1)) <= std::abs(x[s] - codebook.level_value(lv)))
                lv -= 1;
            w[s] = codebook.level_value(lv);
            index += static_cast<size_t>(lv * radix);
            radix *= levels;
        }
        return {std::move(w), index};
    }
    if (codebook.codewords.empty())
        throw ArgumentError("nearest_codeword: empty codebook");
    size_t best = 0;
    double best_d = std::numeric_limits<double>::max();
    for (size_t c = 0; c < codebook.codewords.size(); ++c) {
        double d = 0.0;
        for (size_t s = 0; s < x.size(); ++s) {
            const double t = x[s] - codebook.codewords[c][s];
            d += t * t;
        }
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return {codebook.codewords[best], best};
}

double distortion_rate(const Codebook& codebook, const std::vector<std::vector<double>>& samples) {
    double delta = 0.0;
    for (const auto& s : samples) {
        const auto [w, idx] = nearest_codeword(s, codebook);
        double d = 0.0;
        for (size_t i = 0; i < s.size(); ++i) {
            const double t = s[i] - w[i];
            d += t * t;
        }
        delta = std::max(delta, d / static_cast<double>(s.size()));
    }
    return delta;
}

CspResult csp_solve(const Measurement& y, const SensingOperator& op, const Codebook& codebook) {
    if (codebook.nx != op.nx() || codebook.ny != op.ny() || codebook.nt != op.nt())
        throw ArgumentError("csp_solve: codebook dimensions do not match operator");
    if (y.rows != op.meas_rows() || y.cols != op.meas_cols())
        throw ArgumentError("csp_solve: measurement dimensions do not match operator");

    if (codebook.is_uniform() && op.mode() == Mode::Cacti) {
        // the objective separates across measurement pixels: pixel (i,j)
        // involves only the nt samples (i,j,*), so search levels^nt locally
        const int levels = *codebook.levels;
        const int nx = op.nx(), ny = op.ny(), nt = op.nt();
        const double combos_d = pow_count(levels, static_cast<size_t>(nt));
        if (combos_d > kEnumGuard)
            throw CapacityError("csp_solve: levels^nt exceeds the per-pixel enumeration guard");
        const size_t combos = static_cast<size_t>(combos_d);

        CspResult res;
        res.codeword.assign(op.cube_size(), 0.0);
        std::vector<double> vals(levels);
        for (int l = 0; l < levels; ++l) vals[l] = codebook.level_value(l);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double yij = y(i, j);
                double best = std::numeric_limits<double>::max();
                size_t best_c = 0;
                for (size_t c = 0; c < combos; ++c) {
                    double acc = 0.0;
                    size_t rem = c;
                    for (int k = 0; k < nt; ++k) {
                        acc += op.masks()(i, j, k) * vals[rem % levels];
                        rem /= levels;
                    }
                    const double d = (yij - acc) * (yij - acc);
                    if (d < best) {
                        best = d;
                        best_c = c;
                    }
                }
                size_t rem = best_c;
                for (int k = 0; k < nt; ++k) {
                    res.codeword[static_cast<size_t>(i) + static_cast<size_t>(nx) * (j + static_cast<size_t>(ny) * k)] =
                        vals[rem % levels];
                    rem /= levels;
                }
                res.objective += best;
            }
        return res;
    }

    if (codebook.codewords.empty())
        throw CapacityError("csp_solve: codebook too large for exhaustive search and not separable");
    CspResult res;
    double best = std::numeric_limits<double>::max();
    std::vector<double> phic;
    for (const auto& c : codebook.codewords) {
        op.forward_vec(c, phic);
        double d = 0.0;
        for (size_t i = 0; i < phic.size(); ++i) {
            const double t = y.data[i] - phic[i];
            d += t * t;
        }
        if (d < best) {
            best = d;
            res.codeword = c;
        }
    }
    res.objective = best;
    return res;
}

std::string TheoremCheckReport::to_text() const {
    std::ostringstream os;
    os << "CSP recovery check\n"
       << "  trials:             " << trials << "\n"
       << "  epsilon:            " << epsilon << "\n"
       << "  rate (bits/sample): " << rate << "\n"
       << "  distortion delta:   " << distortion << "\n"
       << "  success frequency:  " << success_frequency << "\n"
       << "  violation freq.:    " << violation_frequency << "\n"
       << "  theoretical floor:  " << theoretical_floor << (vacuous ? "  (vacuous)" : "") << "\n"
       << "  verdict:            " << (pass ? "pass" : "fail") << "\n";
    return os.str();
}

std::string TheoremCheckReport::to_csv() const {
    std::ostringstream os;
    os << "trials,epsilon,eta,rate,distortion,success_frequency,violation_frequency,"
          "theoretical_floor,vacuous,pass\n";
    os << trials << ',' << epsilon << ',' << eta << ',' << rate << ',' << distortion << ','
       << success_frequency << ',' << violation_frequency << ',' << theoretical_floor << ','
       << (vacuous ? 1 : 0) << ',' << (pass ? 1 : 0) << '\n';
    return os.str();
}

TheoremCheckReport theorem_check(int nx, int ny, int nt, int levels, int trials, double epsilon,
                                 uint64_t seed, bool perturb, double amplitude) {
    if (!(epsilon > 0.0 && epsilon <= 16.0 / 3.0))
        throw ArgumentError("theorem_check: epsilon must be in (0, 16/3]");
    if (trials < 1) throw ArgumentError("theorem_check: trials must be >= 1");
    const Codebook cb = build_uniform_codebook(nx, ny, nt, levels, amplitude);
    const size_t n = cb.dim();
    const double cell = amplitude / levels;
    const double rho = amplitude;

    TheoremCheckReport rep;
    rep.trials = trials;
    rep.epsilon = epsilon;
    rep.rate = cb.rate;
    rep.distortion = perturb ? (cell / 2.0) * (cell / 2.0) : 0.0;

    const double bound = nt * (rep.distortion + rho * rho * epsilon);
    int successes = 0;
    for (int t = 0; t < trials; ++t) {
        auto rng = make_rng(seed, static_cast<uint64_t>(t));
        // signal = random codeword (+ in-cell perturbation)
        std::uniform_int_distribution<int> lv(0, levels - 1);
        std::uniform_real_distribution<double> pert(-cell / 2.0, cell / 2.0);
        std::vector<double> x(n);
        for (size_t s = 0; s < n; ++s) {
            x[s] = cb.level_value(lv(rng));
            if (perturb) x[s] += pert(rng);
        }
        const MaskStack masks = make_masks(MaskKind::Gaussian, nx, ny, nt, 0.0,
                                           mix_seed(seed, 0x6d61736bULL + t));
        const SensingOperator op(masks, Mode::Cacti);
        DataCube cube(nx, ny, nt, x);
        const Measurement y = op.forward(cube);
        const CspResult sol = csp_solve(y, op, cb);
        double err = 0.0;
        for (size_t s = 0; s < n; ++s) {
            const double d = x[s] - sol.codeword[s];
            err += d * d;
        }
        err /= static_cast<double>(nx) * ny;
        if (err <= bound) ++successes;
    }
    rep.success_frequency = static_cast<double>(successes) / trials;
    rep.violation_frequency = 1.0 - rep.success_frequency;

    // 1 - 2^{n r + 1} exp(-NxNy (3 eps / 32)^2), evaluated in the log domain
    const double log_tail = (static_cast<double>(n) * cb.rate + 1.0) * std::log(2.0) -
                            static_cast<double>(nx) * ny * std::pow(3.0 * epsilon / 32.0, 2.0);
    rep.theoretical_floor = log_tail > 700.0 ? -std::numeric_limits<double>::infinity()
                                             : 1.0 - std::exp(log_tail);
    rep.vacuous = !(rep.theoretical_floor > 0.0);
    if (rep.vacuous) {
        rep.pass = true;
    } else {
        const double p = rep.theoretical_floor;
        const double margin = 3.0 * std::sqrt(p * (1.0 - p) / trials);
        rep.pass = rep.success_frequency >= p - margin;
    }
    return rep;
}

}  // namespace sci
