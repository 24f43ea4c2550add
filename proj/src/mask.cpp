#include "sci/mask.hpp"

#include "sci/rng.hpp"

namespace sci {

MaskStack make_masks(MaskKind kind, int nx, int ny, int nt, double param, uint64_t seed) {
    if (nx < 1 || ny < 1 || nt < 1)
        throw ArgumentError("make_masks: all dimensions must be >= 1");

    MaskStack m;
    m.kind = kind;
    m.seed = seed;
    m.values = DataCube(nx, ny, nt);
    auto rng = make_rng(seed);

    switch (kind) {
        case MaskKind::Bernoulli: {
            if (!(param > 0.0 && param < 1.0))
                throw ArgumentError("make_masks: bernoulli p must be in (0,1)");
            std::bernoulli_distribution bern(param);
            for (double& v : m.values.data()) v = bern(rng) ? 1.0 : 0.0;
            break;
        }
        case MaskKind::Gaussian: {
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (double& v : m.values.data()) v = gauss(rng);
            break;
        }
        case MaskKind::ShiftedBase: {
            int s = static_cast<int>(param);
            if (s < 1 || static_cast<double>(s) != param)
                throw ArgumentError("make_masks: shifted-base step must be an integer >= 1");
            std::bernoulli_distribution bern(0.5);
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i)
                    m.values(i, j, 0) = bern(rng) ? 1.0 : 0.0;
            // frame k = base shifted down k*s rows, cyclic
            for (int k = 1; k < nt; ++k)
                for (int j = 0; j < ny; ++j)
                    for (int i = 0; i < nx; ++i)
                        m.values(i, j, k) = m.values(((i - k * s) % nx + nx) % nx, j, 0);
            break;
        }
    }
    return m;
}

}  // namespace sci
