#include "dssflow/box.hpp"

#include <cmath>

#include "dssflow/errors.hpp"
#include "dssflow/util.hpp"

namespace dssflow {

Box::Box(double L_, int N_, double df, double wf)
    : L(L_), N(N_), dealias_fraction(df), drift_window_fraction(wf) {
    if (L <= 0) throw ConfigError("box half-width must be positive");
    if (N < 8 || N % 2 != 0) throw ConfigError("box N must be even and >= 8");
    if (df <= 0 || df > 1) throw ConfigError("dealias_fraction must be in (0,1]");
    if (wf <= 0 || wf >= 1) throw ConfigError("drift_window_fraction must be in (0,1)");

    kd = int(std::floor(df * N / 2.0 + 1e-9));
    if (kd >= N / 2) kd = N / 2 - 1;  // always drop Nyquist

    kfull_.resize(N);
    for (int i = 0; i < N; ++i) kfull_[i] = kPi / L * mode(i);
    khalf_.resize(nhalf());
    for (int l = 0; l < nhalf(); ++l) khalf_[l] = kPi / L * l;

    radius_.resize(nphys());
    interior_.resize(nphys());
    for (int d = 0; d < 3; ++d) ytilde_[d].resize(nphys());
    const double rin = wf * L;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int l = 0; l < N; ++l) {
                double y0 = coord(i), y1 = coord(j), y2 = coord(l);
                double r = std::sqrt(y0 * y0 + y1 * y1 + y2 * y2);
                std::size_t idx = phys_index(i, j, l);
                radius_[idx] = r;
                interior_[idx] = (r <= rin) ? 1 : 0;
                double chi = 1.0 - smoothstep((r / L - wf) / (1.0 - wf));
                ytilde_[0][idx] = y0 * chi;
                ytilde_[1][idx] = y1 * chi;
                ytilde_[2][idx] = y2 * chi;
            }
}

std::shared_ptr<const Box> Box::make(double L, int N, double df, double wf) {
    return std::shared_ptr<const Box>(new Box(L, N, df, wf));
}

}  // namespace dssflow
