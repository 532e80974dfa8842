// Quasi-energy spectrum at JT = pi: exact 0 / pi states, the reflection
// symmetry residual, and a paired superposition that revives every two
// periods.

#include "dtc/dtc.hpp"

#include <cstdio>

int main() {
    const auto params = dtc::FloquetParams::from_dimensionless(6, 1.0, 0.1);
    const auto spec = dtc::floquet_spectrum(params, true);
    const auto pairs = dtc::count_exact_pi_pairs(spec);
    const auto gaps = dtc::gap_statistics(spec);
    std::printf("L = %d: %d states at 0, %d at pi, reflection residual %.2e\n", params.L, pairs.n_zero,
                pairs.n_pi, dtc::check_time_reflection(params));
    std::printf("Delta0 = %.6f  Delta_pi = %.3e  ratio = %.3e\n", gaps.delta0_mean, gaps.delta_pi_mean, gaps.ratio);

    std::size_t zero = 0, piv = 0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        if (dtc::near_zero_energy(spec.energies[k], 1e-10)) zero = k;
        if (dtc::near_pi_energy(spec.energies[k], spec.T, 1e-10)) piv = k;
    }
    const auto psi0 = dtc::paired_superposition(spec, zero, piv, +1);
    const auto series = dtc::evolve_stroboscopic(psi0, params, 8);
    for (const auto& s : series.samples) std::printf("n = %lld  P = %.12f\n", static_cast<long long>(s.n), s.P);
}
