// Stroboscopic return probability of the polarized chain for a few values
// of JT, next to the one-magnon prediction.

#include "dtc/dtc.hpp"

#include <cstdio>

int main() {
    const int L = 8;
    const double eps_over_pi = 0.02;
    for (double jt_over_pi : {0.5, 0.8, 1.0}) {
        const auto params = dtc::FloquetParams::from_dimensionless(L, jt_over_pi, eps_over_pi);
        const auto series = dtc::evolve_stroboscopic(dtc::polarized_state(L, dtc::Direction::up), params, 40);
        const auto p2n = dtc::even_period_returns(series);
        std::printf("JT/pi = %.2f\n   n   P(2nT)    one-magnon\n", jt_over_pi);
        for (std::size_t n = 1; n <= p2n.size(); n += 4) {
            const auto pred = dtc::magnon::predicted_return(static_cast<std::int64_t>(n), L, params.jt(),
                                                            params.epsilon);
            std::printf("%4zu   %.6f  %.6f%s\n", n, p2n[n - 1], pred.predicted_P,
                        pred.out_of_validity ? " (clamped)" : "");
        }
    }
}
