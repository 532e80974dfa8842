// magnon.hpp
// Closed-form small-epsilon predictions for the polarized initial state.
// They are perturbative; tests compare them against the exact engine.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace dtc::magnon {

// Two-pulse return probability, lowest order in epsilon:
// |1 - L eps^2 (1 + e^{-i JT})|^2.
inline double predicted_p2t(int L, double jt, double epsilon) {
    const std::complex<double> a = 1.0 - L * epsilon * epsilon * (1.0 + std::polar(1.0, -jt));
    return std::norm(a);
}

// Same quantity before expanding the trigonometric factors; keeps the
// zero- and one-magnon paths only:
// |cos(eps)^{2L} - L e^{-i JT} cos(eps)^{2L-2} sin(eps)^2|^2.
inline double predicted_p2t_unexpanded(int L, double jt, double epsilon) {
    const double c = std::cos(epsilon);
    const double s = std::sin(epsilon);
    const std::complex<double> a =
        std::pow(c, 2 * L) - static_cast<double>(L) * std::polar(1.0, -jt) * std::pow(c, 2 * L - 2) * s * s;
    return std::norm(a);
}

// One-magnon amplitude after 2n kicks, one phase e^{-i j JT} per kick.
inline std::complex<double> c1_amplitude(std::int64_t n, double jt, double epsilon) {
    std::complex<double> sum = 0.0;
    for (std::int64_t j = 1; j <= 2 * n; ++j) sum += std::polar(1.0, -static_cast<double>(j) * jt);
    return epsilon * sum;
}

// eps |sin(n JT) / sin(JT/2)|, with the limit 2 n eps where sin(JT/2) = 0.
inline double c1_magnitude(std::int64_t n, double jt, double epsilon) {
    const double den = std::sin(jt / 2);
    if (std::abs(den) < 1e-12) return 2.0 * static_cast<double>(n) * std::abs(epsilon);
    return std::abs(epsilon) * std::abs(std::sin(static_cast<double>(n) * jt) / den);
}

struct MagnonPrediction {
    std::int64_t n = 0;
    double c1_magnitude = 0.0;
    double predicted_P = 1.0;
    bool out_of_validity = false;  // raw formula went negative and was clamped to 0
};

// P(2nT) = 1 - L eps^2 (sin(n JT) / sin(JT/2))^2.
inline MagnonPrediction predicted_return(std::int64_t n, int L, double jt, double epsilon) {
    MagnonPrediction p;
    p.n = n;
    p.c1_magnitude = c1_magnitude(n, jt, epsilon);
    const double raw = 1.0 - L * p.c1_magnitude * p.c1_magnitude;
    p.out_of_validity = raw < 0.0;
    p.predicted_P = p.out_of_validity ? 0.0 : raw;
    return p;
}

}  // namespace dtc::magnon
