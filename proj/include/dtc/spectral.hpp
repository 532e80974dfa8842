// spectral.hpp
// Quasi-energy spectra of U(T), pi-pairing statistics, the time-reflection
// operator R = prod sx * prod sz, and states built from exactly paired
// eigenvectors.

#pragma once

#include "dtc/core_state.hpp"
#include "dtc/floquet.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace dtc {

struct QuasiEnergySpectrum {
    int L = 0;
    double T = 1.0;
    std::vector<double> energies;             // sorted, in (-pi/T, pi/T]
    std::optional<Eigen::MatrixXcd> vectors;  // column k belongs to energies[k]

    std::size_t size() const { return energies.size(); }
};

/// Diagonalizes a unitary through its complex Schur form U = Z S Z^dagger.
/// For a normal matrix S is diagonal, so the columns of Z are an orthonormal
/// eigenbasis, including inside degenerate manifolds. Eigenvalues lambda
/// map to quasi-energies -arg(lambda)/T; values within edge_tol of -pi/T are
/// identified with +pi/T.
inline QuasiEnergySpectrum quasi_energies(const DensePropagator& u, double T, bool keep_vectors,
                                          double unitarity_tol = 1e-10, double edge_tol = 1e-10) {
    if (!(T > 0.0)) throw ConfigError("T must be positive");
    const auto dim = u.matrix.rows();
    if (dim != u.matrix.cols() || dim == 0) throw DimensionError("propagator must be square");
    const double residual = unitarity_residual(u.matrix);
    if (!(residual <= unitarity_tol)) {
        throw ConfigError("propagator is not unitary (residual " + std::to_string(residual) + ")");
    }

    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u.matrix, keep_vectors);
    if (schur.info() != Eigen::Success) throw std::runtime_error("Schur decomposition failed");
    const Eigen::MatrixXcd& s = schur.matrixT();

    const double top = pi / T;
    std::vector<double> raw(static_cast<std::size_t>(dim));
    for (Eigen::Index k = 0; k < dim; ++k) {
        double e = -std::arg(s(k, k)) / T;
        if (e <= -top + edge_tol) e = std::min(e + 2 * top, top);
        if (e > top) e = top;
        raw[static_cast<std::size_t>(k)] = e;
    }

    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });

    QuasiEnergySpectrum spec;
    spec.L = u.L;
    spec.T = T;
    spec.energies.resize(raw.size());
    for (std::size_t k = 0; k < order.size(); ++k) spec.energies[k] = raw[order[k]];
    if (keep_vectors) {
        const Eigen::MatrixXcd& z = schur.matrixU();
        Eigen::MatrixXcd v(dim, dim);
        for (std::size_t k = 0; k < order.size(); ++k) {
            v.col(static_cast<Eigen::Index>(k)) = z.col(static_cast<Eigen::Index>(order[k]));
        }
        spec.vectors = std::move(v);
    }
    return spec;
}

// Spectrum of the reference-phase-free propagator at a parameter point.
inline QuasiEnergySpectrum floquet_spectrum(const FloquetParams& params, bool keep_vectors) {
    return quasi_energies(reference_propagator(params), params.T, keep_vectors);
}

struct GapStatistics {
    double delta0_mean = 0.0;
    double delta_pi_mean = 0.0;
    double ratio = 0.0;
};

// Wraps x into (-pi/T, pi/T].
inline double fold_quasi_energy(double x, double T) {
    const double period = 2 * pi / T;
    double y = std::remainder(x, period);
    if (y <= -period / 2) y += period;
    return y;
}

/// Delta_0: mean neighbour gap e_{i+1} - e_i over the sorted spectrum.
/// Delta_pi: mean |e_{i+D/2} - e_i - pi/T|, each deviation folded back into
/// (-pi/T, pi/T] before taking the absolute value.
inline GapStatistics gap_statistics(const QuasiEnergySpectrum& spec) {
    const std::size_t d = spec.energies.size();
    if (d < 2 || d % 2 != 0) throw DimensionError("gap statistics need an even spectrum size");
    const auto& e = spec.energies;
    GapStatistics g;
    for (std::size_t i = 0; i + 1 < d; ++i) g.delta0_mean += e[i + 1] - e[i];
    g.delta0_mean /= static_cast<double>(d - 1);
    const std::size_t half = d / 2;
    for (std::size_t i = 0; i < half; ++i) {
        g.delta_pi_mean += std::abs(fold_quasi_energy(e[i + half] - e[i] - pi / spec.T, spec.T));
    }
    g.delta_pi_mean /= static_cast<double>(half);
    g.ratio = g.delta_pi_mean / g.delta0_mean;
    return g;
}

/// R = prod_i sx_i * prod_j sz_j in the shared bit convention:
/// R |k> = (-1)^(#down spins in k) |complement of k>. L = 1 is accepted
/// for single-site checks.
inline Eigen::MatrixXcd reflection_operator(int L) {
    if (L < 1) throw ConfigError("reflection operator needs L >= 1");
    if (L > dense_cap) check_dense_capacity(L);
    const auto dim = static_cast<Eigen::Index>(dimension(L));
    const basis_index mask = site_mask(L);
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(dim, dim);
    for (basis_index k = 0; k < static_cast<basis_index>(dim); ++k) {
        const int downs = L - std::popcount(k);
        r(static_cast<Eigen::Index>(~k & mask), static_cast<Eigen::Index>(k)) = downs % 2 ? -1.0 : 1.0;
    }
    return r;
}

/// Time reflection is antiunitary: R together with complex conjugation in
/// the computational basis. At JT = pi
///   R U* R^dagger = e^{i L pi / 2} U,
/// the phase being e^{-i L pi / 2} when U is written with e^{+iHt}.
/// Returns the max-norm residual of that identity. The linear form
/// R U R^dagger cannot match U: prod sz turns the kick into its inverse.
inline double check_time_reflection(const FloquetParams& params) {
    const DensePropagator u = build_dense_propagator(params);
    const Eigen::MatrixXcd r = reflection_operator(params.L);
    const complex phase = std::polar(1.0, params.L * pi / 2);
    return (r * u.matrix.conjugate() * r.adjoint() - phase * u.matrix).cwiseAbs().maxCoeff();
}

struct PiPairCounts {
    int n_zero = 0;
    int n_pi = 0;
};

inline bool near_zero_energy(double e, double tol) { return std::abs(e) <= tol; }

inline bool near_pi_energy(double e, double T, double tol) {
    return std::abs(e - pi / T) <= tol || std::abs(e + pi / T) <= tol;
}

inline PiPairCounts count_exact_pi_pairs(const QuasiEnergySpectrum& spec, double tol = 1e-10) {
    PiPairCounts c;
    for (double e : spec.energies) {
        if (near_zero_energy(e, tol)) ++c.n_zero;
        else if (near_pi_energy(e, spec.T, tol)) ++c.n_pi;
    }
    return c;
}

namespace detail {
inline const Eigen::MatrixXcd& require_vectors(const QuasiEnergySpectrum& spec) {
    if (!spec.vectors) throw ConfigError("spectrum was computed without eigenvectors");
    return *spec.vectors;
}

inline StateVector column_state(int L, const Eigen::VectorXcd& v) {
    return StateVector(L, std::vector<complex>(v.data(), v.data() + v.size()));
}
}  // namespace detail

// Eigenvector k of a spectrum as a state.
inline StateVector eigenstate(const QuasiEnergySpectrum& spec, std::size_t k) {
    const auto& v = detail::require_vectors(spec);
    if (k >= spec.size()) throw DimensionError("eigenvector index out of range");
    return detail::column_state(spec.L, v.col(static_cast<Eigen::Index>(k)));
}

/// (|phi_0> + sign |phi_pi>) / sqrt(2) from the eigenvectors at positions
/// zero_index (quasi-energy 0) and pi_index (quasi-energy pi/T).
inline StateVector paired_superposition(const QuasiEnergySpectrum& spec, std::size_t zero_index,
                                        std::size_t pi_index, int sign, double tol = 1e-10) {
    const auto& v = detail::require_vectors(spec);
    if (zero_index >= spec.size() || pi_index >= spec.size()) {
        throw DimensionError("eigenvector index out of range");
    }
    if (!near_zero_energy(spec.energies[zero_index], tol)) {
        throw ConfigError("selected zero-mode has quasi-energy " +
                          std::to_string(spec.energies[zero_index]));
    }
    if (!near_pi_energy(spec.energies[pi_index], spec.T, tol)) {
        throw ConfigError("selected pi-mode has quasi-energy " + std::to_string(spec.energies[pi_index]));
    }
    if (sign != 1 && sign != -1) throw ConfigError("sign must be +1 or -1");
    const Eigen::VectorXcd psi = (v.col(static_cast<Eigen::Index>(zero_index)) +
                                  static_cast<double>(sign) * v.col(static_cast<Eigen::Index>(pi_index))) /
                                 std::sqrt(2.0);
    return detail::column_state(spec.L, psi);
}

// Squared norm of the projection of `state` onto the eigenvectors at
// quasi-energy 0 and pi/T.
inline double overlap_with_pair_manifold(const StateVector& state, const QuasiEnergySpectrum& spec,
                                         double tol = 1e-10) {
    const auto& v = detail::require_vectors(spec);
    if (state.length() != spec.L) throw DimensionError("state and spectrum disagree on L");
    const Eigen::Map<const Eigen::VectorXcd> psi(state.amplitudes().data(),
                                                 static_cast<Eigen::Index>(state.size()));
    double weight = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double e = spec.energies[k];
        if (near_zero_energy(e, tol) || near_pi_energy(e, spec.T, tol)) {
            weight += std::norm(v.col(static_cast<Eigen::Index>(k)).dot(psi));
        }
    }
    return weight;
}

}  // namespace dtc
