// core_state.hpp
// Basis encoding and state vectors for a periodic chain of L spin-1/2 sites.
//
// Bit convention (shared by every header in dtc/):
//   bit i of a basis index is set  <=>  spin i is up (sigma^z_i = +1)
//   site 0 is the least significant bit, site L is identified with site 0.

#pragma once

#include "dtc/errors.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace dtc {

using complex = std::complex<double>;
using basis_index = std::uint64_t;

inline constexpr double pi = std::numbers::pi;

// Largest L for state-vector evolution (2^L amplitudes).
inline constexpr int evolution_cap = 24;
// Largest L for dense propagators and diagonalization (4^L entries).
inline constexpr int dense_cap = 14;

inline void check_chain_length(int L) {
    if (L < 2) {
        throw ConfigError("periodic chain needs L >= 2, got L = " + std::to_string(L));
    }
}

inline void check_evolution_capacity(int L) {
    check_chain_length(L);
    if (L > evolution_cap) {
        throw CapacityError("L = " + std::to_string(L) + " exceeds the evolution cap L <= " +
                            std::to_string(evolution_cap));
    }
}

inline void check_dense_capacity(int L) {
    check_chain_length(L);
    if (L > dense_cap) {
        throw CapacityError("L = " + std::to_string(L) + " exceeds the dense cap L <= " +
                            std::to_string(dense_cap));
    }
}

inline constexpr basis_index dimension(int L) { return basis_index{1} << L; }

/// Drive and interaction parameters of the kicked Ising chain (hbar = 1).
///
/// Every dynamical quantity depends on J and T only through J*T, which is
/// why callers usually construct this through from_dimensionless(). The
/// kick angle per spin is pi/2 - epsilon; epsilon may be negative.
struct FloquetParams {
    int L = 2;
    double J = 0.0;
    double T = 1.0;
    double epsilon = 0.0;

    static FloquetParams from_dimensionless(int L, double jt_over_pi, double epsilon_over_pi,
                                            double T = 1.0) {
        FloquetParams p{L, jt_over_pi * pi / T, T, epsilon_over_pi * pi};
        p.validate();
        return p;
    }

    double jt() const { return J * T; }
    double pulse_angle() const { return pi / 2 - epsilon; }

    void validate() const {
        check_chain_length(L);
        if (!(T > 0.0) || !std::isfinite(T)) {
            throw ConfigError("drive period T must be positive and finite");
        }
        if (!std::isfinite(J) || !std::isfinite(epsilon)) {
            throw ConfigError("J and epsilon must be finite");
        }
    }
};

inline basis_index site_mask(int L) { return dimension(L) - 1; }

// Sum over bonds of s(i) s(i+1 mod L), s = +1 for up. Equal neighbours
// contribute +1, so B = (#equal) - (#unequal) = 2 #equal - L. For L = 2 the
// single physical bond is counted twice (0->1 and 1->0).
inline int bond_sum(basis_index index, int L) {
    const basis_index mask = site_mask(L);
    if (index > mask) {
        throw DimensionError("basis index " + std::to_string(index) + " out of range for L = " +
                             std::to_string(L));
    }
    const basis_index rotated = (index >> 1) | ((index & 1u) << (L - 1));
    const int equal = std::popcount(~(index ^ rotated) & mask);
    return 2 * equal - L;
}

// +1 / -1 eigenvalue of sigma^z on `site` for a basis index.
inline int spin_sign(basis_index index, int site) {
    return ((index >> site) & 1u) ? 1 : -1;
}

class StateVector {
public:
    StateVector() = default;

    StateVector(int L, std::vector<complex> amplitudes) : L_(L), amplitudes_(std::move(amplitudes)) {
        check_evolution_capacity(L);
        if (amplitudes_.size() != dimension(L)) {
            throw DimensionError("amplitude count " + std::to_string(amplitudes_.size()) +
                                 " does not match 2^L for L = " + std::to_string(L));
        }
    }

    static StateVector basis(int L, basis_index index) {
        check_evolution_capacity(L);
        if (index >= dimension(L)) {
            throw DimensionError("basis index out of range");
        }
        std::vector<complex> amps(dimension(L));
        amps[index] = 1.0;
        return StateVector(L, std::move(amps));
    }

    int length() const { return L_; }
    std::size_t size() const { return amplitudes_.size(); }

    std::span<const complex> amplitudes() const { return amplitudes_; }
    std::span<complex> amplitudes() { return amplitudes_; }

    const complex& operator[](basis_index i) const { return amplitudes_[i]; }
    complex& operator[](basis_index i) { return amplitudes_[i]; }

    double norm() const {
        double sum = 0.0;
        for (const auto& a : amplitudes_) sum += std::norm(a);
        return std::sqrt(sum);
    }

private:
    int L_ = 0;
    std::vector<complex> amplitudes_;
};

enum class Direction { up, down };

inline StateVector polarized_state(int L, Direction direction) {
    check_evolution_capacity(L);
    return StateVector::basis(L, direction == Direction::up ? site_mask(L) : 0);
}

// Single-site orientation cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>.
struct BlochAngles {
    double theta = 0.0;
    double phi = 0.0;
};

inline StateVector product_state(int L, std::span<const BlochAngles> orientations) {
    check_evolution_capacity(L);
    if (orientations.size() != static_cast<std::size_t>(L)) {
        throw ConfigError("product_state needs exactly L = " + std::to_string(L) +
                          " orientations, got " + std::to_string(orientations.size()));
    }
    std::vector<complex> amps(dimension(L));
    amps[0] = 1.0;
    // Grow the tensor product one site at a time; after site i the first
    // 2^(i+1) entries hold the state of sites 0..i.
    for (int site = 0; site < L; ++site) {
        const auto [theta, phi] = orientations[site];
        const complex up = std::cos(theta / 2);
        const complex down = std::polar(1.0, phi) * std::sin(theta / 2);
        const basis_index half = basis_index{1} << site;
        for (basis_index k = 0; k < half; ++k) {
            const complex old = amps[k];
            amps[k | half] = old * up;
            amps[k] = old * down;
        }
    }
    return StateVector(L, std::move(amps));
}

inline complex overlap(const StateVector& a, const StateVector& b) {
    if (a.length() != b.length() || a.size() != b.size()) {
        throw DimensionError("overlap of states with different L");
    }
    complex sum = 0.0;
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t k = 0; k < x.size(); ++k) sum += std::conj(x[k]) * y[k];
    return sum;
}

}  // namespace dtc
