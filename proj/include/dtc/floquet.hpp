// floquet.hpp
// One-period propagator of the kicked Ising chain,
//
//   U(T) = exp(-i (JT/4) sum_i sz_i sz_{i+1}) * exp(-i (pi/2 - eps) sum_i sx_i),
//
// applied matrix-free to state vectors (kick first, then the Ising phase),
// plus an explicit dense builder for spectral work.

#pragma once

#include "dtc/core_state.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

namespace dtc {

namespace detail {

// Phase exp(-i (JT/4) B) tabulated by (B + L) / 2, B in {-L, -L+2, ..., L}.
inline std::vector<complex> zz_phase_table(int L, double jt) {
    std::vector<complex> table(L + 1);
    for (int k = 0; k <= L; ++k) {
        const int bond = 2 * k - L;
        table[k] = std::polar(1.0, -jt / 4.0 * bond);
    }
    return table;
}

inline void zz_phase_inplace(std::span<complex> amps, int L, const std::vector<complex>& table) {
    const basis_index mask = site_mask(L);
    for (basis_index k = 0; k < amps.size(); ++k) {
        const basis_index rotated = (k >> 1) | ((k & 1u) << (L - 1));
        amps[k] *= table[std::popcount(~(k ^ rotated) & mask)];
    }
}

// exp(-i theta sx) on every site: L sweeps over index pairs differing in one bit.
inline void x_rotation_inplace(std::span<complex> amps, int L, double theta) {
    const double c = std::cos(theta);
    const complex mis{0.0, -std::sin(theta)};
    const std::size_t dim = amps.size();
    for (int site = 0; site < L; ++site) {
        const std::size_t stride = std::size_t{1} << site;
        for (std::size_t block = 0; block < dim; block += 2 * stride) {
            for (std::size_t k = block; k < block + stride; ++k) {
                const complex a0 = amps[k];
                const complex a1 = amps[k + stride];
                amps[k] = c * a0 + mis * a1;
                amps[k + stride] = c * a1 + mis * a0;
            }
        }
    }
}

}  // namespace detail

inline StateVector apply_zz_phase(const StateVector& state, const FloquetParams& params) {
    if (state.length() != params.L) throw DimensionError("state and params disagree on L");
    StateVector out = state;
    detail::zz_phase_inplace(out.amplitudes(), params.L, detail::zz_phase_table(params.L, params.jt()));
    return out;
}

inline StateVector apply_global_x_rotation(const StateVector& state, double theta) {
    StateVector out = state;
    detail::x_rotation_inplace(out.amplitudes(), state.length(), theta);
    return out;
}

/// Reusable one-period stepper. Holds the phase table for a fixed
/// parameter point so long evolutions do no per-step setup.
class FloquetStepper {
public:
    explicit FloquetStepper(const FloquetParams& params)
        : params_(params), table_(detail::zz_phase_table(params.L, params.jt())) {
        params_.validate();
        check_evolution_capacity(params_.L);
    }

    const FloquetParams& params() const { return params_; }

    void step_inplace(StateVector& state) const {
        if (state.length() != params_.L) throw DimensionError("state and params disagree on L");
        detail::x_rotation_inplace(state.amplitudes(), params_.L, params_.pulse_angle());
        detail::zz_phase_inplace(state.amplitudes(), params_.L, table_);
    }

    StateVector step(const StateVector& state) const {
        StateVector out = state;
        step_inplace(out);
        return out;
    }

private:
    FloquetParams params_;
    std::vector<complex> table_;
};

inline StateVector floquet_step(const StateVector& state, const FloquetParams& params) {
    return FloquetStepper(params).step(state);
}

struct DensePropagator {
    int L = 0;
    Eigen::MatrixXcd matrix;
};

/// Explicit U(T); column j is the one-period image of basis state j.
inline DensePropagator build_dense_propagator(const FloquetParams& params) {
    params.validate();
    check_dense_capacity(params.L);
    const FloquetStepper stepper(params);
    const auto dim = static_cast<Eigen::Index>(dimension(params.L));
    DensePropagator u{params.L, Eigen::MatrixXcd(dim, dim)};
    for (Eigen::Index j = 0; j < dim; ++j) {
        StateVector column = StateVector::basis(params.L, static_cast<basis_index>(j));
        stepper.step_inplace(column);
        u.matrix.col(j) = Eigen::Map<const Eigen::VectorXcd>(column.amplitudes().data(), dim);
    }
    return u;
}

// Global phase U(T) carries on top of "flip every spin, no interaction
// energy": at epsilon = 0, U |up...up> = reference_phase * |down...down>.
inline complex reference_phase(const FloquetParams& params) {
    const complex minus_i_to_L = std::pow(complex{0.0, -1.0}, params.L);
    return std::polar(1.0, -params.jt() * params.L / 4.0) * minus_i_to_L;
}

/// U(T) with the reference phase divided out. Quasi-energies of this
/// operator put the symmetry-pinned states of the JT = pi point exactly at
/// 0 and pi/T for every even L; dynamics are unaffected (global phase).
inline DensePropagator reference_propagator(const FloquetParams& params) {
    DensePropagator u = build_dense_propagator(params);
    u.matrix *= std::conj(reference_phase(params));
    return u;
}

inline double unitarity_residual(const Eigen::MatrixXcd& u) {
    const auto dim = u.rows();
    return (u.adjoint() * u - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
}

}  // namespace dtc
