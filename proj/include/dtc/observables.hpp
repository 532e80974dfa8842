// observables.hpp
// Stroboscopic trajectories and the scalar diagnostics computed from them.

#pragma once

#include "dtc/core_state.hpp"
#include "dtc/floquet.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace dtc {

struct ObservableSelection {
    bool return_probability = true;
    bool site_sz = false;
};

struct StroboscopicSample {
    std::int64_t n = 0;  // period index, from 1
    double P = 0.0;      // return probability vs. the initial state
    std::vector<double> sz;
};

struct StroboscopicSeries {
    FloquetParams params;
    std::vector<StroboscopicSample> samples;
    double norm_drift = 0.0;  // max | ||psi(nT)|| - 1 | over the run
};

inline double return_probability(const StateVector& current, const StateVector& initial) {
    return std::norm(overlap(initial, current));
}

inline double local_sz(const StateVector& state, int site) {
    if (site < 0 || site >= state.length()) {
        throw DimensionError("site " + std::to_string(site) + " out of range");
    }
    const auto amps = state.amplitudes();
    double sum = 0.0;
    for (basis_index k = 0; k < amps.size(); ++k) {
        sum += std::norm(amps[k]) * spin_sign(k, site);
    }
    return sum;
}

// All <sz_i> in one pass over the amplitudes.
inline std::vector<double> all_sz(const StateVector& state) {
    const int L = state.length();
    std::vector<double> up(L, 0.0);
    double total = 0.0;
    const auto amps = state.amplitudes();
    for (basis_index k = 0; k < amps.size(); ++k) {
        const double w = std::norm(amps[k]);
        total += w;
        for (basis_index bits = k; bits != 0; bits &= bits - 1) up[std::countr_zero(bits)] += w;
    }
    std::vector<double> sz(L);
    for (int i = 0; i < L; ++i) sz[i] = 2.0 * up[i] - total;
    return sz;
}

/// Iterates U(T) n_periods times, recording the selected observables after
/// each period. The state is never renormalized; norm_drift reports the
/// largest deviation seen.
inline StroboscopicSeries evolve_stroboscopic(const StateVector& initial, const FloquetParams& params,
                                              std::int64_t n_periods,
                                              ObservableSelection observables = {}) {
    if (n_periods < 1) throw ConfigError("n_periods must be >= 1");
    const FloquetStepper stepper(params);
    if (initial.length() != params.L) throw DimensionError("initial state and params disagree on L");

    StroboscopicSeries series{params, {}, 0.0};
    series.samples.reserve(static_cast<std::size_t>(n_periods));
    StateVector psi = initial;
    for (std::int64_t n = 1; n <= n_periods; ++n) {
        stepper.step_inplace(psi);
        StroboscopicSample sample{n, 0.0, {}};
        if (observables.return_probability) sample.P = return_probability(psi, initial);
        if (observables.site_sz) sample.sz = all_sz(psi);
        series.norm_drift = std::max(series.norm_drift, std::abs(psi.norm() - 1.0));
        series.samples.push_back(std::move(sample));
    }
    return series;
}

// P(nT) for n = 1..N.
inline std::vector<double> return_values(const StroboscopicSeries& series) {
    std::vector<double> p(series.samples.size());
    std::transform(series.samples.begin(), series.samples.end(), p.begin(),
                   [](const StroboscopicSample& s) { return s.P; });
    return p;
}

// P(2nT) for n = 1..floor(N/2), taken from the even periods of a series.
inline std::vector<double> even_period_returns(const StroboscopicSeries& series) {
    std::vector<double> p;
    p.reserve(series.samples.size() / 2);
    for (const auto& s : series.samples) {
        if (s.n % 2 == 0) p.push_back(s.P);
    }
    return p;
}

struct FourierSpectrum {
    std::vector<double> frequencies;  // units of omega0 = 2 pi / T: k / N
    std::vector<double> magnitudes;   // |sum_n x_n e^{-2 pi i k n / N}| / N
    std::size_t n_samples = 0;
    double omega0 = 2 * pi;
};

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

inline FourierSpectrum fourier_spectrum(std::span<const double> samples, double T = 1.0) {
    const std::size_t n = samples.size();
    if (n < 2) throw ConfigError("fourier_spectrum needs at least 2 samples");

    auto* in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    fftw_plan plan;
    {
        // Only fftw_execute is thread-safe.
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (std::size_t k = 0; k < n; ++k) {
        in[k][0] = samples[k];
        in[k][1] = 0.0;
    }
    fftw_execute(plan);

    FourierSpectrum spectrum;
    spectrum.n_samples = n;
    spectrum.omega0 = 2 * pi / T;
    spectrum.frequencies.resize(n);
    spectrum.magnitudes.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        spectrum.frequencies[k] = static_cast<double>(k) / static_cast<double>(n);
        spectrum.magnitudes[k] = std::hypot(out[k][0], out[k][1]) / static_cast<double>(n);
    }
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return spectrum;
}

// Bin of the largest magnitude among k = 1..N/2 (the nonnegative half of the
// grid; the rest mirrors it for real input). Ties go to the lower bin.
inline std::size_t dominant_nonzero_bin(const FourierSpectrum& spectrum) {
    const std::size_t half = spectrum.n_samples / 2;
    std::size_t best = 1;
    for (std::size_t k = 2; k <= half; ++k) {
        if (spectrum.magnitudes[k] > spectrum.magnitudes[best]) best = k;
    }
    return best;
}

/// Outcome of a lifetime measurement: the first n with P(2nT) < threshold,
/// or censored when no sample up to n_max crosses.
struct Lifetime {
    std::optional<std::int64_t> n_star;
    std::int64_t n_max = 0;
    double threshold = 0.05;

    bool censored() const { return !n_star.has_value(); }
    // Censored runs rank above every finite lifetime.
    std::int64_t rank_value() const { return n_star.value_or(n_max + 1); }
};

inline Lifetime lifetime(std::span<const double> p2n, double threshold = 0.05) {
    Lifetime result{std::nullopt, static_cast<std::int64_t>(p2n.size()), threshold};
    for (std::size_t i = 0; i < p2n.size(); ++i) {
        if (p2n[i] < threshold) {
            result.n_star = static_cast<std::int64_t>(i) + 1;
            break;
        }
    }
    return result;
}

/// Evolves from `initial` for up to n_periods and stops at the first even
/// period with P(2nT) < threshold. Same answer as lifetime() on the full
/// series, without storing it.
inline Lifetime measure_lifetime(const StateVector& initial, const FloquetParams& params,
                                 std::int64_t n_periods, double threshold = 0.05,
                                 double* norm_drift = nullptr) {
    if (n_periods < 2) throw ConfigError("lifetime needs at least 2 periods");
    const FloquetStepper stepper(params);
    StateVector psi = initial;
    Lifetime result{std::nullopt, n_periods / 2, threshold};
    double drift = 0.0;
    for (std::int64_t n = 1; n <= result.n_max; ++n) {
        stepper.step_inplace(psi);
        stepper.step_inplace(psi);
        if (return_probability(psi, initial) < threshold) {
            result.n_star = n;
            break;
        }
        if (n % 64 == 0) drift = std::max(drift, std::abs(psi.norm() - 1.0));
    }
    drift = std::max(drift, std::abs(psi.norm() - 1.0));
    if (norm_drift) *norm_drift = drift;
    return result;
}

inline double average_return(std::span<const double> p2n, std::size_t window = 1000) {
    if (window == 0 || window > p2n.size()) {
        throw ConfigError("average window " + std::to_string(window) + " exceeds sample count " +
                          std::to_string(p2n.size()));
    }
    return std::accumulate(p2n.begin(), p2n.begin() + static_cast<std::ptrdiff_t>(window), 0.0) /
           static_cast<double>(window);
}

}  // namespace dtc
