// sweep.hpp
// Grid runners behind the command-line tool. Every grid point is an
// independent job; rows are collected by grid index and written in grid
// order, so output is identical for any worker count.

#pragma once

#include "dtc/config.hpp"
#include "dtc/core_state.hpp"
#include "dtc/floquet.hpp"
#include "dtc/format.hpp"
#include "dtc/observables.hpp"
#include "dtc/spectral.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace dtc {

inline constexpr const char* tool_version = "1.0.0";

struct GridPoint {
    std::size_t index = 0;
    int L = 2;
    double jt_over_pi = 0.0;
    double epsilon_over_pi = 0.0;
};

// Grid order: L outermost, then JT, then epsilon.
inline std::vector<GridPoint> enumerate_grid(const SweepConfig& c) {
    std::vector<GridPoint> points;
    points.reserve(c.grid_size());
    for (int L : c.lengths) {
        for (double jt : c.jt_over_pi) {
            for (double eps : c.epsilon_over_pi) points.push_back({points.size(), L, jt, eps});
        }
    }
    return points;
}

struct SideFile {
    std::string name;  // relative to the summary file's directory
    std::string content;
};

struct RowResult {
    std::vector<std::string> cells;
    std::vector<SideFile> files;
};

struct SweepResult {
    SweepConfig config;
    std::vector<std::string> columns;
    std::vector<RowResult> rows;
    nlohmann::json provenance;
};

inline StateVector initial_state(const SweepConfig& c, int L) {
    switch (c.initial) {
        case InitialKind::up: return polarized_state(L, Direction::up);
        case InitialKind::down: return polarized_state(L, Direction::down);
        case InitialKind::x_site:
        case InitialKind::down_site: {
            std::vector<BlochAngles> angles(static_cast<std::size_t>(L));
            angles[static_cast<std::size_t>(c.site)] =
                c.initial == InitialKind::x_site ? BlochAngles{pi / 2, 0.0} : BlochAngles{pi, 0.0};
            return product_state(L, angles);
        }
    }
    throw ConfigError("unknown initial state");
}

namespace detail {

inline std::string side_file_name(const SweepConfig& c, const char* kind, std::size_t index) {
    std::string stem = std::filesystem::path(c.output_path).filename().string();
    if (stem.size() > 4 && stem.ends_with(".csv")) stem.resize(stem.size() - 4);
    std::ostringstream name;
    name << stem << '_' << kind << '_' << std::setw(4) << std::setfill('0') << index << ".csv";
    return name.str();
}

inline std::vector<std::string> point_cells(const GridPoint& p) {
    return {format_int(p.L), format_double(p.jt_over_pi), format_double(p.epsilon_over_pi)};
}

inline void append(std::vector<std::string>& cells, std::initializer_list<std::string> more) {
    cells.insert(cells.end(), more);
}

inline std::string lifetime_cell(const Lifetime& t) { return t.n_star ? format_int(*t.n_star) : ""; }

inline RowResult evolve_row(const SweepConfig& c, const GridPoint& p) {
    const auto params = FloquetParams::from_dimensionless(p.L, p.jt_over_pi, p.epsilon_over_pi, c.T);
    const auto series = evolve_stroboscopic(initial_state(c, p.L), params, c.n_periods,
                                            {true, c.record_sz});
    const auto p2n = even_period_returns(series);
    const auto life = lifetime(p2n, c.threshold);
    const std::size_t window = std::min<std::size_t>(static_cast<std::size_t>(c.window), p2n.size());

    std::ostringstream csv;
    csv << "n,t,P";
    if (c.record_sz) for (int i = 0; i < p.L; ++i) csv << ",sz_" << i;
    csv << '\n';
    for (const auto& s : series.samples) {
        csv << s.n << ',' << format_double(static_cast<double>(s.n) * c.T) << ',' << format_double(s.P);
        for (double v : s.sz) csv << ',' << format_double(v);
        csv << '\n';
    }

    RowResult row{point_cells(p), {}};
    const std::string file = side_file_name(c, "series", p.index);
    append(row.cells, {format_int(c.n_periods), lifetime_cell(life), life.censored() ? "1" : "0",
                       window ? format_double(average_return(p2n, window)) : "", format_int(static_cast<std::int64_t>(window)),
                       format_double(series.norm_drift), file, ""});
    row.files.push_back({file, csv.str()});
    return row;
}

inline RowResult lifetime_row(const SweepConfig& c, const GridPoint& p) {
    const auto params = FloquetParams::from_dimensionless(p.L, p.jt_over_pi, p.epsilon_over_pi, c.T);
    double drift = 0.0;
    const auto life = measure_lifetime(initial_state(c, p.L), params, c.n_periods, c.threshold, &drift);
    RowResult row{point_cells(p), {}};
    append(row.cells, {format_int(life.n_max), lifetime_cell(life), life.censored() ? "1" : "0",
                       format_double(c.threshold), format_double(drift), ""});
    return row;
}

inline RowResult phase_row(const SweepConfig& c, const GridPoint& p) {
    const auto params = FloquetParams::from_dimensionless(p.L, p.jt_over_pi, p.epsilon_over_pi, c.T);
    const auto series = evolve_stroboscopic(initial_state(c, p.L), params, 2 * c.window);
    const auto p2n = even_period_returns(series);
    RowResult row{point_cells(p), {}};
    append(row.cells, {format_int(c.window),
                       format_double(average_return(p2n, static_cast<std::size_t>(c.window))),
                       format_double(series.norm_drift), ""});
    return row;
}

inline RowResult spectrum_row(const SweepConfig& c, const GridPoint& p) {
    const auto params = FloquetParams::from_dimensionless(p.L, p.jt_over_pi, p.epsilon_over_pi, c.T);
    const auto spec = floquet_spectrum(params, false);
    const auto gaps = gap_statistics(spec);
    const auto pairs = count_exact_pi_pairs(spec);
    const double residual = check_time_reflection(params);
    RowResult row{point_cells(p), {}};
    std::string file;
    if (c.dump_spectra) {
        file = side_file_name(c, "spectrum", p.index);
        std::ostringstream csv;
        csv << "index,quasi_energy\n";
        for (std::size_t k = 0; k < spec.energies.size(); ++k) {
            csv << k << ',' << format_double(spec.energies[k]) << '\n';
        }
        row.files.push_back({file, csv.str()});
    }
    append(row.cells, {format_double(gaps.delta0_mean), format_double(gaps.delta_pi_mean),
                       format_double(gaps.ratio), format_int(pairs.n_zero), format_int(pairs.n_pi),
                       format_double(residual), file, ""});
    return row;
}

inline RowResult fourier_row(const SweepConfig& c, const GridPoint& p) {
    const auto params = FloquetParams::from_dimensionless(p.L, p.jt_over_pi, p.epsilon_over_pi, c.T);
    const bool sz = c.observable == ObservableKind::site_sz;
    if (sz && (c.site < 0 || c.site >= p.L)) throw DimensionError("site out of range for this chain");
    const auto series = evolve_stroboscopic(initial_state(c, p.L), params, c.n_periods, {!sz, sz});
    std::vector<double> signal;
    signal.reserve(series.samples.size());
    for (const auto& s : series.samples) signal.push_back(sz ? s.sz[static_cast<std::size_t>(c.site)] : s.P);
    const auto spectrum = fourier_spectrum(signal, c.T);
    const std::size_t peak = dominant_nonzero_bin(spectrum);
    const bool has_half = spectrum.n_samples % 2 == 0;
    const std::size_t half = spectrum.n_samples / 2;

    std::ostringstream csv;
    csv << "k,omega_over_omega0,magnitude\n";
    for (std::size_t k = 0; k < spectrum.n_samples; ++k) {
        csv << k << ',' << format_double(spectrum.frequencies[k]) << ',' << format_double(spectrum.magnitudes[k])
            << '\n';
    }
    RowResult row{point_cells(p), {}};
    const std::string file = side_file_name(c, "fourier", p.index);
    append(row.cells, {format_int(c.n_periods), observable_name(c.observable), format_int(c.site),
                       format_int(static_cast<std::int64_t>(peak)), format_double(spectrum.frequencies[peak]),
                       format_double(spectrum.magnitudes[peak]),
                       has_half ? format_double(spectrum.magnitudes[half]) : "",
                       has_half && peak == half ? "1" : "0", file, ""});
    row.files.push_back({file, csv.str()});
    return row;
}

inline std::string iso_timestamp_utc() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

}  // namespace detail

inline std::vector<std::string> sweep_columns(SweepMode mode) {
    std::vector<std::string> cols = {"L", "jt_over_pi", "epsilon_over_pi"};
    switch (mode) {
        case SweepMode::evolve:
            detail::append(cols, {"periods", "lifetime_n", "censored", "average_return", "average_window",
                                  "norm_drift", "series_file", "error"});
            break;
        case SweepMode::lifetime_scan:
            detail::append(cols, {"n_max", "lifetime_n", "censored", "threshold", "norm_drift", "error"});
            break;
        case SweepMode::phase_diagram:
            detail::append(cols, {"window", "average_return", "norm_drift", "error"});
            break;
        case SweepMode::spectrum:
            detail::append(cols, {"delta0_mean", "delta_pi_mean", "ratio", "n_zero", "n_pi",
                                  "reflection_residual", "spectrum_file", "error"});
            break;
        case SweepMode::fourier:
            detail::append(cols, {"periods", "observable", "site", "peak_bin", "peak_omega_over_omega0",
                                  "peak_magnitude", "half_bin_magnitude", "subharmonic_dominant",
                                  "spectrum_file", "error"});
            break;
    }
    return cols;
}

/// Runs fn(point) for every grid point on `jobs` threads and returns the
/// results in grid order.
template <class Fn>
auto run_grid(const std::vector<GridPoint>& points, int jobs, Fn fn) {
    using Result = decltype(fn(points.front()));
    std::vector<Result> results(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) results[i] = fn(points[i]);
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
    {
        std::vector<std::jthread> pool;
        for (int t = 1; t < n; ++t) pool.emplace_back(worker);
        worker();
    }
    return results;
}

inline SweepResult run_sweep(const SweepConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    SweepResult result{config, sweep_columns(config.mode), {}, {}};
    const std::size_t width = result.columns.size();
    const auto points = enumerate_grid(config);

    result.rows = run_grid(points, config.jobs, [&](const GridPoint& p) {
        try {
            switch (config.mode) {
                case SweepMode::evolve: return detail::evolve_row(config, p);
                case SweepMode::lifetime_scan: return detail::lifetime_row(config, p);
                case SweepMode::phase_diagram: return detail::phase_row(config, p);
                case SweepMode::spectrum: return detail::spectrum_row(config, p);
                case SweepMode::fourier: return detail::fourier_row(config, p);
            }
            throw ConfigError("unknown mode");
        } catch (const std::exception& e) {
            // Keep the row: inputs echoed, outputs blank, message in `error`.
            RowResult row{detail::point_cells(p), {}};
            row.cells.resize(width - 1);
            std::string msg = e.what();
            for (char& ch : msg) {
                if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
            }
            row.cells.push_back(msg);
            return row;
        }
    });

    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.provenance = {
        {"tool", "dtc"},
        {"version", tool_version},
        {"timestamp", detail::iso_timestamp_utc()},
        {"elapsed_seconds", elapsed},
        {"lifetime_units", "n counts pairs of periods; n_max = floor(periods / 2)"},
    };
    return result;
}

inline std::string header_line(const SweepResult& r) {
    const nlohmann::json header = {{"config", config_to_json(r.config)}, {"provenance", r.provenance}};
    return "# " + header.dump();
}

inline std::string summary_csv(const SweepResult& r) {
    std::ostringstream out;
    out << header_line(r) << '\n';
    for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
    out << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.cells.size(); ++i) out << (i ? "," : "") << row.cells[i];
        out << '\n';
    }
    return out.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

// Writes the summary CSV and every side file next to it, in grid order.
inline void write_sweep(const SweepResult& r) {
    const std::filesystem::path summary(r.config.output_path);
    const auto dir = summary.parent_path();
    write_text_file(summary, summary_csv(r));
    for (const auto& row : r.rows) {
        for (const auto& f : row.files) write_text_file(dir / f.name, f.content);
    }
}

}  // namespace dtc
