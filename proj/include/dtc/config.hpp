// config.hpp
// Sweep configuration: command-line flags, an optional flat JSON config
// file, and validation. JT and epsilon are given in multiples of pi.

#pragma once

#include "dtc/core_state.hpp"
#include "dtc/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dtc {

// Thrown by parse_config for -h/--help; what() is the usage text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SweepMode { evolve, lifetime_scan, phase_diagram, spectrum, fourier };

inline const char* mode_name(SweepMode m) {
    switch (m) {
        case SweepMode::evolve: return "evolve";
        case SweepMode::lifetime_scan: return "lifetime-scan";
        case SweepMode::phase_diagram: return "phase-diagram";
        case SweepMode::spectrum: return "spectrum";
        case SweepMode::fourier: return "fourier";
    }
    return "?";
}

inline std::optional<SweepMode> parse_mode(const std::string& s) {
    for (auto m : {SweepMode::evolve, SweepMode::lifetime_scan, SweepMode::phase_diagram,
                   SweepMode::spectrum, SweepMode::fourier}) {
        if (s == mode_name(m)) return m;
    }
    return std::nullopt;
}

// up/down: polarized. x-site / down-site: spin `site` along +x / -z, the
// rest along +z.
enum class InitialKind { up, down, x_site, down_site };
enum class ObservableKind { return_probability, site_sz };

struct SweepConfig {
    SweepMode mode = SweepMode::evolve;
    std::vector<int> lengths;
    std::vector<double> jt_over_pi;
    std::vector<double> epsilon_over_pi;
    std::int64_t n_periods = 2000;
    double threshold = 0.05;
    std::int64_t window = 1000;
    std::string output_path;
    int jobs = 1;
    double T = 1.0;
    InitialKind initial = InitialKind::up;
    int site = 0;
    ObservableKind observable = ObservableKind::return_probability;
    bool record_sz = false;
    bool dump_spectra = false;

    std::size_t grid_size() const { return lengths.size() * jt_over_pi.size() * epsilon_over_pi.size(); }
};

inline std::int64_t default_periods(SweepMode mode) {
    switch (mode) {
        case SweepMode::lifetime_scan: return 100000;
        case SweepMode::fourier: return 512;
        default: return 2000;
    }
}

inline const char* initial_name(InitialKind k) {
    switch (k) {
        case InitialKind::up: return "up";
        case InitialKind::down: return "down";
        case InitialKind::x_site: return "x-site";
        case InitialKind::down_site: return "down-site";
    }
    return "?";
}

inline const char* observable_name(ObservableKind k) {
    return k == ObservableKind::site_sz ? "sz" : "return";
}

namespace detail {

inline double round_grid_value(double v) { return std::round(v * 1e12) / 1e12; }

// "a,b,c" where each item is a number, "start:stop" (unit step) or
// "start:stop:step"; ranges include both ends.
inline std::vector<double> parse_grid_string(const std::string& text, std::vector<std::string>& errors,
                                             const std::string& key) {
    std::vector<double> values;
    std::stringstream items(text);
    std::string item;
    auto to_number = [&](const std::string& s, double& out) {
        try {
            std::size_t used = 0;
            out = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return std::isfinite(out);
        } catch (const std::exception&) {
            return false;
        }
    };
    while (std::getline(items, item, ',')) {
        if (item.empty()) continue;
        std::vector<std::string> parts;
        std::stringstream ps(item);
        std::string part;
        while (std::getline(ps, part, ':')) parts.push_back(part);
        std::vector<double> nums(parts.size());
        bool ok = parts.size() >= 1 && parts.size() <= 3;
        for (std::size_t i = 0; ok && i < parts.size(); ++i) ok = to_number(parts[i], nums[i]);
        if (!ok) {
            errors.push_back(key + ": cannot parse grid item '" + item + "'");
            continue;
        }
        if (nums.size() == 1) {
            values.push_back(nums[0]);
            continue;
        }
        const double start = nums[0], stop = nums[1];
        const double step = nums.size() == 3 ? nums[2] : 1.0;
        if (!(step > 0.0) || stop < start) {
            errors.push_back(key + ": range '" + item + "' needs start <= stop and step > 0");
            continue;
        }
        const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 1000000) {
            errors.push_back(key + ": range '" + item + "' has too many points");
            continue;
        }
        for (std::int64_t i = 0; i < count; ++i) values.push_back(round_grid_value(start + i * step));
    }
    return values;
}

inline std::vector<double> grid_from_json(const nlohmann::json& v, std::vector<std::string>& errors,
                                          const std::string& key) {
    if (v.is_number()) return {v.get<double>()};
    if (v.is_string()) return parse_grid_string(v.get<std::string>(), errors, key);
    if (v.is_array()) {
        std::vector<double> out;
        for (const auto& x : v) {
            if (x.is_number()) out.push_back(x.get<double>());
            else errors.push_back(key + ": array entries must be numbers");
        }
        return out;
    }
    errors.push_back(key + ": expected a number, list or grid string");
    return {};
}

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "mode",   "length", "jt-over-pi",    "epsilon-over-pi", "periods",   "threshold",
        "window", "out",    "jobs",          "drive-period",    "initial",   "site",
        "observable", "record-sz", "dump-spectra"};
    return keys;
}

}  // namespace detail

/// Builds a validated SweepConfig from flat key/value settings (the keys of
/// known_keys(), values as in the JSON config file). All problems are
/// collected and reported in one exception: ConfigError, or CapacityError
/// when the only problems are system sizes beyond the caps.
inline SweepConfig config_from_settings(const nlohmann::json& settings) {
    std::vector<std::string> errors;
    std::vector<std::string> capacity;
    SweepConfig c;

    for (const auto& [key, value] : settings.items()) {
        const auto& keys = detail::known_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) errors.push_back("unknown key '" + key + "'");
    }

    auto get_string = [&](const char* key) -> std::optional<std::string> {
        if (!settings.contains(key)) return std::nullopt;
        const auto& v = settings.at(key);
        if (!v.is_string()) {
            errors.push_back(std::string(key) + ": expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    };
    auto get_number = [&](const char* key) -> std::optional<double> {
        if (!settings.contains(key)) return std::nullopt;
        const auto& v = settings.at(key);
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) {
            try {
                std::size_t used = 0;
                const auto s = v.get<std::string>();
                const double x = std::stod(s, &used);
                if (used == s.size()) return x;
            } catch (const std::exception&) {
            }
        }
        errors.push_back(std::string(key) + ": expected a number");
        return std::nullopt;
    };
    auto get_integer = [&](const char* key) -> std::optional<std::int64_t> {
        auto x = get_number(key);
        if (!x) return std::nullopt;
        if (std::floor(*x) != *x || std::abs(*x) > 9e15) {
            errors.push_back(std::string(key) + ": expected an integer");
            return std::nullopt;
        }
        return static_cast<std::int64_t>(*x);
    };
    auto get_flag = [&](const char* key) -> bool {
        if (!settings.contains(key)) return false;
        const auto& v = settings.at(key);
        if (v.is_boolean()) return v.get<bool>();
        errors.push_back(std::string(key) + ": expected true/false");
        return false;
    };

    const auto mode = get_string("mode");
    bool have_mode = false;
    if (!mode) {
        errors.push_back("missing mode (evolve, lifetime-scan, phase-diagram, spectrum, fourier)");
    } else if (auto m = parse_mode(*mode)) {
        c.mode = *m;
        have_mode = true;
    } else {
        errors.push_back("unknown mode '" + *mode + "'");
    }

    if (settings.contains("length")) {
        for (double x : detail::grid_from_json(settings.at("length"), errors, "length")) {
            if (std::floor(x) != x) errors.push_back("length: " + std::to_string(x) + " is not an integer");
            else c.lengths.push_back(static_cast<int>(x));
        }
    }
    if (settings.contains("jt-over-pi")) c.jt_over_pi = detail::grid_from_json(settings.at("jt-over-pi"), errors, "jt-over-pi");
    if (settings.contains("epsilon-over-pi")) {
        c.epsilon_over_pi = detail::grid_from_json(settings.at("epsilon-over-pi"), errors, "epsilon-over-pi");
    }
    if (c.lengths.empty()) errors.push_back("length: grid is empty");
    if (c.jt_over_pi.empty()) errors.push_back("jt-over-pi: grid is empty");
    if (c.epsilon_over_pi.empty()) errors.push_back("epsilon-over-pi: grid is empty");

    c.n_periods = get_integer("periods").value_or(default_periods(c.mode));
    c.threshold = get_number("threshold").value_or(0.05);
    c.window = get_integer("window").value_or(1000);
    c.jobs = static_cast<int>(get_integer("jobs").value_or(1));
    c.T = get_number("drive-period").value_or(1.0);
    c.site = static_cast<int>(get_integer("site").value_or(0));
    c.record_sz = get_flag("record-sz");
    c.dump_spectra = get_flag("dump-spectra");
    c.output_path = get_string("out").value_or(std::string(mode_name(c.mode)) + ".csv");

    if (auto s = get_string("initial")) {
        if (*s == "up") c.initial = InitialKind::up;
        else if (*s == "down") c.initial = InitialKind::down;
        else if (*s == "x-site") c.initial = InitialKind::x_site;
        else if (*s == "down-site") c.initial = InitialKind::down_site;
        else errors.push_back("initial: unknown state '" + *s + "'");
    }
    if (auto s = get_string("observable")) {
        if (*s == "return") c.observable = ObservableKind::return_probability;
        else if (*s == "sz") c.observable = ObservableKind::site_sz;
        else errors.push_back("observable: expected 'return' or 'sz'");
    }

    const std::int64_t min_periods = (c.mode == SweepMode::evolve) ? 1 : 2;
    if (c.mode != SweepMode::spectrum && c.n_periods < min_periods) {
        errors.push_back("periods: must be >= " + std::to_string(min_periods));
    }
    if (!(c.threshold > 0.0 && c.threshold < 1.0)) errors.push_back("threshold: must lie in (0, 1)");
    if (c.window < 1) errors.push_back("window: must be >= 1");
    if (have_mode && c.mode == SweepMode::phase_diagram && c.window > c.n_periods / 2) {
        errors.push_back("window: " + std::to_string(c.window) + " exceeds the " +
                         std::to_string(c.n_periods / 2) + " P(2nT) samples of " +
                         std::to_string(c.n_periods) + " periods");
    }
    if (c.jobs < 1) errors.push_back("jobs: must be >= 1");
    if (!(c.T > 0.0) || !std::isfinite(c.T)) errors.push_back("drive-period: must be positive");
    for (double x : c.jt_over_pi) if (!std::isfinite(x)) errors.push_back("jt-over-pi: non-finite value");
    for (double x : c.epsilon_over_pi) if (!std::isfinite(x)) errors.push_back("epsilon-over-pi: non-finite value");

    const int cap = c.mode == SweepMode::spectrum ? dense_cap : evolution_cap;
    const bool uses_site = c.initial == InitialKind::x_site || c.initial == InitialKind::down_site ||
                           (c.mode == SweepMode::fourier && c.observable == ObservableKind::site_sz);
    for (int L : c.lengths) {
        if (L < 2) errors.push_back("length: L = " + std::to_string(L) + " is below 2");
        else if (L > cap) {
            capacity.push_back("length: L = " + std::to_string(L) + " exceeds the " +
                               (c.mode == SweepMode::spectrum ? "dense" : "evolution") + " cap L <= " +
                               std::to_string(cap));
        }
        if (uses_site && (c.site < 0 || c.site >= L)) {
            errors.push_back("site: " + std::to_string(c.site) + " out of range for L = " + std::to_string(L));
        }
    }

    auto join = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        std::string out;
        for (const auto* v : {&a, &b}) {
            for (const auto& s : *v) out += (out.empty() ? "" : "; ") + s;
        }
        return out;
    };
    if (!errors.empty()) throw ConfigError(join(errors, capacity));
    if (!capacity.empty()) throw CapacityError(join(capacity, {}));
    return c;
}

inline nlohmann::json config_to_json(const SweepConfig& c) {
    nlohmann::json j;
    j["mode"] = mode_name(c.mode);
    j["length"] = c.lengths;
    j["jt-over-pi"] = c.jt_over_pi;
    j["epsilon-over-pi"] = c.epsilon_over_pi;
    j["periods"] = c.n_periods;
    j["threshold"] = c.threshold;
    j["window"] = c.window;
    j["out"] = c.output_path;
    j["drive-period"] = c.T;
    j["initial"] = initial_name(c.initial);
    j["site"] = c.site;
    j["observable"] = observable_name(c.observable);
    j["record-sz"] = c.record_sz;
    j["dump-spectra"] = c.dump_spectra;
    // jobs is left out on purpose: results must not depend on it.
    return j;
}

inline nlohmann::json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file '" + path + "' must hold a flat JSON object");
    return j;
}

/// Parses command-line arguments (without the program name). The mode comes
/// from the leading subcommand word, --mode, or the config file; flags
/// override file values.
inline SweepConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Kicked Ising chain sweeps"};
    std::string positional_mode, mode, length, jt, eps, out, config_path, initial, observable;
    std::int64_t periods = 0, window = 0;
    double threshold = 0, drive_period = 0;
    int jobs = 0, site = 0;

    app.add_option("subcommand", positional_mode, "evolve | lifetime-scan | phase-diagram | spectrum | fourier");
    auto* o_mode = app.add_option("--mode", mode, "same as the subcommand word");
    auto* o_len = app.add_option("-L,--length", length, "chain lengths, e.g. 11 or 6:12 or 6,8,10");
    auto* o_jt = app.add_option("--jt-over-pi", jt, "JT in units of pi: list or start:stop:step");
    auto* o_eps = app.add_option("--epsilon-over-pi", eps, "pulse error epsilon in units of pi");
    auto* o_periods = app.add_option("--periods", periods, "Floquet periods to simulate");
    auto* o_thr = app.add_option("--threshold", threshold, "lifetime threshold on P(2nT)");
    auto* o_win = app.add_option("--window", window, "P(2nT) samples in the average");
    auto* o_out = app.add_option("--out", out, "summary CSV path");
    auto* o_jobs = app.add_option("--jobs", jobs, "worker threads");
    auto* o_T = app.add_option("--drive-period", drive_period, "T (default 1)");
    auto* o_init = app.add_option("--initial", initial, "up | down | x-site | down-site");
    auto* o_site = app.add_option("--site", site, "site for x-site/down-site and sz");
    auto* o_obs = app.add_option("--observable", observable, "fourier input: return | sz");
    auto* o_sz = app.add_flag("--record-sz", "evolve: add per-site sz columns to series files");
    auto* o_dump = app.add_flag("--dump-spectra", "spectrum: write quasi-energies per grid point");
    app.add_option("--config", config_path, "flat JSON file with the same keys as the long flags");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("command line: ") + e.what());
    }

    nlohmann::json settings = nlohmann::json::object();
    if (!config_path.empty()) settings = read_config_file(config_path);
    if (!positional_mode.empty()) settings["mode"] = positional_mode;
    if (o_mode->count()) settings["mode"] = mode;
    if (o_len->count()) settings["length"] = length;
    if (o_jt->count()) settings["jt-over-pi"] = jt;
    if (o_eps->count()) settings["epsilon-over-pi"] = eps;
    if (o_periods->count()) settings["periods"] = periods;
    if (o_thr->count()) settings["threshold"] = threshold;
    if (o_win->count()) settings["window"] = window;
    if (o_out->count()) settings["out"] = out;
    if (o_jobs->count()) settings["jobs"] = jobs;
    if (o_T->count()) settings["drive-period"] = drive_period;
    if (o_init->count()) settings["initial"] = initial;
    if (o_site->count()) settings["site"] = site;
    if (o_obs->count()) settings["observable"] = observable;
    if (o_sz->count()) settings["record-sz"] = true;
    if (o_dump->count()) settings["dump-spectra"] = true;
    return config_from_settings(settings);
}

}  // namespace dtc
