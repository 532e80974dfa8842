// Command-line front end: dtc <evolve|lifetime-scan|phase-diagram|spectrum|fourier> [flags]
//
// Exit codes: 0 success, 2 configuration error, 3 capacity error, 4 I/O error.

#include "dtc/sweep.hpp"

#include <iostream>

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const dtc::SweepConfig config = dtc::parse_config(args);
        const dtc::SweepResult result = dtc::run_sweep(config);
        dtc::write_sweep(result);
        std::size_t failed = 0;
        for (const auto& row : result.rows) failed += !row.cells.back().empty();
        std::cerr << "dtc: " << result.rows.size() << " grid points -> " << config.output_path;
        if (failed) std::cerr << " (" << failed << " rows with errors)";
        std::cerr << '\n';
        return 0;
    } catch (const dtc::HelpRequested& help) {
        std::cout << help.what();
        return 0;
    } catch (const dtc::CapacityError& e) {
        std::cerr << "dtc: capacity error: " << e.what() << '\n';
        return 3;
    } catch (const dtc::IoError& e) {
        std::cerr << "dtc: I/O error: " << e.what() << '\n';
        return 4;
    } catch (const dtc::ConfigError& e) {
        std::cerr << "dtc: configuration error: " << e.what() << '\n';
        return 2;
    }
}
