#include "dtc/sweep.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>

using namespace dtc;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("dtc_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

// Drops the run-dependent provenance fields from a summary file.
std::string without_timing(std::string s) {
    s = std::regex_replace(s, std::regex("\"timestamp\":\"[^\"]*\""), "");
    return std::regex_replace(s, std::regex("\"elapsed_seconds\":[^,}]*"), "");
}

std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(csv);
    std::string line;
    int seen = 0;
    while (std::getline(in, line)) {
        if (line.starts_with("#")) continue;
        if (seen++ == 0) continue;  // column names
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DTC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(ParseConfig, SingleValueFlags) {
    const auto c = parse_config({"evolve", "-L", "6", "--jt-over-pi", "1.0", "--epsilon-over-pi", "0.1"});
    EXPECT_EQ(c.mode, SweepMode::evolve);
    ASSERT_EQ(c.jt_over_pi.size(), 1u);
    EXPECT_DOUBLE_EQ(c.jt_over_pi[0], 1.0);
    EXPECT_EQ(c.lengths, std::vector<int>{6});
    EXPECT_EQ(c.n_periods, 2000);
    EXPECT_EQ(c.grid_size(), 1u);
}

TEST(ParseConfig, GridSyntax) {
    const auto c = parse_config({"phase-diagram", "--length", "6:10:2", "--jt-over-pi", "0:1:0.25",
                                 "--epsilon-over-pi", "0.05,0.1"});
    EXPECT_EQ(c.lengths, (std::vector<int>{6, 8, 10}));
    EXPECT_EQ(c.jt_over_pi, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
    EXPECT_EQ(c.epsilon_over_pi.size(), 2u);
    EXPECT_EQ(c.grid_size(), 30u);
    // 0.1 steps land on the decimal values, not on accumulated sums.
    const auto d = parse_config({"spectrum", "-L", "4", "--jt-over-pi", "0:0.3:0.1", "--epsilon-over-pi", "0"});
    EXPECT_EQ(d.jt_over_pi, (std::vector<double>{0.0, 0.1, 0.2, 0.3}));
}

TEST(ParseConfig, CapacityErrorNamesTheCap) {
    try {
        parse_config({"--mode", "spectrum", "--length", "30", "--jt-over-pi", "1", "--epsilon-over-pi", "0.1"});
        FAIL() << "expected a capacity error";
    } catch (const CapacityError& e) {
        EXPECT_NE(std::string(e.what()).find(std::to_string(dense_cap)), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_config({"evolve", "-L", "25", "--jt-over-pi", "1", "--epsilon-over-pi", "0.1"}),
                 CapacityError);
    EXPECT_NO_THROW(parse_config({"evolve", "-L", "20", "--jt-over-pi", "1", "--epsilon-over-pi", "0.1"}));
}

TEST(ParseConfig, Errors) {
    EXPECT_THROW(parse_config({"evolve", "-L", "6", "--jt-over-pi", "1"}), ConfigError);  // empty eps grid
    EXPECT_THROW(parse_config({"evolve", "-L", "6", "--jt-over-pi", "1:0", "--epsilon-over-pi", "0"}), ConfigError);
    EXPECT_THROW(parse_config({"bogus", "-L", "6", "--jt-over-pi", "1", "--epsilon-over-pi", "0"}), ConfigError);
    EXPECT_THROW(parse_config({"evolve", "-L", "6.5", "--jt-over-pi", "1", "--epsilon-over-pi", "0"}), ConfigError);
    EXPECT_THROW(parse_config({"evolve", "-L", "6", "--jt-over-pi", "1", "--epsilon-over-pi", "0", "--threshold",
                               "1.5"}),
                 ConfigError);
    EXPECT_THROW(parse_config({"phase-diagram", "-L", "6", "--jt-over-pi", "1", "--epsilon-over-pi", "0",
                               "--periods", "100", "--window", "80"}),
                 ConfigError);
    EXPECT_THROW(parse_config({"evolve", "--no-such-flag"}), ConfigError);
    // Capacity and config problems together report as a config error.
    EXPECT_THROW(parse_config({"spectrum", "-L", "30", "--jt-over-pi", "1"}), ConfigError);
    EXPECT_THROW(parse_config({"--help"}), HelpRequested);
}

TEST(ParseConfig, FileAndFlagOverride) {
    const auto dir = scratch_dir("config");
    const auto file = dir / "run.json";
    write_file(file, R"({"mode": "lifetime-scan", "length": [6, 8], "jt-over-pi": "0.9:1:0.1",
                        "epsilon-over-pi": 0.1, "periods": 500, "jobs": 3})");
    const auto c = parse_config({"--config", file.string(), "--periods", "800"});
    EXPECT_EQ(c.mode, SweepMode::lifetime_scan);
    EXPECT_EQ(c.lengths, (std::vector<int>{6, 8}));
    EXPECT_EQ(c.jt_over_pi, (std::vector<double>{0.9, 1.0}));
    EXPECT_EQ(c.n_periods, 800);
    EXPECT_EQ(c.jobs, 3);

    write_file(file, R"({"mode": "evolve", "length": 6, "jt-over-pi": 1, "epsilon-over-pi": 0, "colour": 1})");
    EXPECT_THROW(parse_config({"--config", file.string()}), ConfigError);
    write_file(file, "[1, 2]");
    EXPECT_THROW(parse_config({"--config", file.string()}), ConfigError);
    EXPECT_THROW(parse_config({"--config", (dir / "missing.json").string()}), IoError);
}

TEST(Sweep, PerfectPulsesAlternateInSeriesFile) {
    const auto dir = scratch_dir("evolve");
    const auto c = parse_config({"evolve", "-L", "5", "--jt-over-pi", "0.37", "--epsilon-over-pi", "0", "--periods",
                                 "40", "--record-sz", "--out", (dir / "run.csv").string()});
    const auto r = run_sweep(c);
    write_sweep(r);
    const std::string series = slurp(dir / "run_series_0000.csv");
    EXPECT_TRUE(series.starts_with("n,t,P,sz_0,sz_1,sz_2,sz_3,sz_4\n"));
    const auto rows = data_rows(series);
    ASSERT_EQ(rows.size(), 40u);
    for (const auto& row : rows) {
        const int n = std::stoi(row[0]);
        EXPECT_NEAR(std::stod(row[2]), n % 2 ? 0.0 : 1.0, 1e-12);
        EXPECT_NEAR(std::stod(row[3]), n % 2 ? -1.0 : 1.0, 1e-12);
    }
    const auto summary = data_rows(slurp(dir / "run.csv"));
    ASSERT_EQ(summary.size(), 1u);
    EXPECT_EQ(summary[0][5], "1");  // censored
    EXPECT_EQ(summary[0].back(), "");
}

TEST(Sweep, OutputIsIndependentOfJobs) {
    const auto dir = scratch_dir("jobs");
    for (const char* mode : {"evolve", "lifetime-scan", "phase-diagram", "spectrum", "fourier"}) {
        std::string outputs[2];
        int slot = 0;
        for (const char* jobs : {"1", "8"}) {
            const auto sub = dir / (std::string(mode) + "_" + jobs);
            fs::create_directories(sub);
            auto c = parse_config({mode, "-L", "4:6", "--jt-over-pi", "0.8,1", "--epsilon-over-pi", "0.05,0.1",
                                   "--periods", "200", "--window", "50", "--jobs", jobs, "--dump-spectra", "--out",
                                   (sub / "out.csv").string()});
            write_sweep(run_sweep(c));
            std::string all;
            for (const auto& entry : std::set<fs::path>(fs::directory_iterator(sub), {})) {
                all += entry.filename().string() + "\n" + slurp(entry) + "\n";
            }
            outputs[slot++] = without_timing(all);
        }
        // The header echoes the output path, which differs between the two runs.
        const auto strip_path = [](std::string s) {
            return std::regex_replace(s, std::regex("\"out\":\"[^\"]*\""), "");
        };
        EXPECT_EQ(strip_path(outputs[0]), strip_path(outputs[1])) << mode;
    }
}

TEST(Sweep, BadPointBecomesErrorRow) {
    SweepConfig c = parse_config({"fourier", "-L", "4", "--jt-over-pi", "1", "--epsilon-over-pi", "0.1",
                                  "--periods", "16"});
    c.site = 7;  // bypasses validation to reach the per-row guard
    c.observable = ObservableKind::site_sz;
    const auto r = run_sweep(c);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].cells.size(), r.columns.size());
    EXPECT_FALSE(r.rows[0].cells.back().empty());
    EXPECT_EQ(r.rows[0].cells[0], "4");
}

TEST(Sweep, PhaseDiagramSymmetricAboutJTPi) {
    const auto c = parse_config({"phase-diagram", "-L", "6", "--jt-over-pi", "0:2:0.25", "--epsilon-over-pi",
                                 "0,0.1", "--periods", "400", "--window", "200"});
    const auto r = run_sweep(c);
    std::map<std::pair<std::string, std::string>, double> avg;
    for (const auto& row : r.rows) avg[{row.cells[1], row.cells[2]}] = std::stod(row.cells[4]);
    for (const auto& [key, value] : avg) {
        if (key.second == "0") {
            EXPECT_NEAR(value, 1.0, 1e-12);
        }
        const std::string mirror = format_double(std::round((2.0 - std::stod(key.first)) * 1e12) / 1e12);
        EXPECT_NEAR(value, avg.at({mirror, key.second}), 1e-10) << key.first;
    }
}

TEST(Sweep, HeaderAndFloatFormat) {
    const auto c = parse_config({"spectrum", "-L", "4", "--jt-over-pi", "1", "--epsilon-over-pi", "0.1",
                                 "--dump-spectra"});
    const auto r = run_sweep(c);
    const std::string csv = summary_csv(r);
    ASSERT_TRUE(csv.starts_with("# {"));
    const auto header = nlohmann::json::parse(csv.substr(2, csv.find('\n') - 2));
    EXPECT_EQ(header["config"]["mode"], "spectrum");
    EXPECT_EQ(header["provenance"]["version"], tool_version);
    EXPECT_EQ(csv.find('\r'), std::string::npos);

    const auto& dump = r.rows[0].files.at(0).content;
    EXPECT_TRUE(dump.starts_with("index,quasi_energy\n"));
    for (const auto& row : data_rows(dump)) {
        const double e = std::stod(row[1]);
        EXPECT_EQ(format_double(e), row[1]);  // shortest round trip
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(1e-300), "1e-300");
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch_dir("cli");
    const std::string out = " --out " + (dir / "a.csv").string();
    EXPECT_EQ(run_cli("evolve -L 4 --jt-over-pi 1 --epsilon-over-pi 0.1 --periods 10" + out), 0);
    EXPECT_TRUE(fs::exists(dir / "a.csv"));
    EXPECT_TRUE(fs::exists(dir / "a_series_0000.csv"));
    EXPECT_EQ(run_cli("--help"), 0);
    EXPECT_EQ(run_cli("evolve -L 4 --jt-over-pi 1" + out), 2);
    EXPECT_EQ(run_cli("spectrum --length 30 --jt-over-pi 1 --epsilon-over-pi 0.1" + out), 3);
    EXPECT_EQ(run_cli("evolve -L 4 --jt-over-pi 1 --epsilon-over-pi 0.1 --out " + (dir / "no/such/dir/a.csv").string()),
              4);
    EXPECT_EQ(run_cli("--config " + (dir / "absent.json").string()), 4);
}
