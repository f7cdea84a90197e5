#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eit/sweep.hpp"

using namespace eit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Non-comment lines split on commas.
std::vector<std::vector<std::string>> table(const std::string& csv) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        out.push_back(cells);
    }
    return out;
}

void compare(const std::string& fresh, const std::string& golden_name) {
    const fs::path golden = fs::path(EIT_SOURCE_DIR) / "tests" / "golden" / golden_name;
    ASSERT_TRUE(fs::exists(golden)) << golden;
    const auto a = table(fresh), b = table(slurp(golden));
    ASSERT_EQ(a.size(), b.size());
    ASSERT_FALSE(a.empty());
    EXPECT_EQ(a[0], b[0]);  // column names
    for (std::size_t i = 1; i < a.size(); ++i) {
        ASSERT_EQ(a[i].size(), b[i].size()) << "row " << i;
        for (std::size_t j = 0; j < a[i].size(); ++j) {
            if (a[i][j].empty() || b[i][j].empty() || b[0][j] == "error") {
                EXPECT_EQ(a[i][j], b[i][j]) << "row " << i << " column " << b[0][j];
                continue;
            }
            const double x = std::stod(a[i][j]), y = std::stod(b[i][j]);
            EXPECT_LE(std::abs(x - y), 1e-9 * std::max(1.0, std::abs(y))) << "row " << i << " column " << b[0][j];
        }
    }
}

SweepConfig preset(const std::string& name) {
    return parse_config_or_throw(slurp(fs::path(EIT_SOURCE_DIR) / "presets" / name));
}

void spectrum_case(const std::string& name) {
    const SweepConfig cfg = preset(name + ".cfg");
    std::ostringstream os;
    write_spectrum_csv(os, cfg, run_spectrum(cfg, default_threads()));
    compare(os.str(), name + ".csv");
}

}  // namespace

TEST(Golden, WideSpectrum) { spectrum_case("fig2"); }
TEST(Golden, NarrowSpectrum) { spectrum_case("fig5"); }
TEST(Golden, NarrowSpectrumCompensated) { spectrum_case("fig5_resonant"); }

TEST(Golden, DampedDynamics) {
    const SweepConfig cfg = preset("fig3.cfg");
    std::ostringstream os;
    write_dynamics_csv(os, cfg, run_dynamics(cfg));
    compare(os.str(), "fig3.csv");
}
