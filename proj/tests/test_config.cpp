#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "eit/config.hpp"

using namespace eit;

namespace {

const std::string kBase = R"([system]
omega = 1 GHz
q_factor = 1e4
g = 80 MHz
omega_pu = 50 MHz
gamma_d = 60 MHz
gamma_f = 30 MHz
)";

bool has_issue(const ValidationResult& r, const std::string& key, int line = -1) {
    for (const auto& e : r.errors)
        if (e.key.find(key) != std::string::npos && (line < 0 || e.line == line)) return true;
    return false;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Config, MinimalFileUsesDefaults) {
    const auto r = validate_config(kBase);
    ASSERT_TRUE(r.ok()) << (r.errors.empty() ? "" : r.errors[0].str());
    const SweepConfig& c = *r.config;
    EXPECT_DOUBLE_EQ(c.params.g, 0.08);
    EXPECT_DOUBLE_EQ(c.params.gamma_r, 1e-4);
    EXPECT_DOUBLE_EQ(c.params.omega_pr, 0.0005);
    EXPECT_DOUBLE_EQ(c.params.delta, 1.0);
    EXPECT_EQ(c.detuning_preset, DetuningPreset::delta_eq_omega);
    EXPECT_EQ(c.steady_mode, SteadyMode::corrected_omega);
    EXPECT_EQ(c.numerator, Numerator::gamma_f);
    ASSERT_EQ(c.routes.size(), 1U);
    EXPECT_EQ(c.routes[0], Route::full_eq7);
}

TEST(Config, UnitsAreNormalised) {
    const auto r = validate_config(kBase + "omega_pr = 500 kHz\n[dynamics]\nt_end = 0.4 us\nstride = 500 ps\n");
    ASSERT_TRUE(r.ok());
    EXPECT_NEAR(r.config->params.omega_pr, 5e-4, 1e-18);
    EXPECT_NEAR(r.config->dynamics.t_end, 400.0, 1e-12);
    EXPECT_NEAR(r.config->dynamics.stride, 0.5, 1e-15);
}

TEST(Config, BareFrequencyRejected) {
    const auto r = validate_config(kBase + "omega_pr = 0.0005\n");
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(has_issue(r, "system.omega_pr", 8));
}

TEST(Config, NegativeRateNamesField) {
    std::string text = kBase;
    text.replace(text.find("gamma_f = 30 MHz"), 16, "gamma_f = -30 MHz");
    const auto r = validate_config(text);
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(has_issue(r, "system.gamma_f", 7));
}

TEST(Config, InconsistentQualityFactor) {
    const auto r = validate_config(kBase + "gamma_r = 1 MHz\n");
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(has_issue(r, "gamma_r / system.q_factor"));
    EXPECT_TRUE(validate_config(kBase + "gamma_r = 0.1 MHz\n").ok());
}

TEST(Config, PresetConflictsWithExplicitDelta) {
    const auto r = validate_config(kBase + "detuning_preset = delta_eq_omega\ndelta = 0.97 GHz\n");
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(has_issue(r, "system.delta", 9));

    const auto e = validate_config(kBase + "detuning_preset = explicit\ndelta = 0.97 GHz\n");
    ASSERT_TRUE(e.ok());
    EXPECT_DOUBLE_EQ(e.config->params.delta, 0.97);

    EXPECT_FALSE(validate_config(kBase + "detuning_preset = explicit\n").ok());
}

TEST(Config, CompensatedPresetSolvesShift) {
    const auto r = validate_config(kBase + "detuning_preset = delta_eq_omega_minus_shift\n");
    ASSERT_TRUE(r.ok());
    const SystemParams& p = r.config->params;
    EXPECT_NEAR(p.delta + p.energy_shift(), p.omega, 1e-12);
}

TEST(Config, ReportsAllErrorsWithLines) {
    const std::string text = kBase +
                             "bogus = 1 GHz\n"        // 8
                             "[sweep]\n"              // 9
                             "points = many\n"        // 10
                             "routes = full_eq7, warp\n"  // 11
                             "steady_mode = exact\n"  // 12
                             "[nowhere]\n";           // 13
    const auto r = validate_config(text);
    EXPECT_FALSE(r.ok());
    EXPECT_GE(r.errors.size(), 5U);
    EXPECT_TRUE(has_issue(r, "system.bogus", 8));
    EXPECT_TRUE(has_issue(r, "sweep.points", 10));
    EXPECT_TRUE(has_issue(r, "sweep.routes", 11));
    EXPECT_TRUE(has_issue(r, "sweep.steady_mode", 12));
    EXPECT_TRUE(has_issue(r, "nowhere", 13));
    for (std::size_t i = 1; i < r.errors.size(); ++i) EXPECT_LE(r.errors[i - 1].line, r.errors[i].line);
}

TEST(Config, MissingRequiredAndDuplicates) {
    const auto r = validate_config("[system]\nomega = 1 GHz\nomega = 2 GHz\n");
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(has_issue(r, "system.g"));
    EXPECT_TRUE(has_issue(r, "system.gamma_r"));
    EXPECT_TRUE(has_issue(r, "system.omega", 3));
}

TEST(Config, EmptyRouteListRejected) {
    const auto r = validate_config(kBase + "[sweep]\nroutes = ,\n");
    EXPECT_TRUE(has_issue(r, "sweep.routes", 9));
}

TEST(Config, ThrowingVariantCarriesIssues) {
    try {
        parse_config_or_throw("[system]\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_FALSE(e.issues().empty());
    }
}

TEST(Config, ShippedPresetsParse) {
    const std::filesystem::path dir = std::filesystem::path(EIT_SOURCE_DIR) / "presets";
    int n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".cfg") continue;
        const auto r = validate_config(slurp(entry.path()));
        EXPECT_TRUE(r.ok()) << entry.path() << ": " << (r.errors.empty() ? "" : r.errors[0].str());
        ++n;
    }
    EXPECT_GE(n, 3);
}
