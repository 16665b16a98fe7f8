#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "socsim/config.hpp"
#include "socsim/errors.hpp"

using namespace socsim;
namespace fs = std::filesystem;

TEST(Config, DefaultRoundTrip) {
    const RunConfig c;
    EXPECT_EQ(parse_config(write_config(c)), c);
}

TEST(Config, ModifiedRoundTrip) {
    RunConfig c;
    c.system.cpus = 1;
    c.system.core.base_cpi_micro = 6'750'000;
    c.system.latency.main_memory_latency = 64;
    c.system.dc.capacity_bytes = 4096;
    c.system.workload.working_set_bytes = 5120;
    c.system.mailbox.capacity = 3;
    c.bench.iterations = 123;
    c.sweep_space = {{1, 2, 0}, {2, 8, 8}};
    c.calibration_seed = 9;
    const std::string text = write_config(c);
    EXPECT_EQ(parse_config(text), c);
    EXPECT_EQ(write_config(parse_config(text)), text);
}

TEST(Config, ShippedConfigsParse) {
    for (const char* name : {"reference.cfg", "exp1.cfg", "exp2.cfg", "full_space.cfg"}) {
        const RunConfig c = load_config(fs::path(SOCSIM_TEST_CONFIG_DIR) / name);
        EXPECT_NO_THROW(c.system.validate()) << name;
    }
    EXPECT_EQ(load_config(fs::path(SOCSIM_TEST_CONFIG_DIR) / "exp1.cfg").sweep_space, ic_sweep_space());
    EXPECT_EQ(load_config(fs::path(SOCSIM_TEST_CONFIG_DIR) / "exp2.cfg").sweep_space, dc_sweep_space());
}

TEST(Config, OmittedKeysKeepDefaults) {
    const RunConfig c = parse_config("[system]\ncpus = 1\n");
    EXPECT_EQ(c.system.cpus, 1u);
    EXPECT_EQ(c.system.ic, RunConfig{}.system.ic);
}

TEST(Config, ErrorsNameTheLine) {
    auto message = [](std::string_view text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("[system]\ncpus = 1\nbogus = 2\n").find("line 3"), std::string::npos);
    EXPECT_NE(message("# c\n[nowhere]\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("[system]\ncpus = 1\ncpus = 2\n").find("line 3"), std::string::npos);
    EXPECT_NE(message("[system]\ncpus = two\n").find("line 2"), std::string::npos);
    EXPECT_THROW(parse_config("[cache.ic]\ncapacity_bytes = 3000\n"), ConfigError);
}

TEST(Config, MissingFileIsConfigError) {
    EXPECT_THROW(load_config("/nonexistent/socsim.cfg"), Error);
}

TEST(Config, ResolvesAgainstConfigDirectory) {
    const fs::path dir = fs::temp_directory_path() / "socsim_cfg_test";
    fs::create_directories(dir);
    std::ofstream(dir / "mine.cfg") << "[system]\ncpus = 1\n";

    ::unsetenv(kConfigDirEnv);
    EXPECT_EQ(resolve_config_path("", "/fallback"), fs::path("/fallback/reference.cfg"));
    EXPECT_EQ(resolve_config_path("mine.cfg", dir), dir / "mine.cfg");

    ::setenv(kConfigDirEnv, dir.c_str(), 1);
    EXPECT_EQ(resolve_config_path("", "/fallback"), dir / "reference.cfg");
    EXPECT_EQ(resolve_config_path("mine.cfg", "/fallback"), dir / "mine.cfg");
    EXPECT_EQ(resolve_config_path("/abs/x.cfg", "/fallback"), fs::path("/abs/x.cfg"));
    ::unsetenv(kConfigDirEnv);
    fs::remove_all(dir);
}
