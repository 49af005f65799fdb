#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcsf/errors.hpp"
#include "lcsf/harness.hpp"
#include "lcsf/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lcsf;

namespace {

/// Cut-down study that still exercises every pipeline stage in seconds.
StudyConfig mini_config() {
    StudyConfig cfg = StudyConfig::desk_profile();
    cfg.realizations = 2;
    cfg.master_seed = 99;
    cfg.multisine.n_samples = 256;
    cfg.multisine.line_indices = MultisineConfig::make_line_range(3, 24, 3);
    cfg.eval_counts = {21, 21};
    cfg.n_test = std::size_t{1} << 11;
    cfg.solver.max_inner_iterations = 25;
    cfg.solver.max_outer_iterations = 3;
    cfg.train.max_iterations = 60;
    cfg.train.restarts = 1;
    return cfg;
}

bool same_record(const RealizationRecord& a, const RealizationRecord& b) {
    return a.ok == b.ok && a.seed == b.seed &&
           a.theta_ini.phases == b.theta_ini.phases &&
           a.theta_cl.amplitudes == b.theta_cl.amplitudes &&
           a.theta_lc.amplitudes == b.theta_lc.amplitudes &&
           a.power_ini == b.power_ini && a.power_cl == b.power_cl &&
           a.power_lc == b.power_lc && a.v_cl == b.v_cl && a.v_lc == b.v_lc &&
           a.gamma == b.gamma && a.rho_cl == b.rho_cl && a.rho_lc == b.rho_lc &&
           a.rmse == b.rmse;
}

} // namespace

TEST_CASE("test-suite generation") {
    StudyConfig cfg = mini_config();

    SUBCASE("four families with the documented names") {
        const auto suite = generate_test_suite(cfg);
        REQUIRE(suite.size() == 4);
        CHECK(suite[0].name == "multisine_full");
        CHECK(suite[1].name == "multisine_reduced");
        CHECK(suite[2].name == "sweep_log");
        CHECK(suite[3].name == "white_noise");
        for (const auto& t : suite) {
            CHECK(t.u.size() == cfg.n_test);
            CHECK(t.y.size() == cfg.n_test);
        }
    }

    SUBCASE("dense multisine obeys Parseval") {
        const auto suite = generate_test_suite(cfg);
        const auto lines = MultisineConfig::make_line_band(
            cfg.multisine.f_s, cfg.n_test, cfg.test_f_min, cfg.test_f_max);
        const double expected =
            static_cast<double>(lines.size()) * cfg.test_amplitude_full *
            cfg.test_amplitude_full / 2.0;
        CHECK(signal_power(suite[0].u) == doctest::Approx(expected).epsilon(1e-6));
    }

    SUBCASE("white-noise family hits the target variance at full length") {
        const auto u = white_uniform_sequence(123, cfg.white_variance, std::size_t{1} << 16);
        double mean = 0.0;
        for (double s : u) mean += s;
        mean /= static_cast<double>(u.size());
        double var = 0.0;
        for (double s : u) var += (s - mean) * (s - mean);
        var /= static_cast<double>(u.size());
        CHECK(std::abs(var - cfg.white_variance) / cfg.white_variance < 0.05);
    }

    SUBCASE("deterministic in the master seed") {
        const auto a = generate_test_suite(cfg);
        const auto b = generate_test_suite(cfg);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].u == b[i].u);
            CHECK(a[i].y == b[i].y);
        }
    }
}

TEST_CASE("realization determinism and contracts") {
    const StudyConfig cfg = mini_config();
    const auto tests = generate_test_suite(cfg);

    const RealizationRecord a = run_realization(0, cfg, tests);
    const RealizationRecord b = run_realization(0, cfg, tests);

    REQUIRE(a.ok);
    CHECK(same_record(a, b));
    CHECK(a.failure_stage.empty());
    CHECK(a.v_lc <= a.gamma * (1.0 + 1e-4));
    CHECK(a.gamma == doctest::Approx(1.05 * a.gamma0).epsilon(1e-12));
    CHECK(a.power_lc <= a.power_cl);
    CHECK(a.lm_traces_monotone);
    for (int d = 0; d < kDesignCount; ++d)
        for (int f = 0; f < kTestFamilyCount; ++f)
            CHECK(a.rmse[static_cast<std::size_t>(d)][static_cast<std::size_t>(f)] > 0.0);
}

TEST_CASE("study run, report files and aggregation round trip") {
    StudyConfig cfg = mini_config();
    const std::filesystem::path out = "harness_smoke_out";
    std::filesystem::remove_all(out);

    const StudyResult result = run_study(cfg);
    REQUIRE(result.records.size() == 2);
    const StudyAggregates agg = aggregate(result);
    CHECK(agg.successes + agg.failures == cfg.realizations);
    CHECK(agg.successes == 2);

    write_report(result, out.string());
    for (const char* name : {"study.json", "table1.csv", "designs.csv",
                             "signals_time.svg", "signals_spectrum.svg", "features.svg",
                             "rmse_box.svg"})
        CHECK(std::filesystem::exists(out / name));

    SUBCASE("study.json reloads to an identical serialization") {
        const Json j = load_json((out / "study.json").string());
        const StudyResult reloaded = study_result_from_json(j);
        CHECK(study_result_to_json(reloaded).dump(2) == j.dump(2));
        CHECK(reloaded.records.size() == result.records.size());
    }

    SUBCASE("table1 medians match the records") {
        std::ifstream in(out / "table1.csv");
        REQUIRE(in.good());
        std::string line;
        int family = 0;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("family", 0) == 0) continue;
            std::stringstream ss(line);
            std::string cell;
            std::getline(ss, cell, ',');  // family name
            CHECK(cell == result.test_names[static_cast<std::size_t>(family)]);
            for (int d = 0; d < kDesignCount; ++d) {
                std::getline(ss, cell, ',');
                const double value = std::stod(cell) * 1e-5;
                CHECK(std::abs(value -
                               agg.median_rmse[static_cast<std::size_t>(d)]
                                              [static_cast<std::size_t>(family)]) < 1e-12);
            }
            ++family;
        }
        CHECK(family == kTestFamilyCount);
    }

    SUBCASE("designs.csv carries one row per realization") {
        const CsvTable table = read_csv((out / "designs.csv").string());
        CHECK(table.rows.size() == result.records.size());
        const std::size_t c_power_cl = table.column("power_classical");
        const std::size_t c_power_lc = table.column("power_least_costly");
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            CHECK(table.rows[r][c_power_cl] == result.records[r].power_cl);
            CHECK(table.rows[r][c_power_lc] == result.records[r].power_lc);
        }
    }
}

TEST_CASE("configuration JSON") {
    SUBCASE("round trip preserves every field") {
        StudyConfig cfg = mini_config();
        cfg.dy_unit = DyUnit::increment;
        cfg.linearization = LinearizationMode::origin;
        cfg.cost_kind = ExperimentCost::max_abs;
        const Json j = study_config_to_json(cfg);
        StudyConfig parsed;
        study_config_from_json(j, parsed);
        CHECK(study_config_to_json(parsed).dump() == j.dump());
    }

    SUBCASE("unknown top-level key is rejected") {
        Json j{{"realisations", 10}};  // misspelled
        StudyConfig cfg;
        CHECK_THROWS_WITH_AS(study_config_from_json(j, cfg),
                             doctest::Contains("unknown key"), ConfigError);
    }

    SUBCASE("unknown nested key is rejected") {
        Json j;
        j["solver"] = Json{{"fd_step", 1e-4}, {"momentum", 0.9}};
        StudyConfig cfg;
        CHECK_THROWS_AS(study_config_from_json(j, cfg), ConfigError);
    }

    SUBCASE("line_range expands to explicit indices") {
        Json j;
        j["multisine"] = Json{{"line_range", Json{{"min", 12}, {"max", 103}, {"stride", 7}}}};
        StudyConfig cfg;
        study_config_from_json(j, cfg);
        CHECK(cfg.multisine.line_count() == 14);
        CHECK(cfg.multisine.line_indices.front() == 12);
        CHECK(cfg.multisine.line_indices.back() == 103);
    }

    SUBCASE("bad enum value is rejected") {
        Json j{{"dy_unit", "furlongs"}};
        StudyConfig cfg;
        CHECK_THROWS_AS(study_config_from_json(j, cfg), ConfigError);
    }

    SUBCASE("partial config keeps schema defaults") {
        Json j{{"realizations", 3}};
        StudyConfig cfg;
        study_config_from_json(j, cfg);
        CHECK(cfg.realizations == 3);
        CHECK(cfg.multisine.n_samples == 1024);
        CHECK(cfg.gp.sigma_eps2 == 1.0);
        CHECK(cfg.margin == 0.05);
    }
}
