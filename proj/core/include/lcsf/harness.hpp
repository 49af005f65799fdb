#pragma once

#include "lcsf/design.hpp"
#include "lcsf/gp.hpp"
#include "lcsf/ident.hpp"
#include "lcsf/plant.hpp"
#include "lcsf/signals.hpp"
#include "lcsf/spacefill.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lcsf {

/// Unit of the second feature dimension: first-difference velocity
/// (dy = f_s * (y(k) - y(k-1)), default) or the raw increment.
enum class DyUnit { velocity, increment };

enum class DesignModelKind { linear, nonlinear };

/// How the per-realization linear design model varies: spring slope taken at
/// a position drawn uniformly from [-jitter, jitter], or fixed at the origin.
enum class LinearizationMode { jittered, origin };

/// One simulated test trajectory (input and noise-free plant output, aligned
/// by sample index).
struct TestDataset {
    std::string name;
    std::vector<double> u;
    std::vector<double> y;
};

/// Full description of a Monte Carlo study; every field has the schema
/// default, so an empty config file reproduces the reference setup.
struct StudyConfig {
    int realizations = 50;
    std::uint64_t master_seed = 1;
    std::string output_dir = "out";
    int jobs = 1;

    MultisineConfig multisine;
    double initial_amplitude = 8.0;
    AmplitudeBounds bounds;
    MsdParams msd;
    GpConfig gp;
    RegionOfInterest region;
    std::vector<int> anchor_counts{5, 5};
    std::vector<int> eval_counts{101, 101};
    double margin = 0.05;
    SolverConfig solver;
    TrainConfig train;
    int warmup_periods = 2;
    DyUnit dy_unit = DyUnit::velocity;
    DesignModelKind design_model = DesignModelKind::linear;
    LinearizationMode linearization = LinearizationMode::jittered;
    double linearization_jitter = 0.02;
    ExperimentCost cost_kind = ExperimentCost::power;

    std::size_t n_test = std::size_t{1} << 16;
    double test_f_min = 1.0;
    double test_f_max = 10.0;
    double test_amplitude_full = 8.0;
    double test_amplitude_reduced = 4.0;
    double sweep_amplitude = 6.0;
    double white_variance = 19.0;

    /// Feature scaling implied by dy_unit.
    double dy_scale() const {
        return dy_unit == DyUnit::velocity ? multisine.f_s : 1.0;
    }

    void validate() const;

    /// Reduced-size profile: R = 10, N = 512, N_test = 2^13, 61x61 radius
    /// grid, tightened solver caps. Runs a full study on a workstation.
    static StudyConfig desk_profile();

    /// Full-size profile matching the reference study (R = 50, N = 1024,
    /// N_test = 2^16).
    static StudyConfig paper_profile();
};

struct SolveDiagnostics {
    int iterations = 0;
    long evaluations = 0;
    bool converged = false;
    double constraint_violation = 0.0;
};

inline constexpr int kDesignCount = 3;  // initial, classical, least costly
inline constexpr int kTestFamilyCount = 4;

inline const char* design_name(int d) {
    static const char* names[kDesignCount] = {"initial", "classical", "least_costly"};
    return names[d];
}

/// Everything recorded for one Monte Carlo realization.
struct RealizationRecord {
    int index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string failure_stage;  // empty when ok

    double linearization_point = 0.0;
    SignalParams theta_ini, theta_cl, theta_lc;
    double power_ini = 0.0, power_cl = 0.0, power_lc = 0.0;
    double v_ini = 0.0, v_cl = 0.0, v_lc = 0.0;  // design-model V-costs
    double gamma0 = 0.0, gamma = 0.0;
    double rho_ini = 0.0, rho_cl = 0.0, rho_lc = 0.0;  // validation datasets
    std::array<std::array<double, kTestFamilyCount>, kDesignCount> rmse{};
    SolveDiagnostics classical, least_costly;
    bool lm_traces_monotone = true;  // accepted-cost sequences of all three fits
};

struct StudyResult {
    StudyConfig config;
    std::vector<std::string> test_names;
    std::vector<RealizationRecord> records;
};

/// Study-level summaries, always recomputed from the stored records.
struct StudyAggregates {
    int successes = 0;
    int failures = 0;
    double mean_power_ini = 0.0, mean_power_cl = 0.0, mean_power_lc = 0.0;
    double mean_v_cl = 0.0, mean_v_lc = 0.0;
    double mean_rho_ini = 0.0, mean_rho_cl = 0.0, mean_rho_lc = 0.0;
    std::array<std::array<double, kTestFamilyCount>, kDesignCount> median_rmse{};
};

StudyAggregates aggregate(const StudyResult& result);

/// Initial multisine parameters of one realization: amplitudes at the
/// configured initial value, phases drawn uniformly from [0, 2*pi).
SignalParams draw_initial_params(const StudyConfig& config, int realization_index);

/// Design model of one realization: the (optionally jittered) linearization
/// or the nonlinear plant itself. Reports the linearization point used.
IoModel build_design_model(const StudyConfig& config, int realization_index,
                           double* linearization_point = nullptr);

/// Assembles a classical-mode design problem from the study configuration.
DesignProblem make_design_problem(const StudyConfig& config, const IoModel& model,
                                  const SignalParams& theta0);

/// The four validation families simulated on the nonlinear plant:
/// dense-band multisines at full and reduced amplitude, a logarithmic sweep
/// and uniform white noise. Deterministic in the master seed.
std::vector<TestDataset> generate_test_suite(const StudyConfig& config);

/// Runs one realization end to end: draw phases, build the design model,
/// classical solve, feasibility threshold, least-costly solve, nonlinear
/// validation datasets, three identification fits and all test RMSEs.
/// Stage failures are recorded in the returned record, not thrown.
RealizationRecord run_realization(int index, const StudyConfig& config,
                                  const std::vector<TestDataset>& tests);

/// Full Monte Carlo study; realizations are independent and may run in a
/// worker pool (config.jobs) without changing any result.
StudyResult run_study(const StudyConfig& config);

/// Writes study.json, table1.csv, designs.csv and the SVG plots.
void write_report(const StudyResult& result, const std::string& out_dir);

/// Median of a copy of the values (average of the central pair when even).
double median(std::vector<double> values);

} // namespace lcsf
