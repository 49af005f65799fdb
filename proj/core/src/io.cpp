#include "lcsf/io.hpp"

#include "lcsf/errors.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace lcsf {

namespace {

/// Strict object reader: every key must be consumed or finish() throws.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string context)
        : j_(j), context_(std::move(context)) {
        if (!j_.is_object())
            throw ConfigError(context_ + ": expected a JSON object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        auto it = j_.find(key);
        if (it == j_.end()) return;
        handled_.insert(key);
        try {
            out = it->template get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(context_ + "." + key + ": " + e.what());
        }
    }

    /// Nested object, or nullptr when absent.
    const Json* child(const char* key) {
        auto it = j_.find(key);
        if (it == j_.end()) return nullptr;
        handled_.insert(key);
        return &*it;
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (!handled_.contains(item.key()))
                throw ConfigError(context_ + ": unknown key '" + item.key() + "'");
    }

    const std::string& context() const { return context_; }

private:
    const Json& j_;
    std::string context_;
    std::set<std::string> handled_;
};

template <typename Enum>
struct EnumName {
    Enum value;
    const char* name;
};

template <typename Enum, std::size_t N>
std::string enum_to_string(Enum value, const EnumName<Enum> (&table)[N]) {
    for (const auto& entry : table)
        if (entry.value == value) return entry.name;
    throw ConfigError("unmapped enum value");
}

template <typename Enum, std::size_t N>
Enum enum_from_string(const std::string& name, const EnumName<Enum> (&table)[N],
                      const std::string& context) {
    for (const auto& entry : table)
        if (name == entry.name) return entry.value;
    throw ConfigError(context + ": unknown value '" + name + "'");
}

const EnumName<DyUnit> kDyUnitNames[] = {{DyUnit::velocity, "velocity"},
                                         {DyUnit::increment, "increment"}};
const EnumName<DesignModelKind> kDesignModelNames[] = {
    {DesignModelKind::linear, "linear"}, {DesignModelKind::nonlinear, "nonlinear"}};
const EnumName<LinearizationMode> kLinearizationNames[] = {
    {LinearizationMode::jittered, "jittered"}, {LinearizationMode::origin, "origin"}};
const EnumName<ExperimentCost> kCostNames[] = {{ExperimentCost::power, "power"},
                                               {ExperimentCost::max_abs, "max_abs"}};
const EnumName<DesignMode> kModeNames[] = {{DesignMode::classical, "classical"},
                                           {DesignMode::least_costly, "least_costly"}};

void multisine_from_json(const Json& j, MultisineConfig& config,
                         const std::string& context) {
    ObjectReader r(j, context);
    r.get("f_s", config.f_s);
    r.get("n_samples", config.n_samples);
    std::vector<int> lines;
    r.get("line_indices", lines);
    if (const Json* range = r.child("line_range")) {
        ObjectReader rr(*range, context + ".line_range");
        int lo = 0, hi = 0, stride = 1;
        rr.get("min", lo);
        rr.get("max", hi);
        rr.get("stride", stride);
        rr.finish();
        if (!lines.empty())
            throw ConfigError(context + ": give line_indices or line_range, not both");
        lines = MultisineConfig::make_line_range(lo, hi, stride);
    }
    if (!lines.empty()) config.line_indices = std::move(lines);
    r.finish();
}

Json multisine_to_json(const MultisineConfig& config) {
    return Json{{"f_s", config.f_s},
                {"n_samples", config.n_samples},
                {"line_indices", config.line_indices}};
}

void gp_from_json(const Json& j, GpConfig& config, const std::string& context) {
    ObjectReader r(j, context);
    r.get("sigma_f2", config.sigma_f2);
    r.get("lambda_diag", config.lambda_diag);
    r.get("sigma_eps2", config.sigma_eps2);
    r.get("jitter_initial_rel", config.jitter_initial_rel);
    r.get("jitter_max_rel", config.jitter_max_rel);
    r.finish();
}

Json gp_to_json(const GpConfig& config) {
    return Json{{"sigma_f2", config.sigma_f2},
                {"lambda_diag", config.lambda_diag},
                {"sigma_eps2", config.sigma_eps2},
                {"jitter_initial_rel", config.jitter_initial_rel},
                {"jitter_max_rel", config.jitter_max_rel}};
}

void msd_from_json(const Json& j, MsdParams& params, const std::string& context) {
    ObjectReader r(j, context);
    r.get("m", params.m);
    r.get("s", params.s);
    r.get("c", params.c);
    r.get("l", params.l);
    r.get("a", params.a);
    r.finish();
}

Json msd_to_json(const MsdParams& params) {
    return Json{{"m", params.m}, {"s", params.s}, {"c", params.c},
                {"l", params.l}, {"a", params.a}};
}

void region_from_json(const Json& j, RegionOfInterest& region,
                      const std::string& context) {
    ObjectReader r(j, context);
    std::vector<double> lower, upper;
    r.get("lower", lower);
    r.get("upper", upper);
    r.finish();
    if (!lower.empty())
        region.lower = Eigen::Map<const Eigen::VectorXd>(lower.data(),
                                                         static_cast<Eigen::Index>(lower.size()));
    if (!upper.empty())
        region.upper = Eigen::Map<const Eigen::VectorXd>(upper.data(),
                                                         static_cast<Eigen::Index>(upper.size()));
}

Json region_to_json(const RegionOfInterest& region) {
    std::vector<double> lower(region.lower.data(), region.lower.data() + region.lower.size());
    std::vector<double> upper(region.upper.data(), region.upper.data() + region.upper.size());
    return Json{{"lower", lower}, {"upper", upper}};
}

void solver_from_json(const Json& j, SolverConfig& config, const std::string& context) {
    ObjectReader r(j, context);
    r.get("fd_step", config.fd_step);
    r.get("cost_rel_tol", config.cost_rel_tol);
    r.get("cost_tol_window", config.cost_tol_window);
    r.get("step_tol", config.step_tol);
    r.get("max_inner_iterations", config.max_inner_iterations);
    r.get("max_outer_iterations", config.max_outer_iterations);
    r.get("constraint_rel_tol", config.constraint_rel_tol);
    r.get("penalty_initial", config.penalty_initial);
    r.get("penalty_growth", config.penalty_growth);
    r.get("penalty_max", config.penalty_max);
    r.get("max_evaluations", config.max_evaluations);
    r.get("max_line_search_rejections", config.max_line_search_rejections);
    r.get("max_line_search_trials", config.max_line_search_trials);
    r.get("penalty_only", config.penalty_only);
    r.get("gradient_threads", config.gradient_threads);
    r.finish();
}

Json solver_to_json(const SolverConfig& config) {
    return Json{{"fd_step", config.fd_step},
                {"cost_rel_tol", config.cost_rel_tol},
                {"cost_tol_window", config.cost_tol_window},
                {"step_tol", config.step_tol},
                {"max_inner_iterations", config.max_inner_iterations},
                {"max_outer_iterations", config.max_outer_iterations},
                {"constraint_rel_tol", config.constraint_rel_tol},
                {"penalty_initial", config.penalty_initial},
                {"penalty_growth", config.penalty_growth},
                {"penalty_max", config.penalty_max},
                {"max_evaluations", config.max_evaluations},
                {"max_line_search_rejections", config.max_line_search_rejections},
                {"max_line_search_trials", config.max_line_search_trials},
                {"penalty_only", config.penalty_only},
                {"gradient_threads", config.gradient_threads}};
}

void train_from_json(const Json& j, TrainConfig& config, const std::string& context) {
    ObjectReader r(j, context);
    r.get("max_iterations", config.max_iterations);
    r.get("lambda_init", config.lambda_init);
    r.get("lambda_increase", config.lambda_increase);
    r.get("lambda_decrease", config.lambda_decrease);
    r.get("lambda_max", config.lambda_max);
    r.get("cost_rel_tol", config.cost_rel_tol);
    r.get("grad_tol", config.grad_tol);
    r.get("restarts", config.restarts);
    r.get("init_scale", config.init_scale);
    r.finish();
}

Json train_to_json(const TrainConfig& config) {
    return Json{{"max_iterations", config.max_iterations},
                {"lambda_init", config.lambda_init},
                {"lambda_increase", config.lambda_increase},
                {"lambda_decrease", config.lambda_decrease},
                {"lambda_max", config.lambda_max},
                {"cost_rel_tol", config.cost_rel_tol},
                {"grad_tol", config.grad_tol},
                {"restarts", config.restarts},
                {"init_scale", config.init_scale}};
}

void bounds_from_json(const Json& j, AmplitudeBounds& bounds, const std::string& context) {
    ObjectReader r(j, context);
    r.get("lo", bounds.lo);
    r.get("hi", bounds.hi);
    r.finish();
}

} // namespace

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        Json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void save_json(const Json& value, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << value.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path);
}

void study_config_from_json(const Json& j, StudyConfig& config) {
    ObjectReader r(j, "config");
    r.get("realizations", config.realizations);
    r.get("master_seed", config.master_seed);
    r.get("output_dir", config.output_dir);
    r.get("jobs", config.jobs);
    if (const Json* c = r.child("multisine"))
        multisine_from_json(*c, config.multisine, "config.multisine");
    r.get("initial_amplitude", config.initial_amplitude);
    if (const Json* c = r.child("amplitude_bounds"))
        bounds_from_json(*c, config.bounds, "config.amplitude_bounds");
    if (const Json* c = r.child("msd")) msd_from_json(*c, config.msd, "config.msd");
    if (const Json* c = r.child("gp")) gp_from_json(*c, config.gp, "config.gp");
    if (const Json* c = r.child("region"))
        region_from_json(*c, config.region, "config.region");
    r.get("anchor_counts", config.anchor_counts);
    r.get("eval_counts", config.eval_counts);
    r.get("margin", config.margin);
    if (const Json* c = r.child("solver"))
        solver_from_json(*c, config.solver, "config.solver");
    if (const Json* c = r.child("train")) train_from_json(*c, config.train, "config.train");
    r.get("warmup_periods", config.warmup_periods);

    std::string text;
    text.clear();
    r.get("dy_unit", text);
    if (!text.empty())
        config.dy_unit = enum_from_string(text, kDyUnitNames, "config.dy_unit");
    text.clear();
    r.get("design_model", text);
    if (!text.empty())
        config.design_model =
            enum_from_string(text, kDesignModelNames, "config.design_model");
    text.clear();
    r.get("linearization", text);
    if (!text.empty())
        config.linearization =
            enum_from_string(text, kLinearizationNames, "config.linearization");
    r.get("linearization_jitter", config.linearization_jitter);
    text.clear();
    r.get("cost", text);
    if (!text.empty()) config.cost_kind = enum_from_string(text, kCostNames, "config.cost");

    if (const Json* c = r.child("test_suite")) {
        ObjectReader t(*c, "config.test_suite");
        t.get("n_test", config.n_test);
        t.get("f_min", config.test_f_min);
        t.get("f_max", config.test_f_max);
        t.get("multisine_full", config.test_amplitude_full);
        t.get("multisine_reduced", config.test_amplitude_reduced);
        t.get("sweep_amplitude", config.sweep_amplitude);
        t.get("white_variance", config.white_variance);
        t.finish();
    }
    r.finish();
}

Json study_config_to_json(const StudyConfig& config) {
    Json j;
    j["realizations"] = config.realizations;
    j["master_seed"] = config.master_seed;
    j["output_dir"] = config.output_dir;
    j["jobs"] = config.jobs;
    j["multisine"] = multisine_to_json(config.multisine);
    j["initial_amplitude"] = config.initial_amplitude;
    j["amplitude_bounds"] = Json{{"lo", config.bounds.lo}, {"hi", config.bounds.hi}};
    j["msd"] = msd_to_json(config.msd);
    j["gp"] = gp_to_json(config.gp);
    j["region"] = region_to_json(config.region);
    j["anchor_counts"] = config.anchor_counts;
    j["eval_counts"] = config.eval_counts;
    j["margin"] = config.margin;
    j["solver"] = solver_to_json(config.solver);
    j["train"] = train_to_json(config.train);
    j["warmup_periods"] = config.warmup_periods;
    j["dy_unit"] = enum_to_string(config.dy_unit, kDyUnitNames);
    j["design_model"] = enum_to_string(config.design_model, kDesignModelNames);
    j["linearization"] = enum_to_string(config.linearization, kLinearizationNames);
    j["linearization_jitter"] = config.linearization_jitter;
    j["cost"] = enum_to_string(config.cost_kind, kCostNames);
    j["test_suite"] = Json{{"n_test", config.n_test},
                           {"f_min", config.test_f_min},
                           {"f_max", config.test_f_max},
                           {"multisine_full", config.test_amplitude_full},
                           {"multisine_reduced", config.test_amplitude_reduced},
                           {"sweep_amplitude", config.sweep_amplitude},
                           {"white_variance", config.white_variance}};
    return j;
}

Json signal_params_to_json(const SignalParams& params) {
    return Json{{"amplitudes", params.amplitudes}, {"phases", params.phases}};
}

SignalParams signal_params_from_json(const Json& j) {
    ObjectReader r(j, "theta");
    SignalParams params;
    r.get("amplitudes", params.amplitudes);
    r.get("phases", params.phases);
    r.finish();
    if (params.amplitudes.size() != params.phases.size())
        throw ConfigError("theta: amplitude/phase lengths differ");
    return params;
}

Json design_outcome_to_json(const DesignOutcome& outcome, DesignMode mode) {
    Json j;
    j["mode"] = enum_to_string(mode, kModeNames);
    j["theta"] = signal_params_to_json(outcome.theta);
    j["v_cost"] = outcome.v_cost;
    j["power"] = outcome.power;
    j["covering_radius"] = outcome.covering_radius;
    if (mode == DesignMode::least_costly) j["gamma"] = outcome.gamma;
    j["iterations"] = outcome.iterations;
    j["evaluations"] = outcome.evaluations;
    j["converged"] = outcome.converged;
    j["constraint_violation"] = outcome.constraint_violation;
    return j;
}

Json noe_model_to_json(const NoeModel& model) {
    Json j;
    j["m_y"] = model.m_y;
    j["m_u"] = model.m_u;
    j["hidden"] = model.hidden;
    j["activation"] = "sigmoid";
    j["scaling"] = Json{{"u_mean", model.scaling.u_mean},
                        {"u_std", model.scaling.u_std},
                        {"y_mean", model.scaling.y_mean},
                        {"y_std", model.scaling.y_std}};
    std::vector<std::vector<double>> w_hidden(static_cast<std::size_t>(model.hidden));
    for (int h = 0; h < model.hidden; ++h) {
        w_hidden[static_cast<std::size_t>(h)].resize(static_cast<std::size_t>(model.n_x()));
        for (int i = 0; i < model.n_x(); ++i)
            w_hidden[static_cast<std::size_t>(h)][static_cast<std::size_t>(i)] =
                model.w_hidden(h, i);
    }
    j["w_hidden"] = w_hidden;
    j["b_hidden"] = std::vector<double>(model.b_hidden.data(),
                                        model.b_hidden.data() + model.b_hidden.size());
    j["w_out"] =
        std::vector<double>(model.w_out.data(), model.w_out.data() + model.w_out.size());
    j["b_out"] = model.b_out;
    return j;
}

NoeModel noe_model_from_json(const Json& j) {
    ObjectReader r(j, "model");
    NoeModel model;
    r.get("m_y", model.m_y);
    r.get("m_u", model.m_u);
    r.get("hidden", model.hidden);
    std::string activation = "sigmoid";
    r.get("activation", activation);
    if (activation != "sigmoid")
        throw ConfigError("model.activation: only 'sigmoid' is supported");
    if (const Json* c = r.child("scaling")) {
        ObjectReader s(*c, "model.scaling");
        s.get("u_mean", model.scaling.u_mean);
        s.get("u_std", model.scaling.u_std);
        s.get("y_mean", model.scaling.y_mean);
        s.get("y_std", model.scaling.y_std);
        s.finish();
    }
    std::vector<std::vector<double>> w_hidden;
    std::vector<double> b_hidden, w_out;
    r.get("w_hidden", w_hidden);
    r.get("b_hidden", b_hidden);
    r.get("w_out", w_out);
    r.get("b_out", model.b_out);
    r.finish();

    if (static_cast<int>(w_hidden.size()) != model.hidden ||
        static_cast<int>(b_hidden.size()) != model.hidden ||
        static_cast<int>(w_out.size()) != model.hidden)
        throw ConfigError("model: weight shapes do not match the architecture");
    model.w_hidden.resize(model.hidden, model.n_x());
    for (int h = 0; h < model.hidden; ++h) {
        if (static_cast<int>(w_hidden[static_cast<std::size_t>(h)].size()) != model.n_x())
            throw ConfigError("model: hidden weight row length mismatch");
        for (int i = 0; i < model.n_x(); ++i)
            model.w_hidden(h, i) = w_hidden[static_cast<std::size_t>(h)][static_cast<std::size_t>(i)];
    }
    model.b_hidden =
        Eigen::Map<const Eigen::VectorXd>(b_hidden.data(), static_cast<Eigen::Index>(b_hidden.size()));
    model.w_out =
        Eigen::Map<const Eigen::RowVectorXd>(w_out.data(), static_cast<Eigen::Index>(w_out.size()));
    return model;
}

namespace {

Json record_to_json(const RealizationRecord& rec) {
    Json j;
    j["index"] = rec.index;
    j["seed"] = rec.seed;
    j["ok"] = rec.ok;
    j["failure_stage"] = rec.failure_stage;
    j["linearization_point"] = rec.linearization_point;
    j["theta_ini"] = signal_params_to_json(rec.theta_ini);
    j["theta_cl"] = signal_params_to_json(rec.theta_cl);
    j["theta_lc"] = signal_params_to_json(rec.theta_lc);
    j["power"] = Json{{"initial", rec.power_ini},
                      {"classical", rec.power_cl},
                      {"least_costly", rec.power_lc}};
    j["v_cost"] = Json{{"initial", rec.v_ini},
                       {"classical", rec.v_cl},
                       {"least_costly", rec.v_lc}};
    j["gamma0"] = rec.gamma0;
    j["gamma"] = rec.gamma;
    j["covering_radius"] = Json{{"initial", rec.rho_ini},
                                {"classical", rec.rho_cl},
                                {"least_costly", rec.rho_lc}};
    Json rmse;
    for (int d = 0; d < kDesignCount; ++d) {
        const auto& row = rec.rmse[static_cast<std::size_t>(d)];
        rmse[design_name(d)] = std::vector<double>(row.begin(), row.end());
    }
    j["rmse"] = rmse;
    auto diag = [](const SolveDiagnostics& d) {
        return Json{{"iterations", d.iterations},
                    {"evaluations", d.evaluations},
                    {"converged", d.converged},
                    {"constraint_violation", d.constraint_violation}};
    };
    j["solver"] = Json{{"classical", diag(rec.classical)},
                       {"least_costly", diag(rec.least_costly)}};
    j["lm_traces_monotone"] = rec.lm_traces_monotone;
    return j;
}

RealizationRecord record_from_json(const Json& j) {
    ObjectReader r(j, "record");
    RealizationRecord rec;
    r.get("index", rec.index);
    r.get("seed", rec.seed);
    r.get("ok", rec.ok);
    r.get("failure_stage", rec.failure_stage);
    r.get("linearization_point", rec.linearization_point);
    if (const Json* c = r.child("theta_ini")) rec.theta_ini = signal_params_from_json(*c);
    if (const Json* c = r.child("theta_cl")) rec.theta_cl = signal_params_from_json(*c);
    if (const Json* c = r.child("theta_lc")) rec.theta_lc = signal_params_from_json(*c);
    if (const Json* c = r.child("power")) {
        ObjectReader p(*c, "record.power");
        p.get("initial", rec.power_ini);
        p.get("classical", rec.power_cl);
        p.get("least_costly", rec.power_lc);
        p.finish();
    }
    if (const Json* c = r.child("v_cost")) {
        ObjectReader p(*c, "record.v_cost");
        p.get("initial", rec.v_ini);
        p.get("classical", rec.v_cl);
        p.get("least_costly", rec.v_lc);
        p.finish();
    }
    r.get("gamma0", rec.gamma0);
    r.get("gamma", rec.gamma);
    if (const Json* c = r.child("covering_radius")) {
        ObjectReader p(*c, "record.covering_radius");
        p.get("initial", rec.rho_ini);
        p.get("classical", rec.rho_cl);
        p.get("least_costly", rec.rho_lc);
        p.finish();
    }
    if (const Json* c = r.child("rmse")) {
        ObjectReader p(*c, "record.rmse");
        for (int d = 0; d < kDesignCount; ++d) {
            std::vector<double> row;
            p.get(design_name(d), row);
            if (static_cast<int>(row.size()) != kTestFamilyCount)
                throw ConfigError("record.rmse: expected 4 values per design");
            for (int f = 0; f < kTestFamilyCount; ++f)
                rec.rmse[static_cast<std::size_t>(d)][static_cast<std::size_t>(f)] =
                    row[static_cast<std::size_t>(f)];
        }
        p.finish();
    }
    if (const Json* c = r.child("solver")) {
        ObjectReader p(*c, "record.solver");
        auto diag = [&](const char* key, SolveDiagnostics& d) {
            if (const Json* cc = p.child(key)) {
                ObjectReader q(*cc, std::string("record.solver.") + key);
                q.get("iterations", d.iterations);
                q.get("evaluations", d.evaluations);
                q.get("converged", d.converged);
                q.get("constraint_violation", d.constraint_violation);
                q.finish();
            }
        };
        diag("classical", rec.classical);
        diag("least_costly", rec.least_costly);
        p.finish();
    }
    r.get("lm_traces_monotone", rec.lm_traces_monotone);
    r.finish();
    return rec;
}

} // namespace

Json study_result_to_json(const StudyResult& result) {
    const StudyAggregates agg = aggregate(result);
    Json j;
    j["environment"] =
        Json{{"tool", "lcsf"},
             {"version", "0.1.0"},
             {"seed_derivation",
              "splitmix64 chain over (master_seed, realization index, stage tag)"}};
    j["config"] = study_config_to_json(result.config);
    j["test_families"] = result.test_names;
    Json med;
    for (int d = 0; d < kDesignCount; ++d) {
        const auto& row = agg.median_rmse[static_cast<std::size_t>(d)];
        med[design_name(d)] = std::vector<double>(row.begin(), row.end());
    }
    j["aggregates"] =
        Json{{"successes", agg.successes},
             {"failures", agg.failures},
             {"mean_power", Json{{"initial", agg.mean_power_ini},
                                 {"classical", agg.mean_power_cl},
                                 {"least_costly", agg.mean_power_lc}}},
             {"mean_v_cost", Json{{"classical", agg.mean_v_cl},
                                  {"least_costly", agg.mean_v_lc}}},
             {"mean_covering_radius", Json{{"initial", agg.mean_rho_ini},
                                           {"classical", agg.mean_rho_cl},
                                           {"least_costly", agg.mean_rho_lc}}},
             {"median_rmse", med}};
    Json records = Json::array();
    for (const auto& rec : result.records) records.push_back(record_to_json(rec));
    j["records"] = records;
    return j;
}

StudyResult study_result_from_json(const Json& j) {
    ObjectReader r(j, "study");
    StudyResult result;
    if (const Json* c = r.child("config")) study_config_from_json(*c, result.config);
    r.get("test_families", result.test_names);
    r.child("environment");  // informational
    r.child("aggregates");   // always recomputed from the records
    if (const Json* c = r.child("records")) {
        if (!c->is_array()) throw ConfigError("study.records: expected an array");
        for (const auto& item : *c) result.records.push_back(record_from_json(item));
    }
    r.finish();
    return result;
}

namespace {

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

} // namespace

void write_signal_csv(const std::string& path, const std::vector<double>& u) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "k,u\n";
    for (std::size_t k = 0; k < u.size(); ++k)
        out << k << ',' << format_double(u[k]) << '\n';
    if (!out) throw IoError("write failed for " + path);
}

std::vector<double> read_signal_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const std::size_t col = table.column("u");
    std::vector<double> u;
    u.reserve(table.rows.size());
    for (const auto& row : table.rows) u.push_back(row[col]);
    return u;
}

void write_dataset_csv(const std::string& path, const SignalDataset& data) {
    if (data.u.size() != data.y.size() || data.u.size() != data.dy.size())
        throw ConfigError("dataset columns differ in length");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "k,u,y,dy\n";
    for (std::size_t k = 0; k < data.u.size(); ++k)
        out << k << ',' << format_double(data.u[k]) << ',' << format_double(data.y[k])
            << ',' << format_double(data.dy[k]) << '\n';
    if (!out) throw IoError("write failed for " + path);
}

SignalDataset read_dataset_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const std::size_t cu = table.column("u");
    const std::size_t cy = table.column("y");
    const std::size_t cdy = table.column("dy");
    SignalDataset data;
    data.u.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        data.u.push_back(row[cu]);
        data.y.push_back(row[cy]);
        data.dy.push_back(row[cdy]);
    }
    return data;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw ConfigError("CSV is missing column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    CsvTable table;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::stringstream ss(line);
        std::string cell;
        if (!have_header) {
            while (std::getline(ss, cell, ',')) table.columns.push_back(cell);
            have_header = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": cannot parse '" + cell + "' as a number");
            }
        }
        if (row.size() != table.columns.size())
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": column count mismatch");
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw ConfigError(path + ": empty CSV");
    return table;
}

} // namespace lcsf
