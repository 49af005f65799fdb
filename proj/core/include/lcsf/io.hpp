#pragma once

#include "lcsf/design.hpp"
#include "lcsf/harness.hpp"
#include "lcsf/ident.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace lcsf {

using Json = nlohmann::ordered_json;

/// Reads a JSON document; throws IoError on filesystem problems and
/// ConfigError on malformed JSON.
Json load_json(const std::string& path);
void save_json(const Json& value, const std::string& path);

/// Overlays the keys present in `j` onto `config`; absent keys keep their
/// defaults, unknown keys are rejected.
void study_config_from_json(const Json& j, StudyConfig& config);
Json study_config_to_json(const StudyConfig& config);

Json signal_params_to_json(const SignalParams& params);
SignalParams signal_params_from_json(const Json& j);

Json design_outcome_to_json(const DesignOutcome& outcome, DesignMode mode);

Json noe_model_to_json(const NoeModel& model);
NoeModel noe_model_from_json(const Json& j);

Json study_result_to_json(const StudyResult& result);
StudyResult study_result_from_json(const Json& j);

/// CSV with columns (k, u).
void write_signal_csv(const std::string& path, const std::vector<double>& u);
std::vector<double> read_signal_csv(const std::string& path);

/// CSV with columns (k, u, y, dy); dy is scaled by dy_scale as configured.
struct SignalDataset {
    std::vector<double> u;
    std::vector<double> y;
    std::vector<double> dy;
};
void write_dataset_csv(const std::string& path, const SignalDataset& data);
SignalDataset read_dataset_csv(const std::string& path);

/// Generic numeric CSV reader: first non-comment line is the header.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Index of a named column; throws ConfigError when missing.
    std::size_t column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

} // namespace lcsf
