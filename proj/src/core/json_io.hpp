// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include "cluster.hpp"
#include "dataset.hpp"
#include "experiments.hpp"
#include "optimize.hpp"
#include "types.hpp"

namespace vf {

// Conversions throw Error(errc::config, ...) on malformed documents. Unknown
// keys are ignored; missing keys fall back to the struct defaults unless noted.

nlohmann::json program_to_json(const LoadingProgram& p);
LoadingProgram program_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const MaterialModel& m);
MaterialModel model_from_json(const nlohmann::json& j);

nlohmann::json dataset_meta_to_json(const DatasetMeta& m);
DatasetMeta dataset_meta_from_json(const nlohmann::json& j);

nlohmann::json fit_config_to_json(const FitConfig& c);
FitConfig fit_config_from_json(const nlohmann::json& j);

nlohmann::json cluster_config_to_json(const ClusterConfig& c);
ClusterConfig cluster_config_from_json(const nlohmann::json& j);

nlohmann::json fit_result_to_json(const FitResult& r);
FitResult fit_result_from_json(const nlohmann::json& j);

nlohmann::json cluster_report_to_json(const ClusterReport& r);

nlohmann::json sweep_spec_to_json(const SweepSpec& s);
SweepSpec sweep_spec_from_json(const nlohmann::json& j);

nlohmann::json rate_spec_to_json(const RateComparisonSpec& s);
RateComparisonSpec rate_spec_from_json(const nlohmann::json& j);

nlohmann::json truncation_spec_to_json(const TruncationSpec& s);
TruncationSpec truncation_spec_from_json(const nlohmann::json& j);

nlohmann::json parse_json(const std::string& text, const std::string& what);

}  // namespace vf
