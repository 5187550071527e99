// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON serialization. Every document carries "schema": 1. Matrices are
// stored row-major as flat arrays next to their shape; doubles round-trip
// bit-exactly. Parsers throw InvalidArgument on missing or ill-typed fields.

#ifndef DYNSENSE_IO_H_
#define DYNSENSE_IO_H_

#include <ostream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "dynsense/allocator.h"
#include "dynsense/controller.h"
#include "dynsense/dictionary.h"
#include "dynsense/experiments.h"
#include "dynsense/recovery.h"
#include "dynsense/sensing.h"
#include "dynsense/simulator.h"

namespace dynsense {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json matrix_to_json(const Eigen::MatrixXd& m);  // {"rows", "cols", "data"}
Eigen::MatrixXd matrix_from_json(const Json& j);
Json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j);

Json to_json(const StructuredDictionary& dictionary);
StructuredDictionary dictionary_from_json(const Json& j);

Json to_json(const FeasibleFamily& family);
FeasibleFamily family_from_json(const Json& j);

Json to_json(const SupportSet& support);
SupportSet support_from_json(const Json& j);

Json to_json(const MeasurementOperator& op);
MeasurementOperator operator_from_json(const Json& j);

Json to_json(const Sketch& sketch);
Sketch sketch_from_json(const Json& j);

Json to_json(const RecoveryConfig& config);
RecoveryConfig recovery_config_from_json(const Json& j);

Json to_json(const RecoveryResult& result);
RecoveryResult recovery_result_from_json(const Json& j);

// Keys: m_base, gamma, m_min, m_max, beta_m, rho.
Json to_json(const ControllerConfig& config);
ControllerConfig controller_config_from_json(const Json& j);

Json to_json(const StabilityReport& report);

Json to_json(const PromptFamily& family);
PromptFamily prompt_family_from_json(const Json& j);

Json to_json(const GroundTruthProcess& process);
GroundTruthProcess process_from_json(const Json& j);

Json to_json(const EntropyChannel& channel);
EntropyChannel channel_from_json(const Json& j);

Json to_json(const LoopOptions& options);
LoopOptions loop_options_from_json(const Json& j);

Json to_json(const TraceSummary& summary);

Json to_json(const PromptInstance& instance);
PromptInstance prompt_instance_from_json(const Json& j);

Json to_json(const LatencyTable& table);
LatencyTable latency_table_from_json(const Json& j);

Json to_json(const JointConfig& config);
JointConfig joint_config_from_json(const Json& j);

Json to_json(const JointProblem& problem);
JointProblem joint_problem_from_json(const Json& j);

Json to_json(const JointSolution& solution);

Json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const Json& j);

// iteration,objective,residual_norm; residual_norm is filled on the last row.
void write_objective_trace_csv(const RecoveryResult& result, std::ostream& out);

}  // namespace dynsense

#endif  // DYNSENSE_IO_H_
