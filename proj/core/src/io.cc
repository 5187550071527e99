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

#include "dynsense/io.h"

#include <string>
#include <vector>

#include "dynsense/csv.h"
#include "dynsense/error.h"

namespace dynsense {
namespace {

void check_object(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("expected a JSON object");
  if (j.contains("schema")) {
    if (!j["schema"].is_number_integer() || j["schema"].get<int>() != kSchemaVersion) {
      throw InvalidArgument("unsupported schema version");
    }
  }
}

template <class T>
T req(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("missing field: ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw InvalidArgument(std::string("ill-typed field: ") + key);
  }
}

template <class T>
T opt(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return req<T>(j, key);
}

Json support_list(const std::vector<SupportSet>& sets) {
  Json out = Json::array();
  for (const auto& s : sets) out.push_back(s.members());
  return out;
}

std::vector<SupportSet> support_list_from(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("expected an array of supports");
  std::vector<SupportSet> out;
  for (const auto& s : j) out.push_back(support_from_json(s));
  return out;
}

}  // namespace

Json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = req<Eigen::Index>(j, "rows");
  const auto cols = req<Eigen::Index>(j, "cols");
  const auto data = req<std::vector<double>>(j, "data");
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw InvalidArgument("matrix data length does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<size_t>(r * cols + c)];
  }
  return m;
}

Json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("expected a numeric array");
  std::vector<double> data;
  try {
    data = j.get<std::vector<double>>();
  } catch (const Json::exception&) {
    throw InvalidArgument("expected a numeric array");
  }
  return Eigen::Map<Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

// --- dictionary ------------------------------------------------------------

Json to_json(const StructuredDictionary& dictionary) {
  Json units = Json::array();
  for (const auto& u : dictionary.units()) {
    units.push_back({{"id", u.id}, {"kind", std::string(to_string(u.kind))}, {"weight", u.weight}});
  }
  const Json entries = matrix_to_json(dictionary.entries());
  return {{"schema", kSchemaVersion}, {"D", dictionary.D()},       {"G", dictionary.G()},
          {"groups", dictionary.groups()}, {"entries", entries["data"]}, {"units", units}};
}

StructuredDictionary dictionary_from_json(const Json& j) {
  check_object(j);
  const int D = req<int>(j, "D");
  const int G = req<int>(j, "G");
  Json shaped = {{"rows", D}, {"cols", G}, {"data", j.contains("entries") ? j["entries"] : Json()}};
  Eigen::MatrixXd entries = matrix_from_json(shaped);
  std::vector<StructuredUnit> units;
  const Json& ju = j.contains("units") ? j["units"] : Json();
  if (!ju.is_array()) throw InvalidArgument("missing field: units");
  for (const auto& u : ju) {
    units.push_back({req<int>(u, "id"), unit_kind_from_string(req<std::string>(u, "kind")), req<double>(u, "weight")});
  }
  return StructuredDictionary::create(std::move(entries), std::move(units), req<Groups>(j, "groups"));
}

// --- families and supports --------------------------------------------------

Json to_json(const SupportSet& support) { return support.members(); }

SupportSet support_from_json(const Json& j) {
  try {
    return SupportSet(j.get<std::vector<int>>());
  } catch (const Json::exception&) {
    throw InvalidArgument("support must be an array of integers");
  }
}

Json to_json(const FeasibleFamily& family) {
  Json out = {{"class", std::string(family.class_name())}};
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, UnconstrainedK>) {
          out["k"] = f.k;
        } else if constexpr (std::is_same_v<F, GroupK>) {
          out["k_groups"] = f.k_groups;
          out["groups"] = f.groups;
        } else if constexpr (std::is_same_v<F, NOfM>) {
          out["n"] = f.n;
          out["m"] = f.m;
        } else {
          out["motifs"] = support_list(f.motifs);
        }
      },
      family.spec());
  return out;
}

FeasibleFamily family_from_json(const Json& j) {
  check_object(j);
  const std::string cls = req<std::string>(j, "class");
  if (cls == "unconstrained_k") return FeasibleFamily::unconstrained(req<int>(j, "k"));
  if (cls == "group_k") return FeasibleFamily::group(req<int>(j, "k_groups"), req<Groups>(j, "groups"));
  if (cls == "n_of_m") return FeasibleFamily::n_of_m(req<int>(j, "n"), req<int>(j, "m"));
  if (cls == "motif_library") return FeasibleFamily::motifs(support_list_from(j.at("motifs")));
  throw InvalidArgument("unknown family class: " + cls);
}

// --- sensing ----------------------------------------------------------------

Json to_json(const MeasurementOperator& op) {
  return {{"schema", kSchemaVersion},
          {"ensemble", std::string(to_string(op.ensemble))},
          {"seed", op.seed},
          {"matrix", matrix_to_json(op.entries)}};
}

MeasurementOperator operator_from_json(const Json& j) {
  check_object(j);
  MeasurementOperator op;
  op.ensemble = sensing_ensemble_from_string(opt<std::string>(j, "ensemble", "gaussian"));
  op.seed = opt<std::uint64_t>(j, "seed", 0);
  if (!j.contains("matrix")) throw InvalidArgument("missing field: matrix");
  op.entries = matrix_from_json(j["matrix"]);
  return op;
}

Json to_json(const Sketch& sketch) {
  return {{"schema", kSchemaVersion}, {"values", vector_to_json(sketch.values)}, {"noise_sigma", sketch.noise_sigma}};
}

Sketch sketch_from_json(const Json& j) {
  check_object(j);
  if (!j.contains("values")) throw InvalidArgument("missing field: values");
  return Sketch{vector_from_json(j["values"]), opt<double>(j, "noise_sigma", 0.0)};
}

// --- recovery ---------------------------------------------------------------

Json to_json(const RecoveryConfig& config) {
  return {{"lambda1", config.lambda1},
          {"lambda_group", config.lambda_group},
          {"gamma_temporal", config.gamma_temporal},
          {"tau", config.tau},
          {"max_iterations", config.max_iterations},
          {"tolerance", config.tolerance},
          {"family", to_json(config.family)},
          {"groups", config.groups}};
}

RecoveryConfig recovery_config_from_json(const Json& j) {
  check_object(j);
  RecoveryConfig c;
  c.lambda1 = opt<double>(j, "lambda1", c.lambda1);
  c.lambda_group = opt<double>(j, "lambda_group", c.lambda_group);
  c.gamma_temporal = opt<double>(j, "gamma_temporal", c.gamma_temporal);
  c.tau = opt<double>(j, "tau", c.tau);
  c.max_iterations = opt<int>(j, "max_iterations", c.max_iterations);
  c.tolerance = opt<double>(j, "tolerance", c.tolerance);
  if (!j.contains("family")) throw InvalidArgument("missing field: family");
  c.family = family_from_json(j["family"]);
  c.groups = opt<Groups>(j, "groups", {});
  c.validate();
  return c;
}

Json to_json(const RecoveryResult& result) {
  return {{"schema", kSchemaVersion},
          {"alpha_hat", vector_to_json(result.alpha_hat)},
          {"support", result.support.members()},
          {"residual_norm", result.residual_norm},
          {"iterations", result.iterations},
          {"measurements_used", result.measurements_used},
          {"objective_trace", result.objective_trace},
          {"rank_deficient", result.rank_deficient},
          {"early_exit", result.early_exit}};
}

RecoveryResult recovery_result_from_json(const Json& j) {
  check_object(j);
  RecoveryResult r;
  if (!j.contains("alpha_hat")) throw InvalidArgument("missing field: alpha_hat");
  r.alpha_hat = vector_from_json(j["alpha_hat"]);
  r.support = support_from_json(j.at("support"));
  r.residual_norm = req<double>(j, "residual_norm");
  r.iterations = opt<int>(j, "iterations", 0);
  r.measurements_used = opt<int>(j, "measurements_used", 0);
  r.objective_trace = opt<std::vector<double>>(j, "objective_trace", {});
  r.rank_deficient = opt<bool>(j, "rank_deficient", false);
  r.early_exit = opt<bool>(j, "early_exit", false);
  return r;
}

// --- controller -------------------------------------------------------------

Json to_json(const ControllerConfig& config) {
  return {{"m_base", config.m_base}, {"gamma", config.gamma},   {"m_min", config.m_min},
          {"m_max", config.m_max},   {"beta_m", config.beta_m}, {"rho", config.rho_exponent}};
}

ControllerConfig controller_config_from_json(const Json& j) {
  check_object(j);
  ControllerConfig c;
  c.m_base = req<int>(j, "m_base");
  c.gamma = req<double>(j, "gamma");
  c.m_min = req<int>(j, "m_min");
  c.m_max = req<int>(j, "m_max");
  c.beta_m = opt<double>(j, "beta_m", c.beta_m);
  c.rho_exponent = opt<double>(j, "rho", c.rho_exponent);
  c.validate();
  return c;
}

Json to_json(const StabilityReport& report) {
  return {{"schema", kSchemaVersion},
          {"gain", report.gain},
          {"stable", report.stable},
          {"gamma", report.gamma},
          {"entropy_sensitivity", report.entropy_sensitivity},
          {"m_base", report.m_base},
          {"dG_dm", report.dG_dm},
          {"positive_slope_warning", report.positive_slope_warning}};
}

// --- simulator --------------------------------------------------------------

Json to_json(const PromptFamily& family) {
  return {{"family_id", family.family_id},
          {"pool", support_list(family.pool)},
          {"distribution", family.distribution},
          {"measurement_bank_seed", family.measurement_bank_seed}};
}

PromptFamily prompt_family_from_json(const Json& j) {
  check_object(j);
  PromptFamily f;
  f.family_id = opt<int>(j, "family_id", 0);
  if (j.contains("pool")) f.pool = support_list_from(j["pool"]);
  f.distribution = opt<std::vector<double>>(j, "distribution", {});
  f.measurement_bank_seed = opt<std::uint64_t>(j, "measurement_bank_seed", 0);
  return f;
}

Json to_json(const GroundTruthProcess& p) {
  return {{"G", p.G},
          {"D", p.D},
          {"k", p.k},
          {"alpha_min", p.alpha_min},
          {"drift_rate", p.drift_rate},
          {"noise_sigma", p.noise_sigma},
          {"family", to_json(p.family)},
          {"horizon", p.horizon},
          {"seed", p.seed},
          {"mismatch_amplitude", p.mismatch_amplitude},
          {"dictionary_ensemble", std::string(to_string(p.dictionary_ensemble))},
          {"group_size", p.group_size}};
}

GroundTruthProcess process_from_json(const Json& j) {
  check_object(j);
  GroundTruthProcess p;
  p.G = req<int>(j, "G");
  p.D = opt<int>(j, "D", p.G);
  p.k = req<int>(j, "k");
  p.alpha_min = opt<double>(j, "alpha_min", p.alpha_min);
  p.drift_rate = opt<double>(j, "drift_rate", p.drift_rate);
  p.noise_sigma = opt<double>(j, "noise_sigma", p.noise_sigma);
  if (j.contains("family")) p.family = prompt_family_from_json(j["family"]);
  p.horizon = opt<int>(j, "horizon", p.horizon);
  p.seed = opt<std::uint64_t>(j, "seed", p.seed);
  p.mismatch_amplitude = opt<double>(j, "mismatch_amplitude", p.mismatch_amplitude);
  p.dictionary_ensemble =
      dictionary_ensemble_from_string(opt<std::string>(j, "dictionary_ensemble", "identity_padded"));
  p.group_size = opt<int>(j, "group_size", p.group_size);
  p.validate();
  return p;
}

Json to_json(const EntropyChannel& c) {
  return {{"H_base", c.H_base},
          {"entropy_sensitivity", c.entropy_sensitivity},
          {"H_cap", c.H_cap},
          {"noise_amplitude", c.noise_amplitude}};
}

EntropyChannel channel_from_json(const Json& j) {
  check_object(j);
  EntropyChannel c;
  c.H_base = opt<double>(j, "H_base", c.H_base);
  c.entropy_sensitivity = opt<double>(j, "entropy_sensitivity", c.entropy_sensitivity);
  c.H_cap = opt<double>(j, "H_cap", c.H_cap);
  c.noise_amplitude = opt<double>(j, "noise_amplitude", c.noise_amplitude);
  c.validate();
  return c;
}

Json to_json(const LoopOptions& o) {
  return {{"ensemble", std::string(to_string(o.ensemble))},
          {"incremental", o.incremental},
          {"delta_max", o.delta_max},
          {"seed", o.seed}};
}

LoopOptions loop_options_from_json(const Json& j) {
  check_object(j);
  LoopOptions o;
  o.ensemble = sensing_ensemble_from_string(opt<std::string>(j, "ensemble", "gaussian"));
  o.incremental = opt<bool>(j, "incremental", o.incremental);
  o.delta_max = opt<int>(j, "delta_max", o.delta_max);
  o.seed = opt<std::uint64_t>(j, "seed", o.seed);
  if (o.delta_max < 0) throw InvalidArgument("delta_max must be nonnegative");
  return o;
}

Json to_json(const TraceSummary& s) {
  return {{"schema", kSchemaVersion},
          {"mean_f1", s.mean_f1},
          {"mean_drift", s.mean_drift},
          {"total_measurements", s.total_measurements},
          {"mean_m", s.mean_m},
          {"mean_error", s.mean_error},
          {"sensing_cost", s.sensing_cost},
          {"execution_cost", s.execution_cost},
          {"net_cost", s.net_cost},
          {"fallbacks", s.fallbacks}};
}

// --- allocator --------------------------------------------------------------

Json to_json(const PromptInstance& instance) {
  return {{"importance", vector_to_json(instance.importance)},
          {"contributions", matrix_to_json(instance.contributions)},
          {"min_retained", instance.min_retained}};
}

PromptInstance prompt_instance_from_json(const Json& j) {
  check_object(j);
  PromptInstance p;
  if (!j.contains("importance") || !j.contains("contributions")) {
    throw InvalidArgument("prompt instance needs importance and contributions");
  }
  p.importance = vector_from_json(j["importance"]);
  p.contributions = matrix_from_json(j["contributions"]);
  p.min_retained = opt<int>(j, "min_retained", p.min_retained);
  p.validate();
  return p;
}

Json to_json(const LatencyTable& table) {
  Json costs = Json::array();
  for (const auto& [unit, cost] : table.unit_costs) costs.push_back({{"unit", unit}, {"cost", cost}});
  return {{"unit_costs", costs},
          {"prefill_cost_per_token", table.prefill_cost_per_token},
          {"decode_base", table.decode_base}};
}

LatencyTable latency_table_from_json(const Json& j) {
  check_object(j);
  LatencyTable t;
  const Json& costs = j.contains("unit_costs") ? j["unit_costs"] : Json();
  if (!costs.is_array()) throw InvalidArgument("missing field: unit_costs");
  for (const auto& c : costs) t.unit_costs[req<int>(c, "unit")] = req<double>(c, "cost");
  t.prefill_cost_per_token = opt<double>(j, "prefill_cost_per_token", 0.0);
  t.decode_base = opt<double>(j, "decode_base", 0.0);
  t.validate();
  return t;
}

Json to_json(const JointConfig& c) {
  return {{"lambda_p", c.lambda_p}, {"lambda_m", c.lambda_m}, {"beta_tau", c.beta_tau}, {"beta_f", c.beta_f},
          {"beta_c", c.beta_c},     {"sigma0", c.sigma0},     {"c_faith", c.c_faith}};
}

JointConfig joint_config_from_json(const Json& j) {
  check_object(j);
  JointConfig c;
  c.lambda_p = opt<double>(j, "lambda_p", c.lambda_p);
  c.lambda_m = opt<double>(j, "lambda_m", c.lambda_m);
  c.beta_tau = opt<double>(j, "beta_tau", c.beta_tau);
  c.beta_f = opt<double>(j, "beta_f", c.beta_f);
  c.beta_c = opt<double>(j, "beta_c", c.beta_c);
  c.sigma0 = opt<double>(j, "sigma0", c.sigma0);
  c.c_faith = opt<double>(j, "c_faith", c.c_faith);
  c.validate();
  return c;
}

Json to_json(const JointProblem& problem) {
  Json truths = Json::array();
  for (const auto& t : problem.truths) truths.push_back(vector_to_json(t));
  Json operators = Json::array();
  for (const auto& op : problem.operators) operators.push_back(to_json(op));
  return {{"dictionary", to_json(problem.dictionary)},
          {"truths", truths},
          {"operators", operators},
          {"recovery", to_json(problem.recovery)},
          {"k_max", problem.k_max},
          {"exhaustive_support", problem.exhaustive_support}};
}

JointProblem joint_problem_from_json(const Json& j) {
  check_object(j);
  if (!j.contains("dictionary") || !j.contains("truths") || !j.contains("operators") || !j.contains("recovery")) {
    throw InvalidArgument("joint problem needs dictionary, truths, operators and recovery");
  }
  std::vector<Eigen::VectorXd> truths;
  for (const auto& t : j["truths"]) truths.push_back(vector_from_json(t));
  std::vector<MeasurementOperator> operators;
  for (const auto& op : j["operators"]) operators.push_back(operator_from_json(op));
  JointProblem problem{dictionary_from_json(j["dictionary"]), std::move(truths), std::move(operators),
                       recovery_config_from_json(j["recovery"]), req<int>(j, "k_max")};
  problem.exhaustive_support = opt<bool>(j, "exhaustive_support", false);
  problem.validate();
  return problem;
}

Json to_json(const JointSolution& s) {
  Json supports = Json::array();
  for (const auto& r : s.recoveries) supports.push_back(r.support.members());
  std::vector<int> r(s.r.begin(), s.r.end());
  return {{"schema", kSchemaVersion},
          {"r", r},
          {"retained", retained_count(s.r)},
          {"supports", supports},
          {"objective", s.objective_value},
          {"breakdown",
           {{"task_loss", s.breakdown.task_loss},
            {"token_penalty", s.breakdown.token_penalty},
            {"support_penalty", s.breakdown.support_penalty},
            {"latency", s.breakdown.latency},
            {"faithfulness", s.breakdown.faithfulness},
            {"consistency", s.breakdown.consistency}}},
          {"latency", {{"prefill", s.latency.prefill}, {"decode", s.latency.decode}}},
          {"mean_f1", s.mean_f1},
          {"objective_trace", s.objective_trace}};
}

// --- experiments ------------------------------------------------------------

Json to_json(const ExperimentConfig& c) {
  return {{"schema", kSchemaVersion},
          {"experiment", std::string(to_string(c.experiment))},
          {"m_grid", c.m_grid},
          {"k_grid", c.k_grid},
          {"G_grid", c.G_grid},
          {"gamma_grid", c.gamma_grid},
          {"gain_grid", c.gain_grid},
          {"L_H_grid", c.L_H_grid},
          {"lambda_p_grid", c.lambda_p_grid},
          {"beta_tau_grid", c.beta_tau_grid},
          {"noise_grid", c.noise_grid},
          {"drift_grid", c.drift_grid},
          {"pool_sizes", c.pool_sizes},
          {"trials", c.trials},
          {"budget_iters", c.budget_iters},
          {"master_seed", c.master_seed},
          {"output_path", c.output_path},
          {"calibration_factor", c.calibration_factor},
          {"sample_C", c.sample_C},
          {"sample_delta", c.sample_delta},
          {"sample_rho", c.sample_rho},
          {"f1_target", c.f1_target},
          {"G", c.G},
          {"k", c.k},
          {"noise_sigma", c.noise_sigma},
          {"horizon", c.horizon},
          {"m_base", c.m_base},
          {"m_min", c.m_min},
          {"m_max", c.m_max},
          {"lambda1", c.lambda1},
          {"gamma_temporal", c.gamma_temporal},
          {"tau", c.tau},
          {"reference_gain", c.reference_gain},
          {"beta_m", c.beta_m},
          {"rho", c.rho_exponent}};
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  check_object(j);
  ExperimentConfig c;
  c.experiment = experiment_kind_from_string(req<std::string>(j, "experiment"));
  c.m_grid = opt<std::vector<int>>(j, "m_grid", {});
  c.k_grid = opt<std::vector<int>>(j, "k_grid", {});
  c.G_grid = opt<std::vector<int>>(j, "G_grid", {});
  c.gamma_grid = opt<std::vector<double>>(j, "gamma_grid", {});
  c.gain_grid = opt<std::vector<double>>(j, "gain_grid", {});
  c.L_H_grid = opt<std::vector<double>>(j, "L_H_grid", {});
  c.lambda_p_grid = opt<std::vector<double>>(j, "lambda_p_grid", {});
  c.beta_tau_grid = opt<std::vector<double>>(j, "beta_tau_grid", {});
  c.noise_grid = opt<std::vector<double>>(j, "noise_grid", {});
  c.drift_grid = opt<std::vector<int>>(j, "drift_grid", {});
  c.pool_sizes = opt<std::vector<int>>(j, "pool_sizes", {});
  c.trials = opt<int>(j, "trials", c.trials);
  c.budget_iters = opt<int>(j, "budget_iters", c.budget_iters);
  c.master_seed = opt<std::uint64_t>(j, "master_seed", c.master_seed);
  c.output_path = opt<std::string>(j, "output_path", c.output_path);
  c.calibration_factor = opt<double>(j, "calibration_factor", c.calibration_factor);
  c.sample_C = opt<double>(j, "sample_C", c.sample_C);
  c.sample_delta = opt<double>(j, "sample_delta", c.sample_delta);
  c.sample_rho = opt<double>(j, "sample_rho", c.sample_rho);
  c.f1_target = opt<double>(j, "f1_target", c.f1_target);
  c.G = opt<int>(j, "G", c.G);
  c.k = opt<int>(j, "k", c.k);
  c.noise_sigma = opt<double>(j, "noise_sigma", c.noise_sigma);
  c.horizon = opt<int>(j, "horizon", c.horizon);
  c.m_base = opt<int>(j, "m_base", c.m_base);
  c.m_min = opt<int>(j, "m_min", c.m_min);
  c.m_max = opt<int>(j, "m_max", c.m_max);
  c.lambda1 = opt<double>(j, "lambda1", c.lambda1);
  c.gamma_temporal = opt<double>(j, "gamma_temporal", c.gamma_temporal);
  c.tau = opt<double>(j, "tau", c.tau);
  c.reference_gain = opt<double>(j, "reference_gain", c.reference_gain);
  c.beta_m = opt<double>(j, "beta_m", c.beta_m);
  c.rho_exponent = opt<double>(j, "rho", c.rho_exponent);
  c.validate();
  return c;
}

void write_objective_trace_csv(const RecoveryResult& result, std::ostream& out) {
  CsvTable table({"iteration", "objective", "residual_norm"});
  const size_t n = result.objective_trace.size();
  for (size_t i = 0; i < n; ++i) {
    table.add_row({format_number(static_cast<int>(i)), format_number(result.objective_trace[i]),
                   i + 1 == n ? format_number(result.residual_norm) : std::string()});
  }
  table.write(out);
}

}  // namespace dynsense
