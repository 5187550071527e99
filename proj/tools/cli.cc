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

#include "cli.h"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "dynsense/allocator.h"
#include "dynsense/controller.h"
#include "dynsense/dictionary.h"
#include "dynsense/error.h"
#include "dynsense/experiments.h"
#include "dynsense/io.h"
#include "dynsense/random.h"
#include "dynsense/recovery.h"
#include "dynsense/sensing.h"
#include "dynsense/simulator.h"

namespace dynsense::cli {
namespace {

namespace fs = std::filesystem;

struct Outputs {
  // File name (relative to the output directory) -> contents, in write order.
  std::vector<std::pair<std::string, std::string>> files;
};

struct Invocation {
  Json config;
  std::uint64_t seed = 0;
};

using Handler = std::function<Outputs(const Invocation&)>;

template <class T>
T field(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw InvalidArgument(std::string("ill-typed field: ") + key);
  }
}

template <class T>
T required(const Json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("missing field: ") + key);
  return field<T>(j, key, T{});
}

const Json& section(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_object()) throw InvalidArgument(std::string("missing section: ") + key);
  return j.at(key);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string iso_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

// 1-based line and column of a 1-based byte offset.
std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// --- subcommands --------------------------------------------------------------

Outputs gen_dict(const Invocation& inv) {
  const Json& c = inv.config;
  const int D = required<int>(c, "D");
  const int G = required<int>(c, "G");
  const int group_size = field<int>(c, "group_size", 1);
  const auto ensemble = dictionary_ensemble_from_string(field<std::string>(c, "ensemble", "identity_padded"));
  const StructuredDictionary psi = build_synthetic_dictionary(D, G, group_size, ensemble, inv.seed);
  return {{{"dictionary.json", dump(to_json(psi))}}};
}

Outputs sense(const Invocation& inv) {
  const Json& c = inv.config;
  const auto ensemble = sensing_ensemble_from_string(field<std::string>(c, "ensemble", "gaussian"));
  const int m = required<int>(c, "m");
  const double sigma = field<double>(c, "noise_sigma", 0.0);
  Eigen::VectorXd u;
  std::optional<StructuredDictionary> psi;
  if (c.contains("u")) {
    u = vector_from_json(c["u"]);
  } else {
    psi = dictionary_from_json(section(c, "dictionary"));
    if (!c.contains("alpha")) throw InvalidArgument("sense needs either u or dictionary + alpha");
    const Eigen::VectorXd alpha = vector_from_json(c["alpha"]);
    if (alpha.size() != psi->G()) throw InvalidArgument("alpha length must equal G");
    u = psi->entries() * alpha;
  }
  const MeasurementOperator A =
      draw_operator(ensemble, m, static_cast<int>(u.size()), derive_seed(inv.seed, {tag_hash("operator")}));
  const Sketch z = measure(A, u, sigma, derive_seed(inv.seed, {tag_hash("noise")}));
  Outputs out{{{"operator.json", dump(to_json(A))}, {"sketch.json", dump(to_json(z))}}};
  if (psi) {
    out.files.emplace_back("effective.json",
                           dump({{"schema", kSchemaVersion}, {"matrix", matrix_to_json(effective_matrix(A, *psi))}}));
  }
  return out;
}

Outputs recover(const Invocation& inv) {
  const Json& c = inv.config;
  const std::string method = field<std::string>(c, "method", "prox");
  const Eigen::MatrixXd M = matrix_from_json(section(c, "matrix"));
  const Sketch z = sketch_from_json(section(c, "sketch"));
  const RecoveryConfig config = recovery_config_from_json(section(c, "recovery"));
  if (z.m() != M.rows()) throw InvalidArgument("sketch length must equal the matrix row count");

  RecoveryResult result;
  if (method == "omp") {
    result = omp_structured(z, M, required<int>(c, "k_max"), config.family);
  } else if (method == "prox") {
    std::optional<Eigen::VectorXd> previous;
    if (c.contains("previous_alpha")) previous = vector_from_json(c["previous_alpha"]);
    result = prox_group_lasso(z, M, config, previous, previous);
  } else if (method == "incremental") {
    const RecoveryResult previous = recovery_result_from_json(section(c, "previous"));
    result = recover_incremental(z, M, previous, field<int>(c, "delta_max", 2), config);
  } else {
    throw InvalidArgument("unknown recovery method: " + method);
  }
  Outputs out{{{"result.json", dump(to_json(result))}}};
  if (method == "prox") {
    std::ostringstream trace;
    write_objective_trace_csv(result, trace);
    out.files.emplace_back("objective_trace.csv", trace.str());
  }
  return out;
}

// Every seed in the loop derives from the master seed; seeds inside the
// config sections are ignored.
Outputs simulate(const Invocation& inv) {
  const Json& c = inv.config;
  GroundTruthProcess process = process_from_json(section(c, "process"));
  process.seed = derive_seed(inv.seed, {tag_hash("process")});
  process.family.measurement_bank_seed = derive_seed(inv.seed, {tag_hash("bank")});
  const ControllerConfig controller = controller_config_from_json(section(c, "controller"));
  const EntropyChannel channel = c.contains("channel") ? channel_from_json(c["channel"]) : EntropyChannel{};
  const RecoveryConfig recovery = recovery_config_from_json(section(c, "recovery"));
  LoopOptions options = c.contains("loop") ? loop_options_from_json(c["loop"]) : LoopOptions{};
  options.seed = derive_seed(inv.seed, {tag_hash("loop")});

  const std::string mode = field<std::string>(c, "mode", "closed");
  SimulationTrace trace;
  if (mode == "closed") {
    trace = run_closed_loop(process, controller, channel, recovery, options);
  } else if (mode == "open") {
    trace = run_open_loop(process, required<int>(c, "m"), controller, channel, recovery, options);
  } else {
    throw InvalidArgument("mode must be closed or open");
  }
  std::optional<double> execution;
  if (c.contains("execution_cost")) execution = field<double>(c, "execution_cost", 0.0);
  std::ostringstream csv;
  write_trace_csv(trace, csv);
  return {{{"trace.csv", csv.str()}, {"summary.json", dump(to_json(trace_metrics(trace, execution)))}}};
}

Outputs sweep(const Invocation& inv) {
  Json config_json = inv.config;
  config_json["master_seed"] = inv.seed;
  const ExperimentConfig config = experiment_config_from_json(config_json);
  ExperimentOutput result = run_experiment(config);
  result.summary["config"] = to_json(config);
  const std::string name(to_string(config.experiment));
  return {{{name + ".csv", result.table.str()}, {name + "_summary.json", dump(result.summary)}}};
}

SyntheticJointSpec synthetic_spec_from_json(const Json& j) {
  SyntheticJointSpec s;
  s.n = field<int>(j, "n", s.n);
  s.D = field<int>(j, "D", s.D);
  s.G = field<int>(j, "G", s.G);
  s.k = field<int>(j, "k", s.k);
  s.T = field<int>(j, "T", s.T);
  s.m = field<int>(j, "m", s.m);
  s.min_retained = field<int>(j, "min_retained", s.min_retained);
  s.alpha_min = field<double>(j, "alpha_min", s.alpha_min);
  s.contribution_scale = field<double>(j, "contribution_scale", s.contribution_scale);
  s.ensemble = sensing_ensemble_from_string(field<std::string>(j, "ensemble", "gaussian"));
  s.exhaustive_support = field<bool>(j, "exhaustive_support", s.exhaustive_support);
  return s;
}

SyntheticJoint load_joint(const Invocation& inv) {
  const Json& c = inv.config;
  if (c.contains("synthetic")) {
    return make_synthetic_joint(synthetic_spec_from_json(section(c, "synthetic")),
                                derive_seed(inv.seed, {tag_hash("instance")}));
  }
  return {prompt_instance_from_json(section(c, "instance")), joint_problem_from_json(section(c, "problem")),
          latency_table_from_json(section(c, "latency"))};
}

Outputs joint(const Invocation& inv) {
  const SyntheticJoint inst = load_joint(inv);
  const JointConfig config = joint_config_from_json(section(inv.config, "joint"));
  const JointSolution solution =
      optimize_joint(inst.instance, inst.problem, inst.table, config, field<int>(inv.config, "budget_iters", 16),
                     derive_seed(inv.seed, {tag_hash("recover")}));
  return {{{"solution.json", dump(to_json(solution))}}};
}

Outputs pareto(const Invocation& inv) {
  const SyntheticJoint inst = load_joint(inv);
  const JointConfig config = joint_config_from_json(section(inv.config, "joint"));
  const ControllerConfig sensing = controller_config_from_json(section(inv.config, "sensing"));
  const CsvTable table = joint_pareto(inst.instance, inst.problem, inst.table, config, sensing,
                                      required<std::vector<double>>(inv.config, "lambda_p_grid"),
                                      required<std::vector<double>>(inv.config, "beta_tau_grid"),
                                      field<int>(inv.config, "budget_iters", 16),
                                      derive_seed(inv.seed, {tag_hash("recover")}));
  return {{{"pareto.csv", table.str()}}};
}

// Either a given slope dG_dm or error_samples [[m, e], ...] to fit one.
Outputs stability(const Invocation& inv) {
  const Json& c = inv.config;
  const double gamma = required<double>(c, "gamma");
  const double L_H = required<double>(c, "L_H");
  const int m_base = required<int>(c, "m_base");
  Json out = {{"schema", kSchemaVersion}};
  double slope = 0.0;
  if (c.contains("error_samples")) {
    const auto samples = field<std::vector<std::pair<int, double>>>(c, "error_samples", {});
    const ErrorCurveFit fit = fit_error_curve(samples, m_base);
    slope = fit.slope;
    out["error_curve"] = {{"budgets", fit.curve.budgets()}, {"means", fit.curve.means()},
                          {"fitted", fit.curve.fitted()}};
  } else {
    slope = required<double>(c, "dG_dm");
  }
  out["report"] = to_json(stability_gain(gamma, L_H, m_base, slope));
  return {{{"stability.json", dump(out)}}};
}

const std::map<std::string, std::pair<Handler, std::string>>& handlers() {
  static const std::map<std::string, std::pair<Handler, std::string>> table = {
      {"gen-dict", {gen_dict, "Build a synthetic structured dictionary"}},
      {"sense", {sense, "Draw a measurement operator and sketch a feature vector"}},
      {"recover", {recover, "Recover a sparse code from a sketch (omp, prox, incremental)"}},
      {"simulate", {simulate, "Run the closed- or open-loop sensing simulation"}},
      {"sweep", {sweep, "Run an experiment sweep"}},
      {"pareto", {pareto, "Sweep joint-allocator weights on one instance"}},
      {"joint", {joint, "Optimize retention and recovery jointly"}},
      {"stability", {stability, "Predict the closed-loop stability gain"}},
  };
  return table;
}

int run(const std::vector<std::string>& args, std::ostream& err) {
  CLI::App app{"Dynamic structured sensing toolkit", "dynsense"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  for (const auto& [name, entry] : handlers()) {
    CLI::App* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--out", out_dir, "Output directory");
  }

  if (!args.empty() && !args.front().empty() && args.front()[0] != '-' && !handlers().count(args.front())) {
    err << "error: unknown subcommand " << args.front() << "\n" << app.help();
    return kExitInvalidConfig;
  }
  std::vector<const char*> argv;
  argv.push_back("dynsense");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInvalidConfig;
  }
  const CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    err << "error: cannot read config " << config_path << "\n";
    return kExitInvalidConfig;
  }
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Invocation inv;
  try {
    inv.config = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    err << "error: malformed JSON in " << config_path << " at line " << line << ", column " << column << "\n";
    return kExitInvalidConfig;
  }
  if (!inv.config.is_object()) {
    err << "error: config must be a JSON object\n";
    return kExitInvalidConfig;
  }

  const std::string started = iso_now();
  Outputs outputs;
  try {
    inv.seed = seed ? *seed : field<std::uint64_t>(inv.config, "seed", field<std::uint64_t>(inv.config, "master_seed", 0));
    if (out_dir.empty()) out_dir = field<std::string>(inv.config, "output_path", ".");
    if (out_dir.empty()) out_dir = ".";
    outputs = handlers().at(command).first(inv);
  } catch (const InvalidArgument& e) {
    err << "error: invalid config: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const Json::exception& e) {
    err << "error: invalid config: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    err << "error: " << command << " failed: " << e.what() << "\n";
    return kExitRuntimeFailure;
  }

  try {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    Json digests = Json::array();
    for (const auto& [name, contents] : outputs.files) {
      std::ofstream file(dir / name, std::ios::binary);
      file << contents;
      if (!file) throw std::runtime_error("cannot write " + (dir / name).string());
      digests.push_back({{"file", name}, {"sha256", sha256_hex(contents)}});
    }
    const Json manifest = {{"schema", kSchemaVersion},
                           {"tool", "dynsense"},
                           {"version", kToolVersion},
                           {"subcommand", command},
                           {"config", inv.config},
                           {"master_seed", inv.seed},
                           {"started", started},
                           {"finished", iso_now()},
                           {"outputs", digests}};
    std::ofstream file(dir / "manifest.json", std::ios::binary);
    file << dump(manifest);
    if (!file) throw std::runtime_error("cannot write manifest");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeFailure;
  }
  return kExitOk;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return out.str();
}

int cli_main(const std::vector<std::string>& args, std::ostream& err) { return run(args, err); }

int cli_main(int argc, const char* const* argv, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, err);
}

}  // namespace dynsense::cli
