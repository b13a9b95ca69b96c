// normkit: affordance inference, analogical comparison, moral perception
// checks and the end-to-end kitchen episode from the command line.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "normkit/affordance.hpp"
#include "normkit/case_library.hpp"
#include "normkit/error.hpp"
#include "normkit/format.hpp"
#include "normkit/goal_manager.hpp"
#include "normkit/scenario.hpp"
#include "normkit/sme.hpp"
#include "normkit/trace.hpp"

#ifndef NORMKIT_DEFAULT_DATA_DIR
#define NORMKIT_DEFAULT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace normkit;

namespace {

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kInputError = 2;

struct RunConfig {
  fs::path rules;
  std::optional<fs::path> scene;
  fs::path cases;
  fs::path scenario;
  int k = 3;
  int depth_limit = 4;
  double min_alpha = 0.5;
  double min_similarity = 0.3;
  std::string policy = "permissive";
  std::string output = "text";
  std::vector<std::string> operators;
};

// Values given on the command line; unset ones fall back to the config file.
struct Flags {
  std::string config, rules, scene, cases, scenario, policy, output, operators;
  std::optional<int> k, depth_limit;
  std::optional<double> min_alpha, min_similarity;
};

fs::path data_dir() {
  if (const char* env = std::getenv("NORMKIT_DATA"); env && *env) return env;
  return NORMKIT_DEFAULT_DATA_DIR;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void apply_config_file(RunConfig& cfg, const fs::path& file) {
  const auto j = nlohmann::json::parse(slurp(file), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError(file.string(), {1, 1}, "config is not a JSON object");
  const fs::path base = file.parent_path();
  auto path_of = [&](const char* key) { return base / j.at(key).get<std::string>(); };
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "rules") cfg.rules = path_of("rules");
      else if (key == "scene") cfg.scene = path_of("scene");
      else if (key == "cases") cfg.cases = path_of("cases");
      else if (key == "scenario") cfg.scenario = path_of("scenario");
      else if (key == "k") cfg.k = value.get<int>();
      else if (key == "depth_limit") cfg.depth_limit = value.get<int>();
      else if (key == "min_alpha") cfg.min_alpha = value.get<double>();
      else if (key == "min_similarity") cfg.min_similarity = value.get<double>();
      else if (key == "policy") cfg.policy = value.get<std::string>();
      else if (key == "output") cfg.output = value.get<std::string>();
      else if (key == "operators") cfg.operators = value.get<std::vector<std::string>>();
      else throw ParseError(file.string(), {1, 1}, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(file.string(), {1, 1}, std::string("bad config value: ") + e.what());
  }
}

RunConfig resolve(const Flags& f) {
  const fs::path data = data_dir();
  RunConfig cfg;
  cfg.rules = data / "rules" / "default.rules";
  cfg.cases = data / "cases";
  cfg.scenario = data / "scenarios" / "kitchen_bring.scenario";
  for (auto op : default_operators()) cfg.operators.emplace_back(to_string(op));

  if (!f.config.empty()) {
    apply_config_file(cfg, f.config);
  } else if (fs::exists(data / "config.json")) {
    apply_config_file(cfg, data / "config.json");
  }

  if (!f.rules.empty()) cfg.rules = f.rules;
  if (!f.scene.empty()) cfg.scene = fs::path(f.scene);
  if (!f.cases.empty()) cfg.cases = f.cases;
  if (!f.scenario.empty()) cfg.scenario = f.scenario;
  if (f.k) cfg.k = *f.k;
  if (f.depth_limit) cfg.depth_limit = *f.depth_limit;
  if (f.min_alpha) cfg.min_alpha = *f.min_alpha;
  if (f.min_similarity) cfg.min_similarity = *f.min_similarity;
  if (!f.policy.empty()) cfg.policy = f.policy;
  if (!f.output.empty()) cfg.output = f.output;
  if (!f.operators.empty()) cfg.operators = f.operators == "none" ? std::vector<std::string>{} : split_list(f.operators);

  if (cfg.k < 1) throw DomainError("k must be at least 1");
  if (cfg.depth_limit < 0) throw DomainError("depth limit must be non-negative");
  if (!(cfg.min_alpha >= 0.0 && cfg.min_alpha <= 1.0)) throw DomainError("min-alpha must lie in [0,1]");
  if (cfg.policy != "strict" && cfg.policy != "permissive") throw DomainError("policy is strict or permissive");
  if (cfg.output != "text" && cfg.output != "structured") throw DomainError("output is text or structured");
  return cfg;
}

CheckConfig check_config(const RunConfig& cfg) {
  CheckConfig c;
  c.k = static_cast<std::size_t>(cfg.k);
  c.depth_limit = static_cast<std::size_t>(cfg.depth_limit);
  c.min_similarity = cfg.min_similarity;
  c.policy = cfg.policy == "strict" ? NoPrecedentPolicy::strict : NoPrecedentPolicy::permissive;
  c.operators.clear();
  for (const auto& name : cfg.operators) {
    auto op = parse_operator(name);
    if (!op) throw DomainError("unknown modification operator '" + name + "'");
    c.operators.push_back(*op);
  }
  c.validate();
  return c;
}

RuleBase load_rules(const fs::path& p) {
  return std::make_shared<const std::vector<AffordanceRule>>(parse_rule_file(slurp(p), p.string()));
}

Scene load_scene(const fs::path& p) { return parse_scene_file(slurp(p), p.string()); }

Scenario load_full_scenario(const RunConfig& cfg) {
  Scenario s = load_scenario(cfg.scenario);
  s.set_rules(load_rules(cfg.rules));
  s.set_min_alpha(cfg.min_alpha);
  if (cfg.scene) s.set_scene(load_scene(*cfg.scene));
  return s;
}

void emit(const Trace& trace, const RunConfig& cfg) {
  std::cout << render(trace, cfg.output == "text" ? TraceFormat::text : TraceFormat::jsonl);
}

// --- subcommands ------------------------------------------------------------

int cmd_infer(const RunConfig& cfg) {
  const auto rules = load_rules(cfg.rules);
  const Scene scene = load_scene(cfg.scene.value_or(data_dir() / "scenes" / "kitchen.scene"));
  const InferenceResult result = infer(*rules, scene);
  for (const auto& w : result.warnings) std::cerr << "normkit: warning: " << w << "\n";
  if (cfg.output == "text") {
    for (const auto& b : result.beliefs) std::cout << to_string(b.affordance) << " " << to_string(b.belief) << "\n";
    return kOk;
  }
  Trace trace;
  for (const auto& b : result.beliefs) {
    TraceRecord r("affordance");
    r.value("affordance", to_string(b.affordance)).value("belief", to_string(b.belief));
    trace.push_back(std::move(r));
  }
  emit(trace, cfg);
  return kOk;
}

sme::Dgroup load_description(const fs::path& p, const RunConfig& cfg) {
  if (p.extension() == ".scenario") {
    Scenario s = load_scenario(p);
    s.set_rules(load_rules(cfg.rules));
    s.set_min_alpha(cfg.min_alpha);
    return s.dgroup();
  }
  auto groups = sme::parse_dgroups(slurp(p), p.string());
  if (groups.size() != 1) throw ParseError(p.string(), {1, 1}, "expected exactly one dgroup");
  groups.front().annotations.clear();
  return groups.front();
}

int cmd_compare(const RunConfig& cfg, const fs::path& base_path, const fs::path& target_path) {
  const sme::Dgroup base = load_description(base_path, cfg);
  const sme::Dgroup target = load_description(target_path, cfg);
  Scene known = sme::dgroup_facts(target);
  if (cfg.scene) {
    for (auto& f : load_scene(*cfg.scene).facts) known.facts.push_back(std::move(f));
  }

  const auto result = sme::similarity(base, target);
  Trace trace;
  trace.push_back(TraceRecord("score").value("score", format_fixed4(result.score)));
  trace.push_back(TraceRecord("gmaps").value("count", std::to_string(result.all_gmaps.size())));
  const auto& g = result.best_gmap;
  for (const auto& m : g.correspondences) {
    TraceRecord r("correspondence");
    r.value("base", m.base_id).value("target", m.target_id).field("predicate", m.base_predicate);
    if (m.target_predicate != m.base_predicate) r.field("target_predicate", m.target_predicate);
    trace.push_back(std::move(r));
  }
  for (const auto& e : g.entity_map) {
    trace.push_back(TraceRecord("entity").value("base", e.base_id).value("target", e.target_id));
  }
  for (const auto& ci : g.candidate_inferences) {
    TraceRecord r("candidate inference");
    r.value("expression", to_string(ci))
        .field("verdict", std::string(to_string(sme::verify_candidate_inference(ci, known))));
    trace.push_back(std::move(r));
  }
  emit(trace, cfg);
  return kOk;
}

Trace rejection_trace(const MoralRejection& e) {
  Trace trace;
  for (std::size_t i = 0; i < e.ranking().size(); ++i) {
    const auto& r = e.ranking()[i];
    trace.push_back(TraceRecord("retrieval")
                        .value("rank", std::to_string(i + 1))
                        .value("case", r.name)
                        .value("score", format_fixed4(r.score))
                        .value("label", std::string(to_string(r.acceptability))));
  }
  trace.push_back(TraceRecord("rejected")
                      .field("precedent", e.precedent())
                      .field("explored", std::to_string(e.explored())));
  trace.push_back(TraceRecord("best script").value("script", canonical(e.best().script())));
  return trace;
}

int cmd_check(const RunConfig& cfg) {
  const CheckConfig cc = check_config(cfg);
  const Scenario s = load_full_scenario(cfg);
  if (s.script().empty() && s.goal()) {
    throw ModelError("scenario '" + s.name() + "' has a goal but no script; use run-episode");
  }
  const CaseLibrary library = load_library(cfg.cases);
  try {
    const CheckResult result = check_moral_percept(s, library, cc);
    Trace trace;
    append_check_trace(trace, "check", result, cc);
    const RankedPrecedent* decisive = decisive_precedent(result.final_ranking, cc);
    trace.push_back(TraceRecord("accepted")
                        .field("precedent", decisive ? decisive->name : "none")
                        .field("modifications", std::to_string(result.modifications.size())));
    trace.push_back(TraceRecord("script").value("script", canonical(result.scenario.script())));
    emit(trace, cfg);
    return kOk;
  } catch (const MoralRejection& e) {
    emit(rejection_trace(e), cfg);
    return kRejected;
  }
}

int cmd_run_episode(const RunConfig& cfg) {
  const CheckConfig cc = check_config(cfg);
  const Scenario s = load_full_scenario(cfg);
  const CaseLibrary library = load_library(cfg.cases);
  try {
    emit(run_episode(s, library, cc).trace, cfg);
    return kOk;
  } catch (const MoralRejection& e) {
    emit(rejection_trace(e), cfg);
    return kRejected;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"normkit: affordance-aware moral perception for a helper robot"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config, "JSON config file (default: <data>/config.json)");
  app.add_option("--rules", f.rules, "affordance rule file");
  app.add_option("--scene", f.scene, "scene file");
  app.add_option("--cases", f.cases, "case library directory or file");
  app.add_option("--scenario", f.scenario, "scenario file");
  app.add_option("--k", f.k, "precedents to retrieve");
  app.add_option("--depth-limit", f.depth_limit, "modification search depth");
  app.add_option("--min-alpha", f.min_alpha, "belief floor for affordances");
  app.add_option("--min-similarity", f.min_similarity, "similarity floor for a deciding precedent");
  app.add_option("--policy", f.policy, "strict|permissive when no precedent qualifies");
  app.add_option("--output", f.output, "text|structured");
  app.add_option("--operators", f.operators, "comma-separated modification operators, or none");

  auto* infer_cmd = app.add_subcommand("infer", "list derived affordances for a scene");
  auto* compare_cmd = app.add_subcommand("compare", "structure-map two descriptions");
  std::string base_path, target_path;
  compare_cmd->add_option("base", base_path, "base case, dgroup or scenario")->required();
  compare_cmd->add_option("target", target_path, "target case, dgroup or scenario")->required();
  auto* check_cmd = app.add_subcommand("check", "run the moral perception check on a scenario");
  auto* episode_cmd = app.add_subcommand("run-episode", "decompose, resolve, check and execute a goal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    const RunConfig cfg = resolve(f);
    if (infer_cmd->parsed()) return cmd_infer(cfg);
    if (compare_cmd->parsed()) return cmd_compare(cfg, base_path, target_path);
    if (check_cmd->parsed()) return cmd_check(cfg);
    if (episode_cmd->parsed()) return cmd_run_episode(cfg);
  } catch (const NoPrecedentError& e) {
    std::cerr << "normkit: rejected: " << e.what() << "\n";
    return kRejected;
  } catch (const Error& e) {
    std::cerr << "normkit: error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "normkit: error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
