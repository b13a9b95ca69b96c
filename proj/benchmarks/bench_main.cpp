#include <benchmark/benchmark.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "normkit/affordance.hpp"
#include "normkit/case_library.hpp"
#include "normkit/goal_manager.hpp"
#include "normkit/scenario.hpp"
#include "normkit/sme.hpp"

using namespace normkit;

namespace {

const std::filesystem::path kData = NORMKIT_DATA_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<AffordanceRule>& rules() {
  static const auto r = parse_rule_file(slurp(kData / "rules/default.rules"));
  return r;
}

Scenario scenario(const std::string& name) {
  Scenario s = load_scenario(kData / "scenarios" / (name + ".scenario"));
  s.set_rules(std::make_shared<const std::vector<AffordanceRule>>(rules()));
  return s;
}

const CaseLibrary& library() {
  static const CaseLibrary lib = load_library(kData / "cases");
  return lib;
}

void BM_Infer(benchmark::State& state) {
  const Scene scene = parse_scene_file(slurp(kData / "scenes/kitchen.scene"));
  for (auto _ : state) benchmark::DoNotOptimize(infer(rules(), scene));
}
BENCHMARK(BM_Infer);

void BM_ExtractGmaps(benchmark::State& state) {
  const auto query = scenario("kitchen_approach").dgroup();
  const auto& base = library().cases().front().dgroup;
  for (auto _ : state) benchmark::DoNotOptimize(sme::extract_gmaps(base, query));
}
BENCHMARK(BM_ExtractGmaps);

void BM_Similarity(benchmark::State& state) {
  const auto query = scenario("kitchen_approach").dgroup();
  const auto& base = library().cases().front().dgroup;
  for (auto _ : state) benchmark::DoNotOptimize(sme::similarity(base, query));
}
BENCHMARK(BM_Similarity);

void BM_Retrieve(benchmark::State& state) {
  const auto query = scenario("kitchen_approach").dgroup();
  for (auto _ : state) benchmark::DoNotOptimize(retrieve(library(), query, 3));
}
BENCHMARK(BM_Retrieve);

void BM_Episode(benchmark::State& state) {
  const auto s = scenario("kitchen_bring");
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(s, library()));
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
